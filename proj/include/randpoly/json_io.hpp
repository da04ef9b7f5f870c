#pragma once

#include <span>
#include <string>

#include <Eigen/Core>

namespace randpoly::io {

/// "%.17g", with non-finite values spelled as JSON-safe strings.
std::string format_double(double x);

/// "[a, b, ...]" at 17 significant digits.
std::string format_array(std::span<const double> values);
std::string format_vector(const Eigen::VectorXd& v);

std::string quote(const std::string& s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace randpoly::io
