#pragma once

#include <functional>
#include <vector>

namespace vaxalloc::num {

/// Central-difference gradient estimate of a scalar function:
/// g_i = (f(p + h e_i) - f(p - h e_i)) / 2h.
/// Throws NumericError identifying the coordinate if f returns a non-finite
/// value. This is the independent oracle every hand-derived gradient in the
/// library is verified against; it must never share code with the analytic
/// backward passes.
std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> point, double h = 1e-5);

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor)
double max_relative_error(const std::vector<double>& a, const std::vector<double>& b,
                          double floor = 1e-8);

} // namespace vaxalloc::num
