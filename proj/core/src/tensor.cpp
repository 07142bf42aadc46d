#include "vaxalloc/tensor.hpp"

#include <cassert>
#include <cmath>

#include "vaxalloc/errors.hpp"

namespace vaxalloc::num {

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

void ensure_finite(std::span<const double> v, const std::string& where) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i]))
            throw NumericError("non-finite value at index " + std::to_string(i), where);
}

void ensure_finite(double v, const std::string& where) {
    if (!std::isfinite(v)) throw NumericError("non-finite value", where);
}

void matvec(const Matrix& m, std::span<const double> x, std::span<double> out) {
    assert(x.size() == m.cols() && out.size() == m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = m.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) acc += row[c] * x[c];
        out[r] = acc;
    }
}

void matvec_t_accum(const Matrix& m, std::span<const double> x, std::span<double> out) {
    assert(x.size() == m.rows() && out.size() == m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = m.row(r);
        const double xr = x[r];
        for (std::size_t c = 0; c < m.cols(); ++c) out[c] += xr * row[c];
    }
}

void outer_accum(Matrix& m, std::span<const double> a, std::span<const double> b) {
    assert(a.size() == m.rows() && b.size() == m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double* row = m.row(r);
        const double ar = a[r];
        for (std::size_t c = 0; c < m.cols(); ++c) row[c] += ar * b[c];
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double s, std::span<const double> a, std::span<double> out) {
    assert(a.size() == out.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += s * a[i];
}

} // namespace vaxalloc::num
