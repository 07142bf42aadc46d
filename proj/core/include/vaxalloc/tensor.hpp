#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vaxalloc::num {

using Vec = std::vector<double>;

/// Dense row-major matrix. Dimension metadata always matches storage length.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    Vec& data() { return data_; }
    const Vec& data() const { return data_; }

    void fill(double v) { data_.assign(data_.size(), v); }

private:
    std::size_t rows_ = 0, cols_ = 0;
    Vec data_;
};

bool all_finite(std::span<const double> v);

/// Throws NumericError naming `where` if any value is NaN or infinite.
/// Called at every layer boundary of the hand-written networks.
void ensure_finite(std::span<const double> v, const std::string& where);
void ensure_finite(double v, const std::string& where);

/// out = M x  (naive loops; the whole library is BLAS-free by design).
void matvec(const Matrix& m, std::span<const double> x, std::span<double> out);

/// out += M^T x  (accumulating transpose product, used in backward passes).
void matvec_t_accum(const Matrix& m, std::span<const double> x, std::span<double> out);

/// M += a b^T
void outer_accum(Matrix& m, std::span<const double> a, std::span<const double> b);

double dot(std::span<const double> a, std::span<const double> b);

/// out += s * a
void axpy(double s, std::span<const double> a, std::span<double> out);

} // namespace vaxalloc::num
