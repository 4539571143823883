// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace taudnn {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Dimensions are fixed at construction;
// there is no resize.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return a_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

// y = W x. Throws std::invalid_argument on shape mismatch.
Vector matvec(const Matrix& W, const Vector& x);
void matvec_into(const Matrix& W, const Vector& x, Vector& out);

// y = W^T x.
Vector matvec_t(const Matrix& W, const Vector& x);
void matvec_t_into(const Matrix& W, const Vector& x, Vector& out);

// a b^T.
Matrix outer(const Vector& a, const Vector& b);

// A B. Throws std::invalid_argument on shape mismatch.
Matrix matmul(const Matrix& A, const Matrix& B);

// Largest singular value by power iteration on M^T M (deterministic start).
double spectral_norm(const Matrix& M, int iters = 100);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double norm2_sq(const Vector& v);

// y += alpha * x.
void axpy(double alpha, const Vector& x, Vector& y);

// Width change by truncation or zero padding. Linear in v; the identity when
// v already has the requested width.
Vector project(const Vector& v, std::size_t width);
void project_into(const Vector& v, std::size_t width, Vector& out);

// out += alpha * projection of v to out's width (avoids a temporary).
void add_projected(double alpha, const Vector& v, Vector& out);

}  // namespace taudnn
