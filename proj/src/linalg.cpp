// SPDX-License-Identifier: Apache-2.0
#include "taudnn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace taudnn {

void matvec_into(const Matrix& W, const Vector& x, Vector& out) {
    if (W.cols() != x.size())
        throw std::invalid_argument("matvec: shape mismatch");
    out.assign(W.rows(), 0.0);
    const double* a = W.data();
    for (std::size_t i = 0; i < W.rows(); ++i) {
        double s = 0.0;
        const double* row = a + i * W.cols();
        for (std::size_t j = 0; j < W.cols(); ++j) s += row[j] * x[j];
        out[i] = s;
    }
}

Vector matvec(const Matrix& W, const Vector& x) {
    Vector out;
    matvec_into(W, x, out);
    return out;
}

void matvec_t_into(const Matrix& W, const Vector& x, Vector& out) {
    if (W.rows() != x.size())
        throw std::invalid_argument("matvec_t: shape mismatch");
    out.assign(W.cols(), 0.0);
    const double* a = W.data();
    for (std::size_t i = 0; i < W.rows(); ++i) {
        const double xi = x[i];
        const double* row = a + i * W.cols();
        for (std::size_t j = 0; j < W.cols(); ++j) out[j] += xi * row[j];
    }
}

Vector matvec_t(const Matrix& W, const Vector& x) {
    Vector out;
    matvec_t_into(W, x, out);
    return out;
}

Matrix outer(const Vector& a, const Vector& b) {
    Matrix M(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) M(i, j) = a[i] * b[j];
    return M;
}

Matrix matmul(const Matrix& A, const Matrix& B) {
    if (A.cols() != B.rows())
        throw std::invalid_argument("matmul: shape mismatch");
    Matrix C(A.rows(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t k = 0; k < A.cols(); ++k) {
            const double a = A(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < B.cols(); ++j) C(i, j) += a * B(k, j);
        }
    return C;
}

double spectral_norm(const Matrix& M, int iters) {
    if (M.rows() == 0 || M.cols() == 0) return 0.0;
    Vector v(M.cols(), 1.0 / std::sqrt(static_cast<double>(M.cols())));
    Vector w;
    for (int it = 0; it < iters; ++it) {
        matvec_into(M, v, w);
        matvec_t_into(M, w, v);
        const double n = norm2(v);
        if (n == 0.0) return 0.0;
        for (double& x : v) x /= n;
    }
    matvec_into(M, v, w);
    return norm2(w);
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2_sq(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double norm2(const Vector& v) { return std::sqrt(norm2_sq(v)); }

void axpy(double alpha, const Vector& x, Vector& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void project_into(const Vector& v, std::size_t width, Vector& out) {
    out.assign(width, 0.0);
    const std::size_t n = std::min(width, v.size());
    std::copy(v.begin(), v.begin() + n, out.begin());
}

Vector project(const Vector& v, std::size_t width) {
    Vector out;
    project_into(v, width, out);
    return out;
}

void add_projected(double alpha, const Vector& v, Vector& out) {
    const std::size_t n = std::min(out.size(), v.size());
    for (std::size_t i = 0; i < n; ++i) out[i] += alpha * v[i];
}

}  // namespace taudnn
