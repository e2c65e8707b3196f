#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace mda {

// Small dense square matrix, row-major. Dimensions here are tiny (d <= ~8),
// so plain Gaussian elimination is all we need.
struct Mat {
    int n = 0;
    std::vector<double> a;

    Mat() = default;
    explicit Mat(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, 0.0) {}

    static Mat identity(int n_) {
        Mat m(n_);
        for (int i = 0; i < n_; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

inline Mat mat_mul(const Mat& x, const Mat& y) {
    if (x.n != y.n) throw std::invalid_argument("mat_mul: size mismatch");
    Mat z(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int k = 0; k < x.n; ++k) {
            double v = x(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < x.n; ++j) z(i, j) += v * y(k, j);
        }
    return z;
}

inline std::vector<double> mat_vec(const Mat& m, std::span<const double> v) {
    std::vector<double> out(m.n, 0.0);
    for (int i = 0; i < m.n; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.n; ++j) s += m(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

// Determinant by LU with partial pivoting.
inline double mat_det(Mat m) {
    double det = 1.0;
    for (int c = 0; c < m.n; ++c) {
        int piv = c;
        for (int i = c + 1; i < m.n; ++i)
            if (std::fabs(m(i, c)) > std::fabs(m(piv, c))) piv = i;
        if (m(piv, c) == 0.0) return 0.0;
        if (piv != c) {
            for (int j = 0; j < m.n; ++j) std::swap(m(piv, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        for (int i = c + 1; i < m.n; ++i) {
            double f = m(i, c) / m(c, c);
            for (int j = c; j < m.n; ++j) m(i, j) -= f * m(c, j);
        }
    }
    return det;
}

// Solves m x = b; throws on (numerically) singular input.
inline std::vector<double> mat_solve(Mat m, std::vector<double> b) {
    int n = m.n;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int i = c + 1; i < n; ++i)
            if (std::fabs(m(i, c)) > std::fabs(m(piv, c))) piv = i;
        if (m(piv, c) == 0.0) throw std::runtime_error("mat_solve: singular matrix");
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
            std::swap(b[piv], b[c]);
        }
        for (int i = c + 1; i < n; ++i) {
            double f = m(i, c) / m(c, c);
            b[i] -= f * b[c];
            for (int j = c; j < n; ++j) m(i, j) -= f * m(c, j);
        }
    }
    std::vector<double> x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

inline Mat mat_inverse(const Mat& m) {
    Mat inv(m.n);
    for (int c = 0; c < m.n; ++c) {
        std::vector<double> e(m.n, 0.0);
        e[c] = 1.0;
        auto col = mat_solve(m, e);
        for (int i = 0; i < m.n; ++i) inv(i, c) = col[i];
    }
    return inv;
}

} // namespace mda
