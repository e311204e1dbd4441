#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace polarface {

/// Dense row-major matrix of doubles. Just enough linear algebra for the
/// snapshot eigendecomposition and the perceptron; nothing clever.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    bool operator==(const Mat& other) const = default;
};

/// Eigendecomposition of a symmetric matrix: values sorted non-increasing,
/// column k of `vectors` is the eigenvector for values[k].
struct SymmetricEigen {
    std::vector<double> values;
    Mat vectors;
};

/// Cyclic Jacobi rotations. Suitable for the small symmetric positive
/// semidefinite matrices this library produces (up to a few thousand rows);
/// fully deterministic sweep order.
inline SymmetricEigen jacobi_eigendecompose(Mat a, std::size_t max_sweeps = 100) {
    if (a.rows != a.cols) throw std::invalid_argument("jacobi_eigendecompose: matrix not square");
    const std::size_t n = a.rows;
    Mat v = Mat::identity(n);

    if (n > 1) {
        double frob2 = 0.0;
        for (double x : a.data) frob2 += x * x;
        const double stop = frob2 * 1e-28;  // (1e-14 * ||A||_F)^2

        for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
            double off2 = 0.0;
            for (std::size_t p = 0; p + 1 < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q) off2 += 2.0 * a(p, q) * a(p, q);
            if (off2 <= stop) break;

            for (std::size_t p = 0; p + 1 < n; ++p) {
                for (std::size_t q = p + 1; q < n; ++q) {
                    const double apq = a(p, q);
                    if (apq == 0.0) continue;
                    const double app = a(p, p);
                    const double aqq = a(q, q);
                    const double theta = (aqq - app) / (2.0 * apq);
                    double t;
                    if (std::abs(theta) > 1e150) {
                        t = 1.0 / (2.0 * theta);  // avoid theta^2 overflow
                    } else {
                        t = (theta >= 0.0 ? 1.0 : -1.0) /
                            (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    }
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;

                    a(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                    a(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        if (i == p || i == q) continue;
                        const double aip = a(i, p);
                        const double aiq = a(i, q);
                        a(i, p) = c * aip - s * aiq;
                        a(p, i) = a(i, p);
                        a(i, q) = s * aip + c * aiq;
                        a(q, i) = a(i, q);
                    }
                    for (std::size_t i = 0; i < n; ++i) {
                        const double vip = v(i, p);
                        const double viq = v(i, q);
                        v(i, p) = c * vip - s * viq;
                        v(i, q) = s * vip + c * viq;
                    }
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Mat(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace polarface
