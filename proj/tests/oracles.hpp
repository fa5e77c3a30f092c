#pragma once

// Reference computations used only by the tests. They are written to be
// obviously correct rather than fast, and share no code with the library.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Composite trapezoid rule on [a, b] with `n` panels.
inline long double trapezoid(const std::function<long double(long double)>& f, long double a, long double b,
                             long n) {
    const long double h = (b - a) / static_cast<long double>(n);
    long double sum = 0.5L * (f(a) + f(b));
    for (long i = 1; i < n; ++i) sum += f(a + h * static_cast<long double>(i));
    return sum * h;
}

/// Trapezoid with Richardson extrapolation from n and 2n panels.
inline long double trapezoid_richardson(const std::function<long double(long double)>& f, long double a,
                                        long double b, long n) {
    const long double coarse = trapezoid(f, a, b, n);
    const long double fine = trapezoid(f, a, b, 2 * n);
    return fine + (fine - coarse) / 3.0L;
}

using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

/// Least-squares coefficients via an SVD pseudo-inverse in long double.
inline std::vector<double> pinv_solve(const std::vector<std::vector<double>>& rows, const std::vector<double>& y) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto p = static_cast<Eigen::Index>(rows.front().size());
    MatL A(n, p);
    VecL b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) A(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        b(i) = y[static_cast<std::size_t>(i)];
    }
    Eigen::JacobiSVD<MatL> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    VecL inv_s(s.size());
    const long double cut = s(0) * 1e-15L * static_cast<long double>(std::max(n, p));
    for (Eigen::Index i = 0; i < s.size(); ++i) inv_s(i) = s(i) > cut ? 1.0L / s(i) : 0.0L;
    const VecL coef = svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().transpose() * b;
    std::vector<double> out(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) out[static_cast<std::size_t>(j)] = static_cast<double>(coef(j));
    return out;
}

/// Polynomial design [1, x, ..., x^k].
inline std::vector<double> poly_oracle(const std::vector<double>& x, const std::vector<double>& y, int k) {
    std::vector<std::vector<double>> rows;
    for (double v : x) {
        std::vector<double> r;
        double p = 1.0;
        for (int j = 0; j <= k; ++j, p *= v) r.push_back(p);
        rows.push_back(r);
    }
    return pinv_solve(rows, y);
}

/// Monomial design [x^n, 1]; returns (a, b).
inline std::vector<double> mon_oracle(const std::vector<double>& x, const std::vector<double>& y, int n) {
    std::vector<std::vector<double>> rows;
    for (double v : x) rows.push_back({std::pow(v, n), 1.0});
    return pinv_solve(rows, y);
}

/// Unnormalised product Gaussian kernel density at every point, O(n^2).
inline std::vector<double> brute_density(const std::vector<double>& x, const std::vector<double>& y, double hx,
                                         double hy) {
    std::vector<double> d(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        long double s = 0.0L;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const long double u = (x[i] - x[j]) / hx, v = (y[i] - y[j]) / hy;
            s += std::exp(-0.5L * (u * u + v * v));
        }
        d[i] = static_cast<double>(s);
    }
    return d;
}

}  // namespace oracle
