#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tcx/error.hpp"
#include "tcx/linalg.hpp"

namespace tcx::linalg {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

SymmetricEigen jacobi_eigen(Dense a, double tolerance, std::size_t max_sweeps) {
    const std::size_t n = a.size();
    for (const auto& row : a) {
        if (row.size() != n) throw ArgumentError("jacobi_eigen: matrix is not square");
    }
    Dense v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

    double fro = 0.0;
    for (const auto& row : a) {
        for (double x : row) fro += x * x;
    }
    const double target = tolerance * tolerance * fro;

    auto off_diagonal = [&] {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * a[p][q] * a[p][q];
        }
        return s;
    };

    std::size_t sweep = 0;
    while (sweep < max_sweeps) {
        const double off = off_diagonal();
        if (off <= target || off == 0.0) break;
        ++sweep;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p][q];
                if (apq == 0.0) continue;
                const double app = a[p][p];
                const double aqq = a[q][q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = a[p][k] = c * akp - s * akq;
                    a[k][q] = a[q][k] = s * akp + c * akq;
                }
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = a[q][p] = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p];
                    const double vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if (sweep == max_sweeps && off_diagonal() > target) {
        throw ConvergenceError("Jacobi eigensolver did not converge", std::sqrt(off_diagonal()));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Stable on equal eigenvalues so output does not depend on sort internals.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });

    SymmetricEigen out;
    out.sweeps = sweep;
    for (std::size_t k : order) {
        out.values.push_back(a[k][k]);
        std::vector<double> vec(n);
        for (std::size_t i = 0; i < n; ++i) vec[i] = v[i][k];
        out.vectors.push_back(std::move(vec));
    }
    return out;
}

PowerResult power_iteration(const LinearOperator& apply, std::size_t n,
                            std::span<const std::vector<double>> deflate, double tolerance,
                            std::size_t max_iterations, std::uint64_t seed) {
    auto project = [&](std::vector<double>& x) {
        for (const auto& d : deflate) {
            const double c = dot(x, d);
            for (std::size_t i = 0; i < n; ++i) x[i] -= c * d[i];
        }
    };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> x(n);
    for (auto& xi : x) xi = unif(rng);
    project(x);
    double nx = norm(x);
    if (nx == 0.0) throw DegenerateSpectrumError("power iteration: deflated space is empty");
    for (auto& xi : x) xi /= nx;

    PowerResult res;
    std::vector<double> y(n);
    for (std::size_t it = 1; it <= max_iterations; ++it) {
        apply(x, y);
        project(y);
        const double lambda = dot(x, y);
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) r += (y[i] - lambda * x[i]) * (y[i] - lambda * x[i]);
        res.value = lambda;
        res.residual = std::sqrt(r);
        res.iterations = it;
        const double ny = norm(y);
        if (ny == 0.0) {
            // Operator annihilates the complement: the next eigenvalue is 0.
            res.value = 0.0;
            res.residual = 0.0;
            res.vector = x;
            res.converged = true;
            return res;
        }
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
        if (res.residual <= tolerance) {
            res.converged = true;
            break;
        }
    }
    res.vector = x;
    return res;
}

}  // namespace tcx::linalg
