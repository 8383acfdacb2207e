#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace tcx::linalg {

using Dense = std::vector<std::vector<double>>;

struct SymmetricEigen {
    // Descending.
    std::vector<double> values;
    // vectors[k] is the unit eigenvector of values[k].
    std::vector<std::vector<double>> vectors;
    std::size_t sweeps = 0;
};

// Cyclic Jacobi rotations on a symmetric matrix. Stops once the
// off-diagonal Frobenius norm drops below tolerance * ||A||_F.
SymmetricEigen jacobi_eigen(Dense a, double tolerance = 1e-15, std::size_t max_sweeps = 100);

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct PowerResult {
    double value = 0.0;
    std::vector<double> vector;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

// Dominant eigenpair of a symmetric positive semidefinite operator on the
// orthogonal complement of `deflate` (orthonormal vectors). Start vector
// is drawn from a seeded generator, so results are reproducible.
PowerResult power_iteration(const LinearOperator& apply, std::size_t n,
                            std::span<const std::vector<double>> deflate, double tolerance,
                            std::size_t max_iterations, std::uint64_t seed = 0x5eed);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

}  // namespace tcx::linalg
