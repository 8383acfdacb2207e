#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tcx/bipartite.hpp"
#include "tcx/error.hpp"

namespace tcx {

// Order-N values of the method of reflections: K_{C,N} per actor and
// K_{T,N} per category. Order 0 holds the plain degrees.
template <class T = double>
struct ReflectionsState {
    int order = 0;
    std::vector<T> k_c;
    std::vector<T> k_t;
};

// Orders 0..max_order of
//   K_{C,N} = (1/K_{C,0}) sum_T M_CT K_{T,N-1}
//   K_{T,N} = (1/K_{T,0}) sum_C M_CT K_{C,N-1}
// T only needs construction from int and + and /, so an exact rational
// type works as well as double.
template <class T = double>
std::vector<ReflectionsState<T>> reflect(const SpecializationMatrix& m, int max_order) {
    if (max_order < 1) throw ArgumentError("reflect: max_order must be >= 1");
    if (m.has_isolated_nodes()) throw StructuralError("reflect: zero-degree node in network");

    const auto& kc0 = m.actor_degrees();
    const auto& kt0 = m.category_degrees();
    std::vector<ReflectionsState<T>> states;
    states.reserve(static_cast<std::size_t>(max_order) + 1);

    auto& s0 = states.emplace_back();
    for (int d : kc0) s0.k_c.push_back(T(d));
    for (int d : kt0) s0.k_t.push_back(T(d));

    for (int n = 1; n <= max_order; ++n) {
        const auto& prev = states.back();
        ReflectionsState<T> next;
        next.order = n;
        next.k_c.reserve(kc0.size());
        next.k_t.reserve(kt0.size());
        for (std::size_t a = 0; a < kc0.size(); ++a) {
            T sum(0);
            for (Index t : m.categories_of(a)) sum = sum + prev.k_t[t];
            next.k_c.push_back(sum / T(kc0[a]));
        }
        for (std::size_t t = 0; t < kt0.size(); ++t) {
            T sum(0);
            for (Index a : m.actors_of(t)) sum = sum + prev.k_c[a];
            next.k_t.push_back(sum / T(kt0[t]));
        }
        states.push_back(std::move(next));
    }
    return states;
}

// Category x category matrix sum_C M_CT M_CT' / (K_{C,0} K_{T,0}).
// Row-stochastic by construction.
template <class T = double>
std::vector<std::vector<T>> reduced_matrix(const SpecializationMatrix& m) {
    if (m.has_isolated_nodes()) throw StructuralError("reduced_matrix: zero-degree node in network");
    const std::size_t n = m.category_count();
    std::vector<std::vector<T>> out(n, std::vector<T>(n, T(0)));
    for (std::size_t a = 0; a < m.actor_count(); ++a) {
        const auto cats = m.categories_of(a);
        const T share = T(1) / T(m.actor_degrees()[a]);
        for (Index t : cats) {
            for (Index u : cats) out[t][u] = out[t][u] + share;
        }
    }
    for (std::size_t t = 0; t < n; ++t) {
        const T kt(m.category_degrees()[t]);
        for (auto& v : out[t]) v = v / kt;
    }
    return out;
}

// Actor x actor counterpart: sum_T M_CT M_C'T / (K_{C,0} K_{T,0}).
std::vector<std::vector<double>> actor_reduced_matrix(const SpecializationMatrix& m);

struct Components {
    std::size_t count = 0;
    std::vector<std::size_t> actor_component;
    std::vector<std::size_t> category_component;
};

Components connected_components(const SpecializationMatrix& m);

struct SpectralDiagnostics {
    double eigenvalue1 = std::numeric_limits<double>::quiet_NaN();
    double eigenvalue2 = std::numeric_limits<double>::quiet_NaN();
    // Zero when the network has only two categories.
    double eigenvalue3 = std::numeric_limits<double>::quiet_NaN();
    // eigenvalue2 - eigenvalue3
    double spectral_gap = std::numeric_limits<double>::quiet_NaN();
    // max |M~ v - lambda2 v| / max |v|
    double residual_norm = std::numeric_limits<double>::quiet_NaN();
    std::size_t iterations = 0;
    std::size_t component_count = 0;
    std::string method;     // "jacobi" or "power"
    std::string sign_rule;  // "avg_diversity", "ubiquity" or "first_component"
};

struct ComplexityResult {
    std::vector<std::string> categories;
    std::vector<double> tci;            // mean 0, population stdev 1
    std::vector<double> tci_scaled;     // min 0, max 100
    std::vector<int> ubiquity;          // K_{T,0}
    std::vector<double> avg_diversity;  // K_{T,1}

    std::vector<std::string> actors;
    std::vector<int> diversity;         // K_{C,0}
    std::vector<double> actor_index;    // standardized actor-side vector

    // Nodes outside the analysed component (largest-component mode).
    std::vector<std::string> absent_categories;
    std::vector<std::string> absent_actors;

    SpectralDiagnostics diagnostics;
};

struct TciOptions {
    // Analyse the largest component of a disconnected network instead of
    // refusing it.
    bool largest_component = false;
    // Dense symmetric eigensolve up to this many categories, power
    // iteration with deflation above it.
    std::size_t dense_limit = 512;
    double power_tolerance = 1e-12;
    std::size_t power_max_iterations = 1'000'000;
};

inline constexpr double kDegenerateGap = 1e-10;

// Second eigenvector of the reduced matrix, standardized and oriented so
// that corr(tci, avg_diversity) >= 0 (falling back to -ubiquity, then to a
// positive first component). Throws DisconnectedNetworkError,
// DegenerateSpectrumError or ConvergenceError.
ComplexityResult tci_eigen(const SpecializationMatrix& m, const TciOptions& options = {});

struct ReflectLimitOptions {
    double tolerance = 1e-12;
    std::size_t max_order = 1'000'000;
};

// Even-order reflections K_{T,2n}, deflated against the stationary
// direction and standardized after each step, iterated to a fixed point.
std::vector<double> tci_reflect_limit(const SpecializationMatrix& m,
                                      const ReflectLimitOptions& options = {});

// Affine map with min -> 0 and max -> 100.
std::vector<double> scale_0_100(std::span<const double> scores);

// (x - mean) / population stdev.
std::vector<double> standardize(std::span<const double> x);

}  // namespace tcx
