#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace tcx::stats {

// Product-moment correlation. Requires equal lengths >= 3 and
// non-constant inputs (ArgumentError otherwise).
double pearson(std::span<const double> x, std::span<const double> y);

// Pearson correlation of mid-ranks.
double spearman(std::span<const double> x, std::span<const double> y);

// 1-based ranks, ties share the mean of the positions they span.
std::vector<double> midranks(std::span<const double> x);

struct UTestResult {
    double u = 0.0;            // U of the first sample: #(a > b) + #(a == b) / 2
    double p_two_sided = 1.0;
    double effect_gamma = 0.0; // rank-biserial, 1 - 2U / (n1 n2)
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    bool exact = false;        // permutation distribution instead of normal
};

// Smaller samples than this use the exact permutation distribution.
inline constexpr std::size_t kExactSampleLimit = 8;
// ... as long as the pooled size keeps the enumeration tractable.
inline constexpr std::size_t kExactPooledLimit = 1000;

// Mann-Whitney U with mid-ranks for ties. The normal approximation
// carries tie and continuity corrections.
UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Dense ranks (1, 2, 3, ... with ties sharing a rank), highest score
// first when `descending`.
std::map<std::string, int> rank(const std::map<std::string, double>& scores, bool descending = true);

}  // namespace tcx::stats
