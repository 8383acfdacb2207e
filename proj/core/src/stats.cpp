#include "tcx/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tcx/error.hpp"

namespace tcx::stats {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ArgumentError("pearson: length mismatch");
    if (x.size() < 3) throw ArgumentError("pearson: need at least 3 observations");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw ArgumentError("pearson: undefined correlation (constant input)");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> midranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        // Positions i..j (0-based) share rank mean((i+1)..(j+1)).
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = mid;
        i = j + 1;
    }
    return r;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ArgumentError("spearman: length mismatch");
    const auto rx = midranks(x);
    const auto ry = midranks(y);
    return pearson(rx, ry);
}

namespace {

// Two-sided exact p-value. Items are the pooled sample with doubled
// mid-ranks; counts the k-subsets whose doubled rank sum is at least as
// far from its mean as the observed one.
double exact_p_value(const std::vector<long>& doubled_ranks, std::size_t k, long observed_sum) {
    long max_sum = 0;
    {
        auto sorted = doubled_ranks;
        std::sort(sorted.rbegin(), sorted.rend());
        for (std::size_t i = 0; i < k; ++i) max_sum += sorted[i];
    }
    // ways[j][s]: number of j-subsets of the items seen so far with sum s.
    std::vector<std::vector<long double>> ways(k + 1, std::vector<long double>(max_sum + 1, 0.0L));
    ways[0][0] = 1.0L;
    for (const long r : doubled_ranks) {
        for (std::size_t j = k; j >= 1; --j) {
            auto& to = ways[j];
            const auto& from = ways[j - 1];
            for (long s = max_sum; s >= r; --s) {
                if (from[s - r] != 0.0L) to[s] += from[s - r];
            }
        }
    }
    long double total = 0.0L;
    long double extreme = 0.0L;
    // The null mean of the doubled sum is k (N + 1); compare 2*(deviation).
    const long n = static_cast<long>(doubled_ranks.size());
    const long mean2 = static_cast<long>(k) * (n + 1);
    const long dev_obs = std::abs(observed_sum - mean2);
    for (long s = 0; s <= max_sum; ++s) {
        const long double w = ways[k][s];
        if (w == 0.0L) continue;
        total += w;
        if (std::abs(s - mean2) >= dev_obs) extreme += w;
    }
    return static_cast<double>(std::min<long double>(1.0L, extreme / total));
}

}  // namespace

UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ArgumentError("mann_whitney_u: empty sample");
    const std::size_t n1 = a.size();
    const std::size_t n2 = b.size();
    const std::size_t n = n1 + n2;

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = midranks(pooled);

    double r1 = 0.0;
    for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
    const double d1 = static_cast<double>(n1);
    const double d2 = static_cast<double>(n2);
    const double prod = d1 * d2;

    UTestResult res;
    res.n1 = n1;
    res.n2 = n2;
    res.u = r1 - d1 * (d1 + 1.0) / 2.0;
    res.effect_gamma = 1.0 - 2.0 * res.u / prod;

    if (std::min(n1, n2) < kExactSampleLimit && n <= kExactPooledLimit) {
        std::vector<long> doubled(n);
        for (std::size_t i = 0; i < n; ++i) doubled[i] = std::lround(2.0 * ranks[i]);
        // Enumerate over the smaller sample.
        const bool first_small = n1 <= n2;
        const std::size_t k = first_small ? n1 : n2;
        long observed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if ((i < n1) == first_small) observed += doubled[i];
        }
        res.p_two_sided = exact_p_value(doubled, k, observed);
        res.exact = true;
        return res;
    }

    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double dn = static_cast<double>(n);
    const double variance = prod / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (!(variance > 0.0)) {
        res.p_two_sided = 1.0;
        return res;
    }
    const double z = std::max(0.0, std::abs(res.u - prod / 2.0) - 0.5) / std::sqrt(variance);
    res.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return res;
}

std::map<std::string, int> rank(const std::map<std::string, double>& scores, bool descending) {
    std::vector<double> distinct;
    distinct.reserve(scores.size());
    for (const auto& [key, v] : scores) distinct.push_back(v);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (descending) std::reverse(distinct.begin(), distinct.end());

    std::map<std::string, int> out;
    for (const auto& [key, v] : scores) {
        const auto it = descending
            ? std::lower_bound(distinct.begin(), distinct.end(), v, std::greater<>())
            : std::lower_bound(distinct.begin(), distinct.end(), v);
        out.emplace(key, static_cast<int>(it - distinct.begin()) + 1);
    }
    return out;
}

}  // namespace tcx::stats
