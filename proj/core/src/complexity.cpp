#include "tcx/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "tcx/linalg.hpp"

namespace tcx {

namespace {

// y = M~ x, i.e. two reflection half-steps.
void apply_reduced(const SpecializationMatrix& m, std::span<const double> x, std::span<double> y) {
    const auto& kc = m.actor_degrees();
    const auto& kt = m.category_degrees();
    std::vector<double> actor_mean(m.actor_count());
    for (std::size_t a = 0; a < m.actor_count(); ++a) {
        double s = 0.0;
        for (Index t : m.categories_of(a)) s += x[t];
        actor_mean[a] = s / kc[a];
    }
    for (std::size_t t = 0; t < m.category_count(); ++t) {
        double s = 0.0;
        for (Index a : m.actors_of(t)) s += actor_mean[a];
        y[t] = s / kt[t];
    }
}

// Pearson correlation, 0 when either side is constant.
double safe_corr(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

constexpr double kSignEpsilon = 1e-6;

// Flips `score` in place so the orientation rule holds; returns the rule used.
std::string orient(std::vector<double>& score, std::span<const double> avg_diversity,
                   std::span<const int> ubiquity) {
    auto flip = [&] {
        for (auto& s : score) s = -s;
    };
    const double r1 = safe_corr(score, avg_diversity);
    if (std::abs(r1) > kSignEpsilon) {
        if (r1 < 0.0) flip();
        return "avg_diversity";
    }
    std::vector<double> neg_ubiquity(ubiquity.size());
    for (std::size_t i = 0; i < ubiquity.size(); ++i) neg_ubiquity[i] = -ubiquity[i];
    const double r2 = safe_corr(score, neg_ubiquity);
    if (std::abs(r2) > kSignEpsilon) {
        if (r2 < 0.0) flip();
        return "ubiquity";
    }
    for (double s : score) {
        if (std::abs(s) > 1e-12) {
            if (s < 0.0) flip();
            break;
        }
    }
    return "first_component";
}

std::vector<double> as_double(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace

std::vector<std::vector<double>> actor_reduced_matrix(const SpecializationMatrix& m) {
    if (m.has_isolated_nodes()) throw StructuralError("actor_reduced_matrix: zero-degree node");
    const std::size_t n = m.actor_count();
    std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
    for (std::size_t t = 0; t < m.category_count(); ++t) {
        const auto actors = m.actors_of(t);
        const double share = 1.0 / m.category_degrees()[t];
        for (Index a : actors) {
            for (Index b : actors) out[a][b] += share;
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (auto& v : out[a]) v /= m.actor_degrees()[a];
    }
    return out;
}

Components connected_components(const SpecializationMatrix& m) {
    constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
    Components c;
    c.actor_component.assign(m.actor_count(), kUnseen);
    c.category_component.assign(m.category_count(), kUnseen);

    // Node ids: categories 0..T-1, actors T..T+A-1.
    const std::size_t nt = m.category_count();
    std::vector<std::size_t> stack;
    auto visit = [&](std::size_t start) {
        const std::size_t id = c.count++;
        stack.assign(1, start);
        if (start < nt) c.category_component[start] = id;
        else c.actor_component[start - nt] = id;
        while (!stack.empty()) {
            const std::size_t node = stack.back();
            stack.pop_back();
            if (node < nt) {
                for (Index a : m.actors_of(node)) {
                    if (c.actor_component[a] == kUnseen) {
                        c.actor_component[a] = id;
                        stack.push_back(nt + a);
                    }
                }
            } else {
                for (Index t : m.categories_of(node - nt)) {
                    if (c.category_component[t] == kUnseen) {
                        c.category_component[t] = id;
                        stack.push_back(t);
                    }
                }
            }
        }
    };
    for (std::size_t t = 0; t < nt; ++t) {
        if (c.category_component[t] == kUnseen) visit(t);
    }
    for (std::size_t a = 0; a < m.actor_count(); ++a) {
        if (c.actor_component[a] == kUnseen) visit(nt + a);
    }
    return c;
}

std::vector<double> standardize(std::span<const double> x) {
    if (x.empty()) throw ArgumentError("standardize: empty vector");
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / n);
    if (!(sd > 0.0)) throw ArgumentError("standardize: constant vector");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) / sd;
    return out;
}

std::vector<double> scale_0_100(std::span<const double> scores) {
    if (scores.empty()) throw ArgumentError("scale_0_100: empty vector");
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    const double min = *lo;
    const double range = *hi - min;
    if (!(range > 0.0)) throw ArgumentError("scale_0_100: needs at least two distinct values");
    std::vector<double> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - min) / range * 100.0;
    return out;
}

ComplexityResult tci_eigen(const SpecializationMatrix& input, const TciOptions& options) {
    if (input.has_isolated_nodes()) throw StructuralError("tci_eigen: zero-degree node in network");
    if (input.category_count() == 0) throw EmptyNetworkError("tci_eigen: empty network");

    ComplexityResult res;
    const auto comps = connected_components(input);
    res.diagnostics.component_count = comps.count;

    SpecializationMatrix sub;
    const SpecializationMatrix* net = &input;
    if (comps.count > 1) {
        std::vector<std::size_t> cats(comps.count, 0), acts(comps.count, 0);
        for (auto id : comps.category_component) ++cats[id];
        for (auto id : comps.actor_component) ++acts[id];
        if (!options.largest_component) {
            std::ostringstream msg;
            msg << "network is disconnected: " << comps.count << " components (categories/actors:";
            for (std::size_t i = 0; i < comps.count; ++i) msg << ' ' << cats[i] << '/' << acts[i];
            msg << ")";
            throw DisconnectedNetworkError(msg.str(), comps.count);
        }
        // Most categories, then most actors, then lowest id.
        std::size_t best = 0;
        for (std::size_t i = 1; i < comps.count; ++i) {
            if (cats[i] > cats[best] || (cats[i] == cats[best] && acts[i] > acts[best])) best = i;
        }
        std::vector<Index> keep_a, keep_c;
        for (std::size_t a = 0; a < input.actor_count(); ++a) {
            if (comps.actor_component[a] == best) keep_a.push_back(static_cast<Index>(a));
            else res.absent_actors.push_back(input.actors()[a]);
        }
        for (std::size_t t = 0; t < input.category_count(); ++t) {
            if (comps.category_component[t] == best) keep_c.push_back(static_cast<Index>(t));
            else res.absent_categories.push_back(input.categories()[t]);
        }
        sub = input.subgraph(keep_a, keep_c);
        net = &sub;
    }

    const std::size_t n = net->category_count();
    if (n < 2) throw DegenerateSpectrumError("tci_eigen: fewer than two categories in network");
    const auto& kt = net->category_degrees();
    const auto& kc = net->actor_degrees();

    std::vector<double> sqrt_kt(n);
    for (std::size_t t = 0; t < n; ++t) sqrt_kt[t] = std::sqrt(static_cast<double>(kt[t]));

    auto& diag = res.diagnostics;
    std::vector<double> u2;
    if (n <= options.dense_limit) {
        // S = D^-1/2 A D^-1/2 with A_tu = sum_C M_Ct M_Cu / K_C; similar to M~.
        linalg::Dense s(n, std::vector<double>(n, 0.0));
        for (std::size_t a = 0; a < net->actor_count(); ++a) {
            const auto cats = net->categories_of(a);
            const double share = 1.0 / kc[a];
            for (Index t : cats) {
                for (Index u : cats) s[t][u] += share;
            }
        }
        for (std::size_t t = 0; t < n; ++t) {
            for (std::size_t u = 0; u < n; ++u) s[t][u] /= sqrt_kt[t] * sqrt_kt[u];
        }
        auto eig = linalg::jacobi_eigen(std::move(s));
        diag.method = "jacobi";
        diag.iterations = eig.sweeps;
        diag.eigenvalue1 = eig.values[0];
        diag.eigenvalue2 = eig.values[1];
        diag.eigenvalue3 = n >= 3 ? eig.values[2] : 0.0;
        u2 = std::move(eig.vectors[1]);
    } else {
        // S x = D^-1/2 M~ D^1/2 x, applied sparsely.
        std::vector<double> tmp(n);
        const linalg::LinearOperator apply = [&](std::span<const double> x, std::span<double> y) {
            for (std::size_t t = 0; t < n; ++t) tmp[t] = x[t] / sqrt_kt[t];
            apply_reduced(*net, tmp, y);
            for (std::size_t t = 0; t < n; ++t) y[t] *= sqrt_kt[t];
        };
        std::vector<std::vector<double>> deflate(1, sqrt_kt);
        const double nrm = linalg::norm(sqrt_kt);
        for (auto& v : deflate[0]) v /= nrm;

        auto second = linalg::power_iteration(apply, n, deflate, options.power_tolerance,
                                              options.power_max_iterations);
        if (!second.converged) {
            throw ConvergenceError("power iteration for the second eigenvector did not converge",
                                   second.residual);
        }
        deflate.push_back(second.vector);
        auto third = linalg::power_iteration(apply, n, deflate, options.power_tolerance,
                                             options.power_max_iterations);
        if (!third.converged) {
            throw ConvergenceError("power iteration for the third eigenvalue did not converge",
                                   third.residual);
        }
        diag.method = "power";
        diag.iterations = second.iterations + third.iterations;
        diag.eigenvalue1 = 1.0;
        diag.eigenvalue2 = second.value;
        diag.eigenvalue3 = third.value;
        u2 = std::move(second.vector);
    }
    diag.spectral_gap = diag.eigenvalue2 - diag.eigenvalue3;

    if (std::abs(diag.eigenvalue1 - diag.eigenvalue2) < kDegenerateGap) {
        throw DegenerateSpectrumError("leading eigenvalue of the reduced matrix is repeated");
    }
    if (std::abs(diag.spectral_gap) < kDegenerateGap) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "degenerate spectrum: |lambda2 - lambda3| = " << std::abs(diag.spectral_gap);
        throw DegenerateSpectrumError(msg.str());
    }

    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) v[t] = u2[t] / sqrt_kt[t];

    std::vector<double> mv(n);
    apply_reduced(*net, v, mv);
    double resid = 0.0, vmax = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        resid = std::max(resid, std::abs(mv[t] - diag.eigenvalue2 * v[t]));
        vmax = std::max(vmax, std::abs(v[t]));
    }
    diag.residual_norm = resid / vmax;

    const auto states = reflect<double>(*net, 1);
    res.categories = net->categories();
    res.ubiquity = kt;
    res.avg_diversity = states[1].k_t;
    res.tci = standardize(v);
    diag.sign_rule = orient(res.tci, res.avg_diversity, res.ubiquity);
    res.tci_scaled = scale_0_100(res.tci);

    // Actor side: one reflection of the oriented category vector is the
    // second eigenvector of the actor-reduced matrix (same eigenvalue).
    res.actors = net->actors();
    res.diversity = kc;
    std::vector<double> actor_vec(net->actor_count());
    for (std::size_t a = 0; a < net->actor_count(); ++a) {
        double s = 0.0;
        for (Index t : net->categories_of(a)) s += res.tci[t];
        actor_vec[a] = s / kc[a];
    }
    res.actor_index = net->actor_count() > 1 ? standardize(actor_vec)
                                             : std::vector<double>(net->actor_count(), 0.0);
    return res;
}

std::vector<double> tci_reflect_limit(const SpecializationMatrix& m, const ReflectLimitOptions& options) {
    if (m.has_isolated_nodes()) throw StructuralError("tci_reflect_limit: zero-degree node in network");
    if (!(options.tolerance > 0.0)) throw ArgumentError("tci_reflect_limit: tolerance must be > 0");
    const auto comps = connected_components(m);
    if (comps.count > 1) {
        throw DisconnectedNetworkError("tci_reflect_limit: network is disconnected", comps.count);
    }
    const std::size_t n = m.category_count();
    if (n < 2) throw DegenerateSpectrumError("tci_reflect_limit: fewer than two categories");

    const auto& kt = m.category_degrees();
    const double pi_total = std::accumulate(kt.begin(), kt.end(), 0.0);

    // Removes the stationary component: x -= (pi.x / pi.1) 1, pi = K_{T,0}.
    auto deflate = [&](std::vector<double>& x) {
        double c = 0.0;
        for (std::size_t t = 0; t < n; ++t) c += kt[t] * x[t];
        c /= pi_total;
        for (auto& xi : x) xi -= c;
    };
    auto spread = [](const std::vector<double>& x) {
        const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        return std::sqrt(ss / static_cast<double>(x.size()));
    };

    // K_{T,0} is the natural start; regular ubiquity makes it collinear
    // with the stationary vector, so fall back to a seeded start.
    std::vector<double> x = as_double(kt);
    deflate(x);
    if (spread(x) < 1e-12) {
        std::mt19937_64 rng(0x5eed);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (auto& xi : x) xi = unif(rng);
        deflate(x);
    }
    x = standardize(x);

    std::vector<double> y(n);
    double diff = std::numeric_limits<double>::infinity();
    std::size_t order = 0;
    // Iterates x to a fixed point; false when max_order runs out.
    auto converge = [&] {
        while (order < options.max_order) {
            ++order;
            apply_reduced(m, x, y);
            deflate(y);
            if (spread(y) < 1e-13) {
                throw DegenerateSpectrumError(
                    "tci_reflect_limit: reflections vanish after deflation (rank-one structure)");
            }
            auto next = standardize(y);
            diff = 0.0;
            for (std::size_t t = 0; t < n; ++t) diff = std::max(diff, std::abs(next[t] - x[t]));
            x = std::move(next);
            if (diff < options.tolerance) return true;
        }
        return false;
    };

    if (converge()) {
        // K_{T,0} can have no component along the second eigenvector (it
        // happens on small symmetric-looking networks), which leaves the
        // iteration on a later, unstable eigenvector. Kick it with a seeded
        // perturbation and iterate again; a stable limit comes back.
        std::mt19937_64 rng(0x7e5eed);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        std::vector<double> kick(n);
        for (auto& k : kick) k = unif(rng);
        deflate(kick);
        const auto dir = standardize(kick);
        for (std::size_t t = 0; t < n; ++t) x[t] += 1e-3 * dir[t];
        deflate(x);
        x = standardize(x);
        if (converge()) {
            const auto states = reflect<double>(m, 1);
            orient(x, states[1].k_t, kt);
            return x;
        }
    }
    throw ConvergenceError("tci_reflect_limit: no convergence within max_order", diff);
}

}  // namespace tcx
