#include "tcx/workbench.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "tcx/error.hpp"
#include "tcx/io.hpp"

namespace tcx {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string config_fingerprint(const PipelineConfig& c) {
    std::ostringstream s;
    s.precision(17);
    s << "share=" << c.share << ";rank_by=" << (c.rank_by == RankBy::Weight ? "weight" : "count")
      << ";threshold=" << c.threshold << ";largest=" << c.tci.largest_component
      << ";dense_limit=" << c.tci.dense_limit;
    return s.str();
}

}  // namespace

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

AnalysisKey key_for(Window window, Scheme scheme, Level level) {
    return {window.label(), std::string(to_string(scheme)), std::string(to_string(level))};
}

ComplexityResult compute_from_weights(const WeightMatrix& w, const PipelineConfig& config,
                                      SpecializationMatrix* network_out) {
    if (w.actors.empty() || w.categories.empty()) throw EmptyNetworkError("empty weight matrix");
    const auto rta = compute_rta(w);
    auto m = binarize(rta, config.threshold);
    auto result = tci_eigen(m, config.tci);
    if (network_out != nullptr) *network_out = std::move(m);
    return result;
}

WeightsRun build_weights(std::span<const PatentRecord> mapped, const Concordance& scheme, Level level,
                         Window window, const PipelineConfig& config, const std::string& home_region) {
    if (mapped.empty()) throw EmptyNetworkError("no mapped records in window " + window.label());
    WeightsRun run;
    AllocationOptions opts;
    opts.window = window;
    const auto corporate = allocate_weights(mapped, scheme, Level::Corporate, opts);
    run.allocated_weight = corporate.total_weight();
    run.filter = filter_top_share(corporate, config.share, config.rank_by);

    std::unordered_set<std::string> retained(run.filter.matrix.actors.begin(), run.filter.matrix.actors.end());
    if (!home_region.empty()) {
        const auto home = actor_home_regions(mapped);
        std::erase_if(retained, [&](const std::string& a) {
            const auto it = home.find(a);
            return it == home.end() || it->second != home_region;
        });
        if (retained.empty()) {
            throw EmptyNetworkError("region '" + home_region + "': no retained corporations");
        }
    }

    if (level == Level::Corporate) {
        run.weights = home_region.empty() ? run.filter.matrix : restrict_actors(run.filter.matrix, retained);
    } else {
        opts.retained_actors = &retained;
        run.weights = allocate_weights(mapped, scheme, Level::Regional, opts);
        if (run.weights.actors.empty()) {
            throw EmptyNetworkError("no records with a known region in window " + window.label());
        }
    }
    return run;
}

PipelineRun run_pipeline(std::span<const PatentRecord> records, const Concordance& scheme, Level level,
                         Window window, const PipelineConfig& config) {
    PipelineRun run;
    auto in_window = window_records(records, window);
    run.records_in = in_window.size();
    auto classified = classify_records(std::move(in_window), scheme);
    run.unmapped = classified.rejects.size();
    auto built = build_weights(classified.mapped, scheme, level, window, config);
    run.filter = std::move(built.filter);
    run.weights = std::move(built.weights);
    run.result = compute_from_weights(run.weights, config, &run.network);
    return run;
}

// ---------------------------------------------------------------------------

SchemeBridge derive_bridge(std::span<const PatentRecord> records, const Concordance& fine,
                           const Concordance& coarse) {
    std::map<std::string, std::map<std::string, std::size_t>> votes;
    for (const auto& r : records) {
        const auto f = map_classification(r, fine);
        const auto c = map_classification(r, coarse);
        if (f && c) ++votes[*f][*c];
    }
    SchemeBridge bridge;
    for (const auto& [f, counts] : votes) {
        const std::string* best = nullptr;
        std::size_t best_n = 0;
        for (const auto& [c, n] : counts) {
            if (n > best_n) {
                best = &c;
                best_n = n;
            }
        }
        bridge.emplace(f, *best);
    }
    return bridge;
}

SchemeBridge identity_bridge(std::span<const std::string> categories) {
    SchemeBridge b;
    for (const auto& c : categories) b.emplace(c, c);
    return b;
}

std::map<std::string, std::string> sector_map(const Concordance& scheme,
                                              std::span<const std::string> categories,
                                              const SchemeBridge* bridge, const Concordance* coarse) {
    std::map<std::string, std::string> out;
    for (const auto& c : categories) {
        std::string sector;
        if (scheme.scheme() == Scheme::Ipc3 && bridge != nullptr && coarse != nullptr) {
            if (const auto it = bridge->find(c); it != bridge->end()) sector = coarse->sector_of(it->second);
        }
        if (sector.empty()) sector = scheme.sector_of(c);
        out.emplace(c, sector.empty() ? "unassigned" : sector);
    }
    return out;
}

AnalysisTable correlation_panel(const ComplexityResult& result,
                                const std::map<std::string, std::string>& sectors, const AnalysisKey& key) {
    AnalysisTable table;
    const std::size_t n = result.categories.size();
    std::vector<double> ubiquity(result.ubiquity.begin(), result.ubiquity.end());

    std::map<std::string, std::vector<std::size_t>> by_sector;
    for (std::size_t t = 0; t < n; ++t) {
        const auto it = sectors.find(result.categories[t]);
        const std::string sector = it == sectors.end() ? "unassigned" : it->second;
        by_sector[sector].push_back(t);
        table.add(key, result.categories[t], "ubiquity", ubiquity[t], std::nullopt, sector);
        table.add(key, result.categories[t], "avg_diversity", result.avg_diversity[t], std::nullopt, sector);
        table.add(key, result.categories[t], "tci", result.tci[t], std::nullopt, sector);
    }

    auto correlations = [&](const std::string& label, const std::vector<std::size_t>& idx) {
        const std::pair<const char*, std::pair<const std::vector<double>*, const std::vector<double>*>> pairs[] = {
            {"r_ubiquity_avg_diversity", {&ubiquity, &result.avg_diversity}},
            {"r_ubiquity_tci", {&ubiquity, &result.tci}},
            {"r_tci_avg_diversity", {&result.tci, &result.avg_diversity}},
        };
        for (const auto& [metric, xy] : pairs) {
            if (idx.size() < 3) {
                table.add(key, label, metric, kNaN, std::nullopt, "omitted: fewer than 3 categories");
                continue;
            }
            std::vector<double> x, y;
            for (auto t : idx) {
                x.push_back((*xy.first)[t]);
                y.push_back((*xy.second)[t]);
            }
            try {
                table.add(key, label, metric, stats::pearson(x, y));
            } catch (const ArgumentError&) {
                table.add(key, label, metric, kNaN, std::nullopt, "omitted: constant input");
            }
        }
    };

    std::vector<std::size_t> all(n);
    for (std::size_t t = 0; t < n; ++t) all[t] = t;
    correlations("*", all);
    for (const auto& [sector, idx] : by_sector) correlations("sector:" + sector, idx);

    double mean_u = 0.0, mean_d = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        mean_u += ubiquity[t];
        mean_d += result.avg_diversity[t];
    }
    table.add(key, "*", "mean_ubiquity", mean_u / n);
    table.add(key, "*", "mean_avg_diversity", mean_d / n);
    table.add(key, "*", "tci_zero", 0.0);
    return table;
}

ConsistencyOutput consistency_compare(const ComplexityResult& fine, const ComplexityResult& coarse,
                                      const SchemeBridge& bridge, const AnalysisKey& key) {
    ConsistencyOutput out;
    const auto fine_scaled = scale_0_100(fine.tci);
    const auto coarse_scaled = scale_0_100(coarse.tci);
    std::map<std::string, double> coarse_by_id;
    for (std::size_t t = 0; t < coarse.categories.size(); ++t) {
        coarse_by_id.emplace(coarse.categories[t], coarse_scaled[t]);
        if (coarse_scaled[t] >= 75.0) ++out.coarse_in_band;
    }

    for (std::size_t t = 0; t < fine.categories.size(); ++t) {
        const auto& id = fine.categories[t];
        if (fine_scaled[t] >= 75.0) ++out.fine_in_band;
        out.table.add(key, id, "fine_tci_scaled", fine_scaled[t]);
        const auto b = bridge.find(id);
        const auto c = b == bridge.end() ? coarse_by_id.end() : coarse_by_id.find(b->second);
        if (c == coarse_by_id.end()) {
            out.uncomparable.push_back(id);
            out.table.add(key, id, "residual", kNaN, std::nullopt, "uncomparable");
            continue;
        }
        const double residual = std::abs(fine_scaled[t] - c->second);
        out.fine_categories.push_back(id);
        out.residuals.push_back(residual);
        out.table.add(key, id, "residual", residual, std::nullopt, c->first);
    }
    for (const auto& [id, v] : coarse_by_id) out.table.add(key, "coarse:" + id, "tci_scaled", v);
    out.table.add(key, "*", "coarse_band_75_100", static_cast<double>(out.coarse_in_band));
    out.table.add(key, "*", "fine_band_75_100", static_cast<double>(out.fine_in_band));
    return out;
}

ConsistencyReport consistency_analysis(std::span<const PatentRecord> records, const Concordance& fine,
                                       const Concordance& coarse, Window window,
                                       const PipelineConfig& config) {
    ConsistencyReport rep;
    const auto in_window = window_records(records, window);
    const auto bridge = derive_bridge(in_window, fine, coarse);
    const std::string scheme_label =
        std::string(to_string(fine.scheme())) + "~" + std::string(to_string(coarse.scheme()));

    for (Level level : {Level::Corporate, Level::Regional}) {
        const auto f = run_pipeline(in_window, fine, level, window, config);
        const auto c = run_pipeline(in_window, coarse, level, window, config);
        const AnalysisKey key{window.label(), scheme_label, std::string(to_string(level))};
        auto out = consistency_compare(f.result, c.result, bridge, key);
        rep.table.append(out.table);
        (level == Level::Corporate ? rep.corporate : rep.regional) = std::move(out);
    }

    const AnalysisKey both{window.label(), scheme_label, "both"};
    if (rep.corporate.residuals.empty() || rep.regional.residuals.empty()) {
        rep.table.add(both, "*", "mwu_u_corporate_first", kNaN, std::nullopt, "omitted: no residuals");
        return rep;
    }
    rep.corporate_first = stats::mann_whitney_u(rep.corporate.residuals, rep.regional.residuals);
    rep.regional_first = stats::mann_whitney_u(rep.regional.residuals, rep.corporate.residuals);
    const std::string method = rep.corporate_first.exact ? "exact" : "normal approximation";
    rep.table.add(both, "*", "mwu_u_corporate_first", rep.corporate_first.u);
    rep.table.add(both, "*", "mwu_gamma_corporate_first", rep.corporate_first.effect_gamma);
    rep.table.add(both, "*", "mwu_u_regional_first", rep.regional_first.u);
    rep.table.add(both, "*", "mwu_gamma_regional_first", rep.regional_first.effect_gamma);
    rep.table.add(both, "*", "mwu_p_two_sided", rep.corporate_first.p_two_sided, std::nullopt, method);
    return rep;
}

AnalysisTable rolling_rankings(std::span<const PatentRecord> records, const Concordance& scheme, Level level,
                               Window span, const PipelineConfig& config, const RollingOptions& options) {
    const auto windows = rolling_windows(span, options.width, options.step);

    struct Slot {
        std::optional<ComplexityResult> result;
        std::string error;
    };
    std::vector<Slot> slots(windows.size());
    const std::string fingerprint = options.cache_namespace + "|" + std::string(to_string(scheme.scheme())) + "|" +
                                    std::string(to_string(level)) + "|" + config_fingerprint(config);

    parallel_for(windows.size(), options.jobs, [&](std::size_t i) {
        const std::string cache_key = io::fnv1a_hex(fingerprint + "|" + windows[i].label());
        if (options.cache != nullptr) {
            if (auto hit = options.cache->load(cache_key)) {
                slots[i].result = std::move(hit);
                return;
            }
        }
        try {
            auto run = run_pipeline(records, scheme, level, windows[i], config);
            if (options.cache != nullptr) options.cache->store(cache_key, run.result);
            slots[i].result = std::move(run.result);
        } catch (const Error& e) {
            slots[i].error = e.what();
        }
    });

    std::set<std::string> universe;
    for (const auto& s : slots) {
        if (s.result) universe.insert(s.result->categories.begin(), s.result->categories.end());
    }

    AnalysisTable table;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto key = key_for(windows[i], scheme.scheme(), level);
        const auto& slot = slots[i];
        if (!slot.result) {
            table.add(key, "*", "status", 0.0, std::nullopt, "failed: " + slot.error);
            continue;
        }
        table.add(key, "*", "status", 1.0, std::nullopt, "ok");
        const auto& r = *slot.result;
        std::map<std::string, double> scores;
        std::map<std::string, std::size_t> position;
        for (std::size_t t = 0; t < r.categories.size(); ++t) {
            scores.emplace(r.categories[t], r.tci[t]);
            position.emplace(r.categories[t], t);
        }
        const auto ranks = stats::rank(scores, true);
        for (const auto& c : universe) {
            const auto p = position.find(c);
            if (p == position.end()) {
                table.add(key, c, "tci", kNaN, std::nullopt, "absent");
                continue;
            }
            table.add(key, c, "tci", r.tci[p->second], ranks.at(c));
            table.add(key, c, "tci_scaled", r.tci_scaled[p->second]);
        }
    }
    return table;
}

AnalysisTable region_pair_compare(std::span<const PatentRecord> records, const Concordance& scheme,
                                  const std::pair<std::string, std::string>& regions, Window window,
                                  const PipelineConfig& config, RegionMode mode) {
    const auto in_window = window_records(records, window);
    auto classified = classify_records(in_window, scheme);
    if (classified.mapped.empty()) throw EmptyNetworkError("no mapped records in window " + window.label());

    AllocationOptions opts;
    opts.window = window;
    const auto corporate = allocate_weights(classified.mapped, scheme, Level::Corporate, opts);
    const auto filtered = filter_top_share(corporate, config.share, config.rank_by).matrix;
    const auto home = actor_home_regions(classified.mapped);

    std::optional<SpecializationMatrix> global;
    if (mode == RegionMode::GlobalMask) global = binarize(compute_rta(filtered), config.threshold);

    auto members = [&](const std::string& region) {
        std::unordered_set<std::string> set;
        for (const auto& a : filtered.actors) {
            const auto it = home.find(a);
            if (it != home.end() && it->second == region) set.insert(a);
        }
        return set;
    };

    auto region_result = [&](const std::string& region, std::size_t& corporations) {
        const auto set = members(region);
        corporations = set.size();
        if (set.size() < 2) {
            throw EmptyNetworkError("region '" + region + "': fewer than two corporations after filtering");
        }
        try {
            if (mode == RegionMode::Recompute) {
                return compute_from_weights(
                    build_weights(classified.mapped, scheme, Level::Corporate, window, config, region).weights,
                    config);
            }
            std::vector<Index> rows, cols;
            for (std::size_t a = 0; a < global->actor_count(); ++a) {
                if (set.contains(global->actors()[a])) rows.push_back(static_cast<Index>(a));
            }
            for (std::size_t t = 0; t < global->category_count(); ++t) cols.push_back(static_cast<Index>(t));
            auto sub = global->subgraph(rows, cols);
            if (sub.edge_count() == 0) throw EmptyNetworkError("no specialization links");
            return tci_eigen(sub.has_isolated_nodes() ? sub.pruned() : sub, config.tci);
        } catch (const ComputeError& e) {
            throw ComputeError("region '" + region + "': " + e.what());
        }
    };

    std::size_t n_first = 0, n_second = 0;
    const auto first = region_result(regions.first, n_first);
    const auto second = region_result(regions.second, n_second);

    const auto key = key_for(window, scheme.scheme(), Level::Corporate);
    const std::string tag_first = "tci_scaled@" + regions.first;
    const std::string tag_second = "tci_scaled@" + regions.second;

    AnalysisTable table;
    table.add(key, "*", "corporations@" + regions.first, static_cast<double>(n_first));
    if (regions.second != regions.first) {
        table.add(key, "*", "corporations@" + regions.second, static_cast<double>(n_second));
    }

    std::map<std::string, double> a, b;
    for (std::size_t t = 0; t < first.categories.size(); ++t) a.emplace(first.categories[t], first.tci_scaled[t]);
    for (std::size_t t = 0; t < second.categories.size(); ++t) b.emplace(second.categories[t], second.tci_scaled[t]);
    std::set<std::string> all;
    for (const auto& [c, v] : a) all.insert(c);
    for (const auto& [c, v] : b) all.insert(c);

    for (const auto& c : all) {
        const auto ia = a.find(c);
        const auto ib = b.find(c);
        if (ia != a.end() && ib != b.end()) {
            table.add(key, c, tag_first, ia->second, std::nullopt, "paired");
            if (tag_second != tag_first) table.add(key, c, tag_second, ib->second, std::nullopt, "paired");
        } else if (ia != a.end()) {
            table.add(key, c, tag_first, ia->second, std::nullopt, "exclusive");
        } else {
            table.add(key, c, tag_second, ib->second, std::nullopt, "exclusive");
        }
    }
    return table;
}

}  // namespace tcx
