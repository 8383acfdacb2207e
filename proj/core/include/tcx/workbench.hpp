#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tcx/bipartite.hpp"
#include "tcx/complexity.hpp"
#include "tcx/ingest.hpp"
#include "tcx/stats.hpp"
#include "tcx/table.hpp"

namespace tcx {

struct PipelineConfig {
    double share = 0.03;
    RankBy rank_by = RankBy::Weight;
    double threshold = 1.0;
    TciOptions tci;
};

struct PipelineRun {
    std::size_t records_in = 0;
    std::size_t unmapped = 0;
    // Corporate-level allocation after the top-share filter.
    FilterReport filter;
    // Matrix the network was built from (corporate filtered, or regional).
    WeightMatrix weights;
    SpecializationMatrix network;
    ComplexityResult result;
};

struct WeightsRun {
    // Corporate weight before filtering; equals the record count.
    double allocated_weight = 0.0;
    FilterReport filter;
    WeightMatrix weights;
};

// Network input for mapped records already restricted to `window`.
// Corporate: allocate -> filter. Regional: allocate corporate -> filter ->
// allocate the retained corporations' share to regions. A non-empty
// `home_region` keeps only retained corporations whose home region it is.
WeightsRun build_weights(std::span<const PatentRecord> mapped, const Concordance& scheme, Level level,
                         Window window, const PipelineConfig& config, const std::string& home_region = {});

// Corporate: allocate -> filter -> RTA -> binarize -> TCI.
// Regional: allocate corporate -> filter -> allocate the retained
// corporations' share to regions -> RTA -> binarize -> TCI.
// Records outside `window` are ignored; unmapped records are counted
// and skipped.
PipelineRun run_pipeline(std::span<const PatentRecord> records, const Concordance& scheme, Level level,
                         Window window, const PipelineConfig& config);

// RTA -> binarize -> TCI on an existing weight matrix.
ComplexityResult compute_from_weights(const WeightMatrix& w, const PipelineConfig& config,
                                      SpecializationMatrix* network_out = nullptr);

AnalysisKey key_for(Window window, Scheme scheme, Level level);

// ---------------------------------------------------------------------------

// Fine category -> coarse category, many-to-one.
using SchemeBridge = std::map<std::string, std::string>;

// Each fine category maps to the coarse category most of its records
// fall into (ties: smallest coarse id).
SchemeBridge derive_bridge(std::span<const PatentRecord> records, const Concordance& fine,
                           const Concordance& coarse);

SchemeBridge identity_bridge(std::span<const std::string> categories);

// Sector label per category of `scheme`. For Ipc3 with a Schmoch bridge
// the sector of the bridged field is used, otherwise the IPC section.
std::map<std::string, std::string> sector_map(const Concordance& scheme,
                                              std::span<const std::string> categories,
                                              const SchemeBridge* bridge = nullptr,
                                              const Concordance* coarse = nullptr);

// Scatter data (ubiquity, avg_diversity, tci per category, sector in the
// note), Pearson r for the three pairs overall and per sector, and the
// mean / zero reference lines.
AnalysisTable correlation_panel(const ComplexityResult& result,
                                const std::map<std::string, std::string>& sectors,
                                const AnalysisKey& key);

struct ConsistencyOutput {
    AnalysisTable table;
    std::vector<std::string> fine_categories;  // parallel to residuals
    std::vector<double> residuals;
    std::vector<std::string> uncomparable;
    std::size_t coarse_in_band = 0;  // coarse categories scoring in [75, 100]
    std::size_t fine_in_band = 0;
};

// residual = |scaled(fine) - scaled(coarse of bridge image)| on the
// 0-100 scale (re-derived from the standardized scores).
ConsistencyOutput consistency_compare(const ComplexityResult& fine, const ComplexityResult& coarse,
                                      const SchemeBridge& bridge, const AnalysisKey& key);

struct ConsistencyReport {
    AnalysisTable table;
    ConsistencyOutput corporate;
    ConsistencyOutput regional;
    stats::UTestResult corporate_first;
    stats::UTestResult regional_first;
};

// Fine vs coarse at both levels, then a Mann-Whitney test of corporate
// against regional residuals, reported in both orientations.
ConsistencyReport consistency_analysis(std::span<const PatentRecord> records, const Concordance& fine,
                                       const Concordance& coarse, Window window,
                                       const PipelineConfig& config);

// Optional store for per-window results, keyed by an opaque string.
class ResultCache {
public:
    virtual ~ResultCache() = default;
    virtual std::optional<ComplexityResult> load(const std::string& key) = 0;
    virtual void store(const std::string& key, const ComplexityResult& result) = 0;
};

struct RollingOptions {
    int width = 5;
    int step = 1;
    std::size_t jobs = 1;
    ResultCache* cache = nullptr;
    // Mixed into cache keys; callers put input digests here.
    std::string cache_namespace;
};

// Full pipeline per window, dense TCI ranks (1 = most complex). Categories
// missing from a window get an "absent" row; failing windows get a
// "status" row with the diagnostic and the run continues.
AnalysisTable rolling_rankings(std::span<const PatentRecord> records, const Concordance& scheme, Level level,
                               Window span, const PipelineConfig& config, const RollingOptions& options);

enum class RegionMode {
    Recompute,   // RTA recomputed within the region's corporations
    GlobalMask,  // global specialization matrix restricted to the region
};

// Corporate TCI of two regions on the 0-100 scale: paired rows over the
// shared categories and "exclusive" rows for the rest. Throws
// ComputeError naming the region when its network is unusable.
AnalysisTable region_pair_compare(std::span<const PatentRecord> records, const Concordance& scheme,
                                  const std::pair<std::string, std::string>& regions, Window window,
                                  const PipelineConfig& config, RegionMode mode = RegionMode::Recompute);

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace tcx
