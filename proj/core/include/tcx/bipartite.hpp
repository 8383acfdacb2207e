#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tcx/ingest.hpp"
#include "tcx/sparse.hpp"

namespace tcx {

// Revealed technological advantage per (actor, category). Shares the
// sparsity pattern of the weight matrix it came from.
struct RtaMatrix {
    std::vector<std::string> actors;
    std::vector<std::string> categories;
    CsrMatrix values;
};

// RTA_ct = (W_ct / sum_t W_ct) / (sum_c W_ct / sum_ct W_ct).
// Throws StructuralError naming the first empty actor row or category column.
RtaMatrix compute_rta(const WeightMatrix& w);

// Binary actor x category incidence with cached degrees. Stored both by
// actor (CSR) and by category (CSC), indices ascending.
class SpecializationMatrix {
public:
    SpecializationMatrix() = default;

    // adjacency[a] lists the category indices actor `a` is linked to.
    SpecializationMatrix(std::vector<std::string> actors, std::vector<std::string> categories,
                         std::vector<std::vector<Index>> adjacency);

    // Rows of 0/1 values; anything else is rejected.
    static SpecializationMatrix from_dense(std::vector<std::string> actors,
                                           std::vector<std::string> categories,
                                           const std::vector<std::vector<int>>& m);
    // Generic labels a0.., t0.. for tests and benchmarks.
    static SpecializationMatrix from_dense(const std::vector<std::vector<int>>& m);

    std::size_t actor_count() const noexcept { return actors_.size(); }
    std::size_t category_count() const noexcept { return categories_.size(); }
    std::size_t edge_count() const noexcept { return by_actor_.size(); }

    const std::vector<std::string>& actors() const noexcept { return actors_; }
    const std::vector<std::string>& categories() const noexcept { return categories_; }

    std::span<const Index> categories_of(std::size_t actor) const {
        return {by_actor_.data() + actor_ptr_[actor], actor_ptr_[actor + 1] - actor_ptr_[actor]};
    }
    std::span<const Index> actors_of(std::size_t category) const {
        return {by_category_.data() + category_ptr_[category],
                category_ptr_[category + 1] - category_ptr_[category]};
    }

    bool at(std::size_t actor, std::size_t category) const;

    // Diversity K_{C,0} and ubiquity K_{T,0}.
    const std::vector<int>& actor_degrees() const noexcept { return k_c0_; }
    const std::vector<int>& category_degrees() const noexcept { return k_t0_; }

    bool has_isolated_nodes() const;

    // Drops zero-degree actors and categories; names are appended to
    // pruned_actors / pruned_categories of the result.
    SpecializationMatrix pruned() const;

    // Induced sub-network on the given (ascending) index sets.
    SpecializationMatrix subgraph(std::span<const Index> actors,
                                  std::span<const Index> categories) const;

    std::vector<std::vector<int>> to_dense() const;

    std::vector<std::string> pruned_actors;
    std::vector<std::string> pruned_categories;

private:
    std::vector<std::string> actors_;
    std::vector<std::string> categories_;
    std::vector<std::size_t> actor_ptr_{0};
    std::vector<Index> by_actor_;
    std::vector<std::size_t> category_ptr_{0};
    std::vector<Index> by_category_;
    std::vector<int> k_c0_;
    std::vector<int> k_t0_;
};

// Relative slack applied to the threshold so that entries that equal it
// in exact arithmetic survive floating-point rounding.
inline constexpr double kThresholdSlack = 1e-12;

// m = 1 where rta >= threshold, zero-degree rows and columns pruned.
// Throws ArgumentError for threshold <= 0, EmptyNetworkError when no
// entry reaches the threshold.
SpecializationMatrix binarize(const RtaMatrix& rta, double threshold = 1.0);

// Reads a binary matrix back as RTA values (1 on edges).
RtaMatrix as_rta(const SpecializationMatrix& m);

struct Degrees {
    std::vector<int> actor;     // K_{C,0}
    std::vector<int> category;  // K_{T,0}
};

Degrees degrees(const SpecializationMatrix& m);

}  // namespace tcx
