#include "tcx/bipartite.hpp"

#include <algorithm>

#include "tcx/error.hpp"

namespace tcx {

RtaMatrix compute_rta(const WeightMatrix& w) {
    const auto row = w.weights.row_sums();
    const auto col = w.weights.col_sums();
    double total = 0.0;
    for (double r : row) total += r;
    if (!(total > 0.0)) throw StructuralError("RTA: weight matrix has zero total weight");
    for (std::size_t a = 0; a < row.size(); ++a) {
        if (!(row[a] > 0.0)) throw StructuralError("RTA: actor '" + w.actors[a] + "' has zero weight");
    }
    for (std::size_t c = 0; c < col.size(); ++c) {
        if (!(col[c] > 0.0)) {
            throw StructuralError("RTA: category '" + w.categories[c] + "' has zero weight");
        }
    }

    RtaMatrix out;
    out.actors = w.actors;
    out.categories = w.categories;
    out.values = w.weights.map_values([&](std::size_t a, std::size_t c, double v) {
        return (v / row[a]) / (col[c] / total);
    });
    return out;
}

SpecializationMatrix::SpecializationMatrix(std::vector<std::string> actors,
                                           std::vector<std::string> categories,
                                           std::vector<std::vector<Index>> adjacency)
    : actors_(std::move(actors)), categories_(std::move(categories)) {
    if (adjacency.size() != actors_.size()) {
        throw ArgumentError("SpecializationMatrix: adjacency size differs from actor count");
    }
    k_c0_.assign(actors_.size(), 0);
    k_t0_.assign(categories_.size(), 0);
    for (std::size_t a = 0; a < adjacency.size(); ++a) {
        auto& cats = adjacency[a];
        std::sort(cats.begin(), cats.end());
        cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
        for (Index c : cats) {
            if (c >= categories_.size()) throw ArgumentError("SpecializationMatrix: category out of range");
            ++k_t0_[c];
        }
        by_actor_.insert(by_actor_.end(), cats.begin(), cats.end());
        actor_ptr_.push_back(by_actor_.size());
        k_c0_[a] = static_cast<int>(cats.size());
    }

    category_ptr_.assign(categories_.size() + 1, 0);
    for (std::size_t c = 0; c < categories_.size(); ++c) {
        category_ptr_[c + 1] = category_ptr_[c] + static_cast<std::size_t>(k_t0_[c]);
    }
    by_category_.resize(by_actor_.size());
    std::vector<std::size_t> fill(category_ptr_.begin(), category_ptr_.end() - 1);
    for (std::size_t a = 0; a < actors_.size(); ++a) {
        for (Index c : categories_of(a)) by_category_[fill[c]++] = static_cast<Index>(a);
    }
}

SpecializationMatrix SpecializationMatrix::from_dense(std::vector<std::string> actors,
                                                      std::vector<std::string> categories,
                                                      const std::vector<std::vector<int>>& m) {
    if (m.size() != actors.size()) throw ArgumentError("from_dense: row count mismatch");
    std::vector<std::vector<Index>> adj(m.size());
    for (std::size_t a = 0; a < m.size(); ++a) {
        if (m[a].size() != categories.size()) throw ArgumentError("from_dense: column count mismatch");
        for (std::size_t c = 0; c < m[a].size(); ++c) {
            if (m[a][c] != 0 && m[a][c] != 1) throw ArgumentError("from_dense: entries must be 0 or 1");
            if (m[a][c] == 1) adj[a].push_back(static_cast<Index>(c));
        }
    }
    return SpecializationMatrix(std::move(actors), std::move(categories), std::move(adj));
}

SpecializationMatrix SpecializationMatrix::from_dense(const std::vector<std::vector<int>>& m) {
    const std::size_t cols = m.empty() ? 0 : m.front().size();
    std::vector<std::string> actors;
    std::vector<std::string> categories;
    // Zero-padded so lexicographic order matches index order.
    auto label = [](char prefix, std::size_t i) {
        std::string digits = std::to_string(i);
        return std::string(1, prefix) + std::string(digits.size() < 4 ? 4 - digits.size() : 0, '0') +
               digits;
    };
    for (std::size_t a = 0; a < m.size(); ++a) actors.push_back(label('a', a));
    for (std::size_t c = 0; c < cols; ++c) categories.push_back(label('t', c));
    return from_dense(std::move(actors), std::move(categories), m);
}

bool SpecializationMatrix::at(std::size_t actor, std::size_t category) const {
    const auto cats = categories_of(actor);
    return std::binary_search(cats.begin(), cats.end(), static_cast<Index>(category));
}

bool SpecializationMatrix::has_isolated_nodes() const {
    return std::find(k_c0_.begin(), k_c0_.end(), 0) != k_c0_.end() ||
           std::find(k_t0_.begin(), k_t0_.end(), 0) != k_t0_.end();
}

SpecializationMatrix SpecializationMatrix::subgraph(std::span<const Index> actors,
                                                    std::span<const Index> categories) const {
    constexpr Index kGone = static_cast<Index>(-1);
    std::vector<Index> cat_map(categories_.size(), kGone);
    std::vector<std::string> cat_names;
    for (std::size_t i = 0; i < categories.size(); ++i) {
        cat_map[categories[i]] = static_cast<Index>(i);
        cat_names.push_back(categories_[categories[i]]);
    }
    std::vector<std::string> actor_names;
    std::vector<std::vector<Index>> adj;
    adj.reserve(actors.size());
    for (Index a : actors) {
        actor_names.push_back(actors_[a]);
        auto& row = adj.emplace_back();
        for (Index c : categories_of(a)) {
            if (cat_map[c] != kGone) row.push_back(cat_map[c]);
        }
    }
    SpecializationMatrix out(std::move(actor_names), std::move(cat_names), std::move(adj));
    out.pruned_actors = pruned_actors;
    out.pruned_categories = pruned_categories;
    return out;
}

SpecializationMatrix SpecializationMatrix::pruned() const {
    std::vector<Index> keep_a;
    std::vector<Index> keep_c;
    std::vector<std::string> dropped_a;
    std::vector<std::string> dropped_c;
    for (std::size_t a = 0; a < actors_.size(); ++a) {
        if (k_c0_[a] > 0) keep_a.push_back(static_cast<Index>(a));
        else dropped_a.push_back(actors_[a]);
    }
    for (std::size_t c = 0; c < categories_.size(); ++c) {
        if (k_t0_[c] > 0) keep_c.push_back(static_cast<Index>(c));
        else dropped_c.push_back(categories_[c]);
    }
    auto out = subgraph(keep_a, keep_c);
    out.pruned_actors.insert(out.pruned_actors.end(), dropped_a.begin(), dropped_a.end());
    out.pruned_categories.insert(out.pruned_categories.end(), dropped_c.begin(), dropped_c.end());
    return out;
}

std::vector<std::vector<int>> SpecializationMatrix::to_dense() const {
    std::vector<std::vector<int>> d(actors_.size(), std::vector<int>(categories_.size(), 0));
    for (std::size_t a = 0; a < actors_.size(); ++a) {
        for (Index c : categories_of(a)) d[a][c] = 1;
    }
    return d;
}

SpecializationMatrix binarize(const RtaMatrix& rta, double threshold) {
    if (!(threshold > 0.0)) throw ArgumentError("RTA threshold must be > 0");
    const double cut = threshold * (1.0 - kThresholdSlack);
    std::vector<std::vector<Index>> adj(rta.actors.size());
    std::size_t edges = 0;
    for (std::size_t a = 0; a < rta.actors.size(); ++a) {
        const auto idx = rta.values.row_indices(a);
        const auto val = rta.values.row_values(a);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (val[k] >= cut) {
                adj[a].push_back(idx[k]);
                ++edges;
            }
        }
    }
    if (edges == 0) {
        throw EmptyNetworkError("no RTA entry reaches threshold " + std::to_string(threshold));
    }
    SpecializationMatrix m(rta.actors, rta.categories, std::move(adj));
    return m.has_isolated_nodes() ? m.pruned() : m;
}

RtaMatrix as_rta(const SpecializationMatrix& m) {
    RtaMatrix out;
    out.actors = m.actors();
    out.categories = m.categories();
    std::vector<CsrMatrix::Triplet> t;
    t.reserve(m.edge_count());
    for (std::size_t a = 0; a < m.actor_count(); ++a) {
        for (Index c : m.categories_of(a)) t.push_back({static_cast<Index>(a), c, 1.0});
    }
    out.values = CsrMatrix::from_triplets(m.actor_count(), m.category_count(), std::move(t));
    return out;
}

Degrees degrees(const SpecializationMatrix& m) {
    return {m.actor_degrees(), m.category_degrees()};
}

}  // namespace tcx
