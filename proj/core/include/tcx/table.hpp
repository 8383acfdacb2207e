#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace tcx {

struct AnalysisKey {
    std::string window;
    std::string scheme;
    std::string level;
};

struct AnalysisRow {
    std::string window;
    std::string scheme;
    std::string level;
    std::string category;  // category id, "*" for table-wide values, "sector:<label>" ...
    std::string metric;
    double value = 0.0;    // NaN when absent or omitted; see note
    std::optional<int> rank;
    std::string note;

    friend bool operator==(const AnalysisRow&, const AnalysisRow&) = default;
};

// Long-format analysis output. Rows keep insertion order; the
// (window, scheme, level, category, metric) key must be unique.
class AnalysisTable {
public:
    void add(AnalysisRow row);
    void add(const AnalysisKey& key, std::string category, std::string metric, double value,
             std::optional<int> rank = std::nullopt, std::string note = {});
    void append(const AnalysisTable& other);

    const std::vector<AnalysisRow>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }
    bool empty() const noexcept { return rows_.empty(); }

    const AnalysisRow* find(std::string_view window, std::string_view level,
                            std::string_view category, std::string_view metric) const;

    std::string to_csv(char delimiter = ',') const;
    std::string to_json() const;

    friend bool operator==(const AnalysisTable& a, const AnalysisTable& b) { return a.rows_ == b.rows_; }

private:
    using Key = std::tuple<std::string, std::string, std::string, std::string, std::string>;
    std::vector<AnalysisRow> rows_;
    std::set<Key> keys_;
};

}  // namespace tcx
