#include "tcx/table.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "tcx/error.hpp"
#include "tcx/io.hpp"

namespace tcx {

void AnalysisTable::add(AnalysisRow row) {
    Key key{row.window, row.scheme, row.level, row.category, row.metric};
    if (!keys_.insert(key).second) {
        throw ArgumentError("AnalysisTable: duplicate key (" + row.window + ", " + row.scheme + ", " +
                            row.level + ", " + row.category + ", " + row.metric + ")");
    }
    rows_.push_back(std::move(row));
}

void AnalysisTable::add(const AnalysisKey& key, std::string category, std::string metric, double value,
                        std::optional<int> rank, std::string note) {
    add(AnalysisRow{key.window, key.scheme, key.level, std::move(category), std::move(metric), value,
                    rank, std::move(note)});
}

void AnalysisTable::append(const AnalysisTable& other) {
    for (const auto& r : other.rows_) add(r);
}

const AnalysisRow* AnalysisTable::find(std::string_view window, std::string_view level,
                                       std::string_view category, std::string_view metric) const {
    for (const auto& r : rows_) {
        if (r.window == window && r.level == level && r.category == category && r.metric == metric) {
            return &r;
        }
    }
    return nullptr;
}

std::string AnalysisTable::to_csv(char d) const {
    std::string out = "window,scheme,level,category,metric,value,rank,note\n";
    if (d != ',') {
        for (auto& c : out) {
            if (c == ',') c = d;
        }
    }
    for (const auto& r : rows_) {
        out += io::csv_field(r.window, d) + d + io::csv_field(r.scheme, d) + d +
               io::csv_field(r.level, d) + d + io::csv_field(r.category, d) + d +
               io::csv_field(r.metric, d) + d + io::format_number(r.value) + d +
               (r.rank ? std::to_string(*r.rank) : std::string("NA")) + d + io::csv_field(r.note, d) +
               '\n';
    }
    return out;
}

std::string AnalysisTable::to_json() const {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : rows_) {
        nlohmann::ordered_json j;
        j["window"] = r.window;
        j["scheme"] = r.scheme;
        j["level"] = r.level;
        j["category"] = r.category;
        j["metric"] = r.metric;
        j["value"] = std::isnan(r.value) ? nlohmann::ordered_json(nullptr)
                                         : nlohmann::ordered_json(io::round12(r.value));
        j["rank"] = r.rank ? nlohmann::ordered_json(*r.rank) : nlohmann::ordered_json(nullptr);
        j["note"] = r.note;
        rows.push_back(std::move(j));
    }
    nlohmann::ordered_json doc;
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

}  // namespace tcx
