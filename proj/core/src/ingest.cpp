#include "tcx/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <sstream>
#include <unordered_map>

#include "tcx/error.hpp"
#include "text.hpp"

namespace tcx {

namespace {

std::optional<int> parse_int(std::string_view s) {
    s = detail::trim(s);
    int v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc{} || ptr != end) return std::nullopt;
    return v;
}

struct Columns {
    std::size_t count = 0;
    std::size_t patent_id = 0;
    std::size_t year = 0;
    bool year_is_date = false;
    std::size_t assignees = 0;
    std::optional<std::size_t> regions;
    std::size_t ipc = 0;
};

Columns parse_header(std::string_view line, const RecordSchema& schema) {
    std::vector<std::string_view> names;
    detail::split(line, schema.delimiter, names);
    std::map<std::string, std::size_t, std::less<>> index;
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto name = detail::trim(names[i]);
        if (i == 0 && name.starts_with("\xEF\xBB\xBF")) name.remove_prefix(3);
        if (name.empty()) throw DataError("malformed header: empty column name");
        if (!index.emplace(std::string(name), i).second) {
            throw DataError("malformed header: duplicate column '" + std::string(name) + "'");
        }
    }
    auto require = [&](std::string_view name) {
        const auto it = index.find(name);
        if (it == index.end()) {
            throw DataError("malformed header: missing column '" + std::string(name) + "'");
        }
        return it->second;
    };

    Columns c;
    c.count = names.size();
    c.patent_id = require("patent_id");
    c.assignees = require("assignees");
    c.ipc = require("primary_ipc");
    if (const auto it = index.find("assignee_regions"); it != index.end()) c.regions = it->second;

    switch (schema.year_source) {
    case YearSource::FiscalYear:
        c.year = require("fiscal_year");
        break;
    case YearSource::FilingDate:
        c.year = require("filing_date");
        c.year_is_date = true;
        break;
    case YearSource::Auto:
        if (index.contains("fiscal_year")) {
            c.year = index.find("fiscal_year")->second;
        } else if (index.contains("filing_date")) {
            c.year = index.find("filing_date")->second;
            c.year_is_date = true;
        } else {
            throw DataError("malformed header: missing column 'fiscal_year' or 'filing_date'");
        }
        break;
    }
    return c;
}

}  // namespace

std::optional<int> fiscal_year_from_date(std::string_view iso_date) {
    iso_date = detail::trim(iso_date);
    // YYYY-MM-DD, optionally followed by a time part.
    if (iso_date.size() < 10 || iso_date[4] != '-' || iso_date[7] != '-') return std::nullopt;
    const auto year = parse_int(iso_date.substr(0, 4));
    const auto month = parse_int(iso_date.substr(5, 2));
    const auto day = parse_int(iso_date.substr(8, 2));
    if (!year || !month || !day || *month < 1 || *month > 12 || *day < 1 || *day > 31) {
        return std::nullopt;
    }
    return *month >= 4 ? *year : *year - 1;
}

ParseResult parse_records(std::string_view text, const RecordSchema& schema) {
    ParseResult out;
    std::optional<Columns> cols;
    std::vector<std::string_view> fields;
    std::vector<std::string_view> parts;

    detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (!cols) {
            if (detail::trim(line).empty()) throw DataError("malformed header: empty first line");
            cols = parse_header(line, schema);
            return;
        }
        if (detail::trim(line).empty()) return;
        ++out.rows_read;

        auto reject = [&](std::string reason) { out.rejects.push_back({line_no, std::move(reason)}); };

        detail::split(line, schema.delimiter, fields);
        if (fields.size() != cols->count) {
            reject("expected " + std::to_string(cols->count) + " fields, got " +
                   std::to_string(fields.size()));
            return;
        }

        PatentRecord r;
        r.source_row = line_no;
        r.patent_id = std::string(detail::trim(fields[cols->patent_id]));
        if (r.patent_id.empty()) return reject("missing patent_id");

        const auto year_field = fields[cols->year];
        if (cols->year_is_date) {
            const auto fy = fiscal_year_from_date(year_field);
            if (!fy) return reject("invalid filing_date");
            r.fiscal_year = *fy;
        } else {
            const auto fy = parse_int(year_field);
            if (!fy) return reject("invalid fiscal_year");
            r.fiscal_year = *fy;
        }

        const auto assignees = detail::trim(fields[cols->assignees]);
        if (assignees.empty()) return reject("missing assignee");
        detail::split(assignees, schema.list_separator, parts);
        r.assignees.reserve(parts.size());
        for (auto p : parts) {
            p = detail::trim(p);
            if (p.empty()) return reject("empty assignee entry");
            r.assignees.emplace_back(p);
        }

        if (cols->regions) {
            const auto regions = detail::trim(fields[*cols->regions]);
            if (!regions.empty()) {
                detail::split(regions, schema.list_separator, parts);
                if (parts.size() != r.assignees.size()) {
                    return reject("assignee_regions length mismatch");
                }
                r.assignee_regions.reserve(parts.size());
                for (auto p : parts) r.assignee_regions.emplace_back(detail::trim(p));
            }
        }

        r.primary_ipc = std::string(detail::trim(fields[cols->ipc]));
        if (r.primary_ipc.empty()) return reject("missing primary_ipc");

        out.records.push_back(std::move(r));
    });

    if (!cols) throw DataError("malformed header: input is empty");
    return out;
}

ParseResult parse_records(std::istream& in, const RecordSchema& schema) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) throw DataError("failed reading record stream");
    return parse_records(std::string_view(text), schema);
}

// ---------------------------------------------------------------------------

std::string_view to_string(Level l) {
    return l == Level::Corporate ? "corporate" : "regional";
}

std::optional<Level> parse_level(std::string_view s) {
    if (s == "corporate") return Level::Corporate;
    if (s == "regional") return Level::Regional;
    return std::nullopt;
}

std::string Window::label() const {
    return std::to_string(start) + "-" + std::to_string(end);
}

namespace {

// Interns identifiers, then hands out a lexicographic ordering.
class Interner {
public:
    Index intern(const std::string& s) {
        const auto [it, inserted] = ids_.try_emplace(s, static_cast<Index>(names_.size()));
        if (inserted) names_.push_back(s);
        return it->second;
    }

    std::size_t size() const { return names_.size(); }

    // remap[old] = new position in sorted order; `sorted` receives names.
    std::vector<Index> sorted_order(std::vector<std::string>& sorted) const {
        std::vector<Index> perm(names_.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<Index>(i);
        std::sort(perm.begin(), perm.end(),
                  [&](Index a, Index b) { return names_[a] < names_[b]; });
        std::vector<Index> remap(names_.size());
        sorted.clear();
        sorted.reserve(names_.size());
        for (std::size_t i = 0; i < perm.size(); ++i) {
            remap[perm[i]] = static_cast<Index>(i);
            sorted.push_back(names_[perm[i]]);
        }
        return remap;
    }

private:
    std::unordered_map<std::string, Index> ids_;
    std::vector<std::string> names_;
};

}  // namespace

WeightMatrix allocate_weights(std::span<const PatentRecord> records, const Concordance& scheme,
                              Level level, const AllocationOptions& options) {
    Interner actors;
    Interner categories;
    std::vector<CsrMatrix::Triplet> triplets;
    triplets.reserve(records.size() + records.size() / 4);
    std::vector<double> counts;

    WeightMatrix w;
    w.meta.level = level;
    w.meta.scheme = scheme.scheme();

    int min_year = 0;
    int max_year = 0;
    bool any = false;

    std::vector<Index> seen;
    std::vector<std::string_view> regions;

    auto credit = [&](Index actor, Index cat, double weight) {
        triplets.push_back({actor, cat, weight});
        if (counts.size() <= actor) counts.resize(actor + 1, 0.0);
        if (std::find(seen.begin(), seen.end(), actor) == seen.end()) {
            seen.push_back(actor);
            counts[actor] += 1.0;
        }
    };

    for (const auto& r : records) {
        const auto category = map_classification(r, scheme);
        if (!category) {
            throw DataError("row " + std::to_string(r.source_row) + ": unmapped IPC '" +
                            r.primary_ipc + "'");
        }
        if (r.assignees.empty()) {
            throw DataError("row " + std::to_string(r.source_row) + ": missing assignee");
        }
        if (!any) {
            min_year = max_year = r.fiscal_year;
            any = true;
        }
        min_year = std::min(min_year, r.fiscal_year);
        max_year = std::max(max_year, r.fiscal_year);

        const double n_assignees = static_cast<double>(r.assignees.size());
        auto retained = [&](std::size_t i) {
            return options.retained_actors == nullptr ||
                   options.retained_actors->contains(r.assignees[i]);
        };

        seen.clear();
        if (level == Level::Corporate) {
            bool touched = false;
            Index cat = 0;
            for (std::size_t i = 0; i < r.assignees.size(); ++i) {
                if (!retained(i)) continue;
                if (!touched) {
                    cat = categories.intern(*category);
                    touched = true;
                }
                credit(actors.intern(r.assignees[i]), cat, 1.0 / n_assignees);
            }
            continue;
        }

        // Regional: the retained assignees' share, split over distinct regions.
        regions.clear();
        std::size_t kept = 0;
        for (std::size_t i = 0; i < r.assignees.size(); ++i) {
            if (!retained(i)) continue;
            ++kept;
            std::string_view region = r.assignee_regions.empty() ? std::string_view{}
                                                                 : r.assignee_regions[i];
            if (region.empty()) region = kUnknownRegion;
            if (std::find(regions.begin(), regions.end(), region) == regions.end()) {
                regions.push_back(region);
            }
        }
        if (kept == 0) continue;
        const double share = static_cast<double>(kept) / n_assignees;
        const double per_region = share / static_cast<double>(regions.size());
        bool unknown = false;
        for (auto region : regions) {
            if (region == kUnknownRegion) {
                w.excluded_weight += per_region;
                unknown = true;
                continue;
            }
            credit(actors.intern(std::string(region)), categories.intern(*category), per_region);
        }
        if (unknown) ++w.excluded_records;
    }

    w.meta.window = options.window.value_or(any ? Window{min_year, max_year} : Window{});

    const auto actor_remap = actors.sorted_order(w.actors);
    const auto cat_remap = categories.sorted_order(w.categories);
    for (auto& t : triplets) {
        t.row = actor_remap[t.row];
        t.col = cat_remap[t.col];
    }
    w.weights = CsrMatrix::from_triplets(w.actors.size(), w.categories.size(), std::move(triplets));
    counts.resize(actors.size(), 0.0);
    w.record_counts.assign(actors.size(), 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i) w.record_counts[actor_remap[i]] = counts[i];
    return w;
}

namespace {

WeightMatrix keep_rows(const WeightMatrix& w, std::span<const Index> rows,
                       std::vector<std::string>* dropped_categories) {
    WeightMatrix out;
    out.meta = w.meta;
    out.excluded_weight = w.excluded_weight;
    out.excluded_records = w.excluded_records;
    auto restricted = w.weights.select_rows(rows);
    for (Index r : rows) {
        out.actors.push_back(w.actors[r]);
        out.record_counts.push_back(w.record_counts.empty() ? 0.0 : w.record_counts[r]);
    }
    const auto col_sums = restricted.col_sums();
    std::vector<Index> cols;
    for (std::size_t c = 0; c < col_sums.size(); ++c) {
        if (col_sums[c] > 0.0) {
            cols.push_back(static_cast<Index>(c));
            out.categories.push_back(w.categories[c]);
        } else if (dropped_categories != nullptr) {
            dropped_categories->push_back(w.categories[c]);
        }
    }
    out.weights = cols.size() == col_sums.size() ? std::move(restricted)
                                                 : restricted.select_cols(cols);
    return out;
}

}  // namespace

FilterReport filter_top_share(const WeightMatrix& w, double share, RankBy rank_by) {
    if (!(share > 0.0 && share <= 1.0)) {
        throw ArgumentError("filter share must lie in (0, 1], got " + std::to_string(share));
    }
    if (w.actors.empty()) throw ArgumentError("filter_top_share: empty weight matrix");

    const auto row_weights = w.weights.row_sums();
    const auto& key = rank_by == RankBy::Weight ? row_weights : w.record_counts;
    if (key.size() != w.actors.size()) throw ArgumentError("filter_top_share: missing record counts");

    std::vector<Index> order(w.actors.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Index>(i);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return key[a] > key[b]; });

    const double n = static_cast<double>(w.actors.size());
    // Guard against 0.03 * 100 = 3.0000000000000004 rounding up to 4.
    auto n_keep = static_cast<std::size_t>(std::ceil(share * n - 1e-9 * n));
    n_keep = std::clamp<std::size_t>(n_keep, 1, w.actors.size());
    const double cutoff = key[order[n_keep - 1]];

    std::vector<Index> keep;
    for (std::size_t i = 0; i < w.actors.size(); ++i) {
        if (key[i] >= cutoff) keep.push_back(static_cast<Index>(i));
    }

    FilterReport rep;
    rep.actors_before = w.actors.size();
    rep.actors_retained = keep.size();
    rep.cutoff_value = cutoff;
    rep.matrix = keep_rows(w, keep, &rep.dropped_categories);
    const double total = w.total_weight();
    rep.retained_weight_fraction = total > 0.0 ? rep.matrix.total_weight() / total : 0.0;
    return rep;
}

WeightMatrix restrict_actors(const WeightMatrix& w, const std::unordered_set<std::string>& actors) {
    std::vector<Index> keep;
    for (std::size_t i = 0; i < w.actors.size(); ++i) {
        if (actors.contains(w.actors[i])) keep.push_back(static_cast<Index>(i));
    }
    return keep_rows(w, keep, nullptr);
}

std::vector<PatentRecord> window_records(std::span<const PatentRecord> records, Window window) {
    if (window.start > window.end) {
        throw ArgumentError("inverted window " + window.label());
    }
    std::vector<PatentRecord> out;
    for (const auto& r : records) {
        if (r.fiscal_year >= window.start && r.fiscal_year <= window.end) out.push_back(r);
    }
    return out;
}

std::vector<Window> rolling_windows(Window span, int width, int step) {
    if (span.start > span.end) throw ArgumentError("inverted window " + span.label());
    if (width < 1) throw ArgumentError("window width must be >= 1");
    if (step < 1) throw ArgumentError("window step must be >= 1");
    if (width > span.width()) {
        throw ArgumentError("window width " + std::to_string(width) + " exceeds span " +
                            span.label());
    }
    std::vector<Window> out;
    for (int s = span.start; s + width - 1 <= span.end; s += step) {
        out.push_back({s, s + width - 1});
    }
    return out;
}

std::map<std::string, std::string> actor_home_regions(std::span<const PatentRecord> records) {
    std::map<std::string, std::map<std::string, std::size_t>> tally;
    for (const auto& r : records) {
        if (r.assignee_regions.empty()) continue;
        for (std::size_t i = 0; i < r.assignees.size(); ++i) {
            if (r.assignee_regions[i].empty()) continue;
            ++tally[r.assignees[i]][r.assignee_regions[i]];
        }
    }
    std::map<std::string, std::string> home;
    for (const auto& [actor, counts] : tally) {
        // std::map iterates regions in order, so '>' keeps the smallest on ties.
        const std::string* best = nullptr;
        std::size_t best_count = 0;
        for (const auto& [region, n] : counts) {
            if (n > best_count) {
                best = &region;
                best_count = n;
            }
        }
        home.emplace(actor, *best);
    }
    return home;
}

}  // namespace tcx
