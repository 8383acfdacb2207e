#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "tcx/sparse.hpp"

namespace tcx {

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct PatentRecord {
    std::string patent_id;
    int fiscal_year = 0;
    std::vector<std::string> assignees;
    // Either empty or parallel to `assignees`; an empty string is an
    // unknown region.
    std::vector<std::string> assignee_regions;
    std::string primary_ipc;
    // Physical line number in the source file (header is line 1).
    std::size_t source_row = 0;
};

enum class YearSource {
    Auto,        // fiscal_year column if present, otherwise filing_date
    FiscalYear,  // integer column `fiscal_year`
    FilingDate,  // ISO-8601 column `filing_date`, mapped April..March
};

struct RecordSchema {
    char delimiter = ',';
    char list_separator = '|';
    YearSource year_source = YearSource::Auto;
};

struct Reject {
    std::size_t row_number = 0;
    std::string reason;

    friend bool operator==(const Reject&, const Reject&) = default;
};

struct ParseResult {
    std::vector<PatentRecord> records;
    std::vector<Reject> rejects;
    std::size_t rows_read = 0;
};

// Japanese fiscal year of an ISO date (YYYY-MM-DD); January..March belong
// to the previous year. Returns nullopt for malformed dates.
std::optional<int> fiscal_year_from_date(std::string_view iso_date);

// Throws DataError on a malformed header. Per-row failures become rejects.
ParseResult parse_records(std::string_view text, const RecordSchema& schema = {});
ParseResult parse_records(std::istream& in, const RecordSchema& schema = {});

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

enum class Scheme { Schmoch35, Ipc3 };

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view s);

struct Field {
    std::string label;
    std::string sector;

    friend bool operator==(const Field&, const Field&) = default;
};

// IPC prefix -> field table. Prefixes are a 3-character class ("G06"),
// a 4-character subclass ("G06F") or a subclass plus main group
// ("G01N33"); lookups take the longest matching prefix. The Ipc3 scheme
// needs no table: the category is the IPC class itself.
class Concordance {
public:
    static constexpr std::size_t kSchmochFieldCount = 35;

    // Built-in three-character IPC class scheme.
    static Concordance ipc3();

    // Columns: ipc_prefix, field_id, field_label, sector_label. Throws
    // DataError on malformed tables, conflicting prefixes, or a Schmoch
    // table that does not define exactly 35 fields.
    static Concordance load(std::istream& in, Scheme scheme, char delimiter = ',');
    static Concordance load_file(const std::string& path, Scheme scheme, char delimiter = ',');

    Scheme scheme() const noexcept { return scheme_; }

    // Field id for an IPC code, or nullopt when no prefix matches.
    std::optional<std::string> lookup(std::string_view ipc) const;

    // Field metadata. For Ipc3 the label is the class and the sector is
    // the IPC section title.
    std::optional<Field> field(std::string_view field_id) const;
    std::string sector_of(std::string_view field_id) const;

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
    const std::map<std::string, Field>& fields() const noexcept { return fields_; }

private:
    Scheme scheme_ = Scheme::Ipc3;
    std::map<std::string, std::string> entries_;
    std::map<std::string, Field> fields_;
};

// Removes whitespace and upper-cases, e.g. "g06f 17/30" -> "G06F17/30".
std::string normalize_ipc(std::string_view ipc);

// Category for one record; nullopt means "unmapped IPC".
std::optional<std::string> map_classification(const PatentRecord& record,
                                              const Concordance& scheme);

struct ClassifyResult {
    std::vector<PatentRecord> mapped;
    std::vector<Reject> rejects;
};

// Splits records into mapped ones and "unmapped IPC" rejects.
ClassifyResult classify_records(std::vector<PatentRecord> records, const Concordance& scheme);

// ---------------------------------------------------------------------------
// Weight matrices
// ---------------------------------------------------------------------------

enum class Level { Corporate, Regional };

std::string_view to_string(Level l);
std::optional<Level> parse_level(std::string_view s);

struct Window {
    int start = 1981;
    int end = 2010;

    int width() const noexcept { return end - start + 1; }
    std::string label() const;

    friend bool operator==(const Window&, const Window&) = default;
};

struct MatrixMeta {
    Level level = Level::Corporate;
    Scheme scheme = Scheme::Schmoch35;
    Window window;

    friend bool operator==(const MatrixMeta&, const MatrixMeta&) = default;
};

// Actor x category fractional patent counts. Actors and categories are
// kept in lexicographic order.
struct WeightMatrix {
    std::vector<std::string> actors;
    std::vector<std::string> categories;
    CsrMatrix weights;
    // Number of patents each actor appears on (the count-rank filter key).
    std::vector<double> record_counts;
    MatrixMeta meta;
    // Regional level only: weight attributed to the unknown region.
    double excluded_weight = 0.0;
    std::size_t excluded_records = 0;

    double total_weight() const { return weights.total(); }
};

inline constexpr std::string_view kUnknownRegion = "unknown";

struct AllocationOptions {
    // Recorded in the matrix metadata; defaults to the records' year span.
    std::optional<Window> window;
    // When set, only these corporations receive weight. At regional level
    // a patent then carries the retained assignees' share, split equally
    // over their distinct regions.
    const std::unordered_set<std::string>* retained_actors = nullptr;
};

// Each patent adds 1/|assignees| to each assignee in its single category
// (corporate), or 1/|distinct regions| to each region (regional). Throws
// DataError if a record has no mapping under `scheme`.
WeightMatrix allocate_weights(std::span<const PatentRecord> records, const Concordance& scheme,
                              Level level, const AllocationOptions& options = {});

enum class RankBy { Weight, Count };

struct FilterReport {
    WeightMatrix matrix;
    std::size_t actors_before = 0;
    std::size_t actors_retained = 0;
    // Row total of the marginal (last retained) actor.
    double cutoff_value = 0.0;
    double retained_weight_fraction = 0.0;
    std::vector<std::string> dropped_categories;
};

// Keeps the top ceil(share * actors) actors by row weight (or patent
// count), plus everything tied with the marginal actor.
FilterReport filter_top_share(const WeightMatrix& w, double share, RankBy rank_by = RankBy::Weight);

// Rows restricted to `actors`; categories left empty are dropped.
WeightMatrix restrict_actors(const WeightMatrix& w, const std::unordered_set<std::string>& actors);

std::vector<PatentRecord> window_records(std::span<const PatentRecord> records, Window window);

// Windows [s, s+width-1] for s = span.start, span.start+step, ... that fit
// inside span.
std::vector<Window> rolling_windows(Window span, int width, int step);

// Each corporation's most frequent known region over its records; ties go
// to the lexicographically smallest region.
std::map<std::string, std::string> actor_home_regions(std::span<const PatentRecord> records);

}  // namespace tcx
