#include <array>
#include <cctype>
#include <fstream>
#include <iterator>

#include "tcx/error.hpp"
#include "tcx/ingest.hpp"
#include "text.hpp"

namespace tcx {

namespace {

constexpr std::array<std::string_view, 8> kSectionTitles = {
    "Human necessities",
    "Performing operations; transporting",
    "Chemistry; metallurgy",
    "Textiles; paper",
    "Fixed constructions",
    "Mechanical engineering; lighting; heating; weapons; blasting",
    "Physics",
    "Electricity",
};

bool is_section(char c) { return c >= 'A' && c <= 'H'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

bool is_class(std::string_view s) {
    return s.size() >= 3 && is_section(s[0]) && is_digit(s[1]) && is_digit(s[2]);
}

// Valid table prefixes: "G06", "G06F", "G01N33".
bool is_valid_prefix(std::string_view p) {
    if (!is_class(p)) return false;
    if (p.size() == 3) return true;
    if (!is_upper(p[3])) return false;
    for (std::size_t i = 4; i < p.size(); ++i) {
        if (!is_digit(p[i])) return false;
    }
    return true;
}

}  // namespace

std::string_view to_string(Scheme s) {
    return s == Scheme::Schmoch35 ? "schmoch35" : "ipc3";
}

std::optional<Scheme> parse_scheme(std::string_view s) {
    if (s == "schmoch35") return Scheme::Schmoch35;
    if (s == "ipc3") return Scheme::Ipc3;
    return std::nullopt;
}

std::string normalize_ipc(std::string_view ipc) {
    std::string out;
    out.reserve(ipc.size());
    for (char c : ipc) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return out;
}

Concordance Concordance::ipc3() {
    Concordance c;
    c.scheme_ = Scheme::Ipc3;
    return c;
}

Concordance Concordance::load(std::istream& in, Scheme scheme, char delimiter) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    Concordance c;
    c.scheme_ = scheme;

    bool header = true;
    std::size_t col_prefix = 0, col_id = 0, col_label = 0, col_sector = 0, n_cols = 0;
    std::vector<std::string_view> f;
    detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (detail::trim(line).empty() || detail::trim(line).starts_with('#')) return;
        detail::split(line, delimiter, f);
        const auto where = "concordance line " + std::to_string(line_no) + ": ";
        if (header) {
            header = false;
            n_cols = f.size();
            std::map<std::string, std::size_t, std::less<>> idx;
            for (std::size_t i = 0; i < f.size(); ++i) idx.emplace(std::string(detail::trim(f[i])), i);
            auto need = [&](std::string_view name) {
                const auto it = idx.find(name);
                if (it == idx.end()) {
                    throw DataError("malformed concordance header: missing column '" +
                                    std::string(name) + "'");
                }
                return it->second;
            };
            col_prefix = need("ipc_prefix");
            col_id = need("field_id");
            col_label = need("field_label");
            col_sector = need("sector_label");
            return;
        }
        if (f.size() != n_cols) throw DataError(where + "wrong field count");

        const auto prefix = normalize_ipc(f[col_prefix]);
        const std::string id(detail::trim(f[col_id]));
        Field field{std::string(detail::trim(f[col_label])), std::string(detail::trim(f[col_sector]))};
        if (!is_valid_prefix(prefix)) throw DataError(where + "invalid IPC prefix '" + prefix + "'");
        if (id.empty()) throw DataError(where + "empty field_id");

        const auto [eit, fresh] = c.entries_.emplace(prefix, id);
        if (!fresh && eit->second != id) {
            throw DataError(where + "prefix '" + prefix + "' maps to both '" + eit->second +
                            "' and '" + id + "'");
        }
        const auto [fit, new_field] = c.fields_.emplace(id, field);
        if (!new_field && fit->second != field) {
            throw DataError(where + "field '" + id + "' redefined with a different label");
        }
    });

    if (header) throw DataError("malformed concordance: missing header");
    if (scheme == Scheme::Schmoch35 && c.fields_.size() != kSchmochFieldCount) {
        throw DataError("Schmoch concordance must define exactly 35 fields, found " +
                        std::to_string(c.fields_.size()));
    }
    return c;
}

Concordance Concordance::load_file(const std::string& path, Scheme scheme, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open concordance '" + path + "'");
    return load(in, scheme, delimiter);
}

std::optional<std::string> Concordance::lookup(std::string_view ipc) const {
    const auto code = normalize_ipc(ipc);
    if (!is_class(code)) return std::nullopt;
    if (scheme_ == Scheme::Ipc3) return code.substr(0, 3);

    if (code.size() >= 4 && is_upper(code[3])) {
        // Subclass + main group, e.g. "G01N33/483" -> "G01N33".
        std::size_t end = 4;
        while (end < code.size() && is_digit(code[end])) ++end;
        if (end > 4) {
            if (const auto it = entries_.find(code.substr(0, end)); it != entries_.end()) {
                return it->second;
            }
        }
        if (const auto it = entries_.find(code.substr(0, 4)); it != entries_.end()) return it->second;
    }
    if (const auto it = entries_.find(code.substr(0, 3)); it != entries_.end()) return it->second;
    return std::nullopt;
}

std::optional<Field> Concordance::field(std::string_view field_id) const {
    if (scheme_ == Scheme::Ipc3) {
        if (field_id.size() != 3 || !is_class(field_id)) return std::nullopt;
        return Field{std::string(field_id),
                     std::string(kSectionTitles[static_cast<std::size_t>(field_id[0] - 'A')])};
    }
    const auto it = fields_.find(std::string(field_id));
    if (it == fields_.end()) return std::nullopt;
    return it->second;
}

std::string Concordance::sector_of(std::string_view field_id) const {
    const auto f = field(field_id);
    return f ? f->sector : std::string{};
}

std::optional<std::string> map_classification(const PatentRecord& record, const Concordance& scheme) {
    if (record.primary_ipc.empty()) return std::nullopt;
    return scheme.lookup(record.primary_ipc);
}

ClassifyResult classify_records(std::vector<PatentRecord> records, const Concordance& scheme) {
    ClassifyResult out;
    out.mapped.reserve(records.size());
    for (auto& r : records) {
        if (map_classification(r, scheme)) {
            out.mapped.push_back(std::move(r));
        } else {
            out.rejects.push_back({r.source_row, "unmapped IPC '" + r.primary_ipc + "'"});
        }
    }
    return out;
}

}  // namespace tcx
