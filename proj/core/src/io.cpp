#include "tcx/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tcx/error.hpp"
#include "text.hpp"

namespace tcx::io {

using json = nlohmann::ordered_json;

std::string format_number(double v) {
    if (std::isnan(v)) return "NA";
    if (v == 0.0) return "0";  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double round12(double v) {
    if (std::isnan(v) || std::isinf(v)) return v;
    return std::strtod(format_number(v).c_str(), nullptr);
}

namespace {

std::string format_exact(double v) {
    if (v == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json number_or_null(double v, bool rounded) {
    if (std::isnan(v)) return nullptr;
    return rounded ? round12(v) : v;
}

double number_from(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

// Quote-aware split of one delimited line.
std::vector<std::string> split_fields(std::string_view line, char delim) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back().push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back().push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            out.emplace_back();
        } else {
            out.back().push_back(c);
        }
    }
    return out;
}

}  // namespace

std::string csv_field(std::string_view s, char delimiter) {
    if (s.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string file_digest(const std::string& path) { return fnv1a_hex(read_file(path)); }

void write_file(const std::string& path, std::string_view contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + tmp.string() + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw DataError("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

std::string weight_matrix_csv(const WeightMatrix& w) {
    std::string out;
    out += "# level=" + std::string(to_string(w.meta.level)) + "\n";
    out += "# scheme=" + std::string(to_string(w.meta.scheme)) + "\n";
    out += "# window=" + w.meta.window.label() + "\n";
    out += "# excluded_weight=" + format_exact(w.excluded_weight) + "\n";
    out += "# excluded_records=" + std::to_string(w.excluded_records) + "\n";
    out += "actor,category,weight\n";
    for (std::size_t a = 0; a < w.actors.size(); ++a) {
        const auto idx = w.weights.row_indices(a);
        const auto val = w.weights.row_values(a);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            out += csv_field(w.actors[a]) + ',' + csv_field(w.categories[idx[k]]) + ',' +
                   format_exact(val[k]) + '\n';
        }
    }
    return out;
}

WeightMatrix parse_weight_matrix_csv(std::string_view text) {
    WeightMatrix w;
    std::map<std::string, Index> actors, cats;
    struct Entry {
        std::string actor, category;
        double weight;
    };
    std::vector<Entry> entries;
    bool header_seen = false;

    detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (detail::trim(line).empty()) return;
        if (line.starts_with('#')) {
            const auto body = detail::trim(line.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) return;
            const auto key = body.substr(0, eq);
            const std::string value(body.substr(eq + 1));
            if (key == "level") {
                const auto l = parse_level(value);
                if (!l) throw DataError("weight matrix: bad level '" + value + "'");
                w.meta.level = *l;
            } else if (key == "scheme") {
                const auto s = parse_scheme(value);
                if (!s) throw DataError("weight matrix: bad scheme '" + value + "'");
                w.meta.scheme = *s;
            } else if (key == "window") {
                const auto dash = value.find('-');
                try {
                    w.meta.window = {std::stoi(value.substr(0, dash)), std::stoi(value.substr(dash + 1))};
                } catch (const std::exception&) {
                    throw DataError("weight matrix: bad window '" + value + "'");
                }
            } else if (key == "excluded_weight") {
                w.excluded_weight = std::strtod(value.c_str(), nullptr);
            } else if (key == "excluded_records") {
                w.excluded_records = std::strtoull(value.c_str(), nullptr, 10);
            }
            return;
        }
        const auto f = split_fields(line, ',');
        if (!header_seen) {
            if (f.size() != 3 || f[0] != "actor" || f[1] != "category" || f[2] != "weight") {
                throw DataError("weight matrix: malformed header");
            }
            header_seen = true;
            return;
        }
        if (f.size() != 3) throw DataError("weight matrix line " + std::to_string(line_no) + ": bad row");
        char* end = nullptr;
        const double v = std::strtod(f[2].c_str(), &end);
        if (end == f[2].c_str() || !(v >= 0.0)) {
            throw DataError("weight matrix line " + std::to_string(line_no) + ": bad weight");
        }
        actors.emplace(f[0], 0);
        cats.emplace(f[1], 0);
        entries.push_back({f[0], f[1], v});
    });
    if (!header_seen) throw DataError("weight matrix: missing header");

    for (auto& [name, id] : actors) {
        id = static_cast<Index>(w.actors.size());
        w.actors.push_back(name);
    }
    for (auto& [name, id] : cats) {
        id = static_cast<Index>(w.categories.size());
        w.categories.push_back(name);
    }
    std::vector<CsrMatrix::Triplet> t;
    t.reserve(entries.size());
    for (const auto& e : entries) t.push_back({actors.at(e.actor), cats.at(e.category), e.weight});
    w.weights = CsrMatrix::from_triplets(w.actors.size(), w.categories.size(), std::move(t));
    w.record_counts.assign(w.actors.size(), 0.0);
    return w;
}

std::string rejects_csv(const std::vector<Reject>& rejects) {
    std::string out = "row_number,reason\n";
    for (const auto& r : rejects) out += std::to_string(r.row_number) + ',' + csv_field(r.reason) + '\n';
    return out;
}

std::string rta_csv(const RtaMatrix& rta) {
    std::string out = "actor,category,value\n";
    for (std::size_t a = 0; a < rta.actors.size(); ++a) {
        const auto idx = rta.values.row_indices(a);
        const auto val = rta.values.row_values(a);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            out += csv_field(rta.actors[a]) + ',' + csv_field(rta.categories[idx[k]]) + ',' +
                   format_number(val[k]) + '\n';
        }
    }
    return out;
}

std::string specialization_csv(const SpecializationMatrix& m) {
    std::string out = "actor,category,value\n";
    for (std::size_t a = 0; a < m.actor_count(); ++a) {
        for (Index t : m.categories_of(a)) {
            out += csv_field(m.actors()[a]) + ',' + csv_field(m.categories()[t]) + ",1\n";
        }
    }
    return out;
}

std::string result_csv(const ComplexityResult& r) {
    std::string out = "kind,id,metric,value\n";
    for (std::size_t t = 0; t < r.categories.size(); ++t) {
        const auto id = csv_field(r.categories[t]);
        out += "category," + id + ",tci," + format_number(r.tci[t]) + '\n';
        out += "category," + id + ",tci_scaled," + format_number(r.tci_scaled[t]) + '\n';
        out += "category," + id + ",ubiquity," + std::to_string(r.ubiquity[t]) + '\n';
        out += "category," + id + ",avg_diversity," + format_number(r.avg_diversity[t]) + '\n';
    }
    for (std::size_t a = 0; a < r.actors.size(); ++a) {
        const auto id = csv_field(r.actors[a]);
        out += "actor," + id + ",actor_index," + format_number(r.actor_index[a]) + '\n';
        out += "actor," + id + ",diversity," + std::to_string(r.diversity[a]) + '\n';
    }
    return out;
}

namespace {

json result_to_json(const ComplexityResult& r, bool rounded) {
    json doc;
    const auto& d = r.diagnostics;
    doc["diagnostics"] = {
        {"eigenvalue1", number_or_null(d.eigenvalue1, rounded)},
        {"eigenvalue2", number_or_null(d.eigenvalue2, rounded)},
        {"eigenvalue3", number_or_null(d.eigenvalue3, rounded)},
        {"spectral_gap", number_or_null(d.spectral_gap, rounded)},
        {"residual_norm", number_or_null(d.residual_norm, rounded)},
        {"iterations", d.iterations},
        {"component_count", d.component_count},
        {"method", d.method},
        {"sign_rule", d.sign_rule},
    };
    json cats = json::array();
    for (std::size_t t = 0; t < r.categories.size(); ++t) {
        cats.push_back({{"id", r.categories[t]},
                        {"tci", number_or_null(r.tci[t], rounded)},
                        {"tci_scaled", number_or_null(r.tci_scaled[t], rounded)},
                        {"ubiquity", r.ubiquity[t]},
                        {"avg_diversity", number_or_null(r.avg_diversity[t], rounded)}});
    }
    doc["categories"] = std::move(cats);
    json actors = json::array();
    for (std::size_t a = 0; a < r.actors.size(); ++a) {
        actors.push_back({{"id", r.actors[a]},
                          {"actor_index", number_or_null(r.actor_index[a], rounded)},
                          {"diversity", r.diversity[a]}});
    }
    doc["actors"] = std::move(actors);
    doc["absent_categories"] = r.absent_categories;
    doc["absent_actors"] = r.absent_actors;
    return doc;
}

}  // namespace

std::string result_json(const ComplexityResult& r, const MatrixMeta& meta) {
    json doc;
    doc["level"] = std::string(to_string(meta.level));
    doc["scheme"] = std::string(to_string(meta.scheme));
    doc["window"] = meta.window.label();
    const auto body = result_to_json(r, true);
    for (const auto& [k, v] : body.items()) doc[k] = v;
    return doc.dump(2) + "\n";
}

std::string result_cache_json(const ComplexityResult& r) { return result_to_json(r, false).dump() + "\n"; }

ComplexityResult parse_result_cache_json(std::string_view text) {
    ComplexityResult r;
    try {
        const auto doc = json::parse(text);
        const auto& d = doc.at("diagnostics");
        r.diagnostics.eigenvalue1 = number_from(d.at("eigenvalue1"));
        r.diagnostics.eigenvalue2 = number_from(d.at("eigenvalue2"));
        r.diagnostics.eigenvalue3 = number_from(d.at("eigenvalue3"));
        r.diagnostics.spectral_gap = number_from(d.at("spectral_gap"));
        r.diagnostics.residual_norm = number_from(d.at("residual_norm"));
        r.diagnostics.iterations = d.at("iterations").get<std::size_t>();
        r.diagnostics.component_count = d.at("component_count").get<std::size_t>();
        r.diagnostics.method = d.at("method").get<std::string>();
        r.diagnostics.sign_rule = d.at("sign_rule").get<std::string>();
        for (const auto& c : doc.at("categories")) {
            r.categories.push_back(c.at("id").get<std::string>());
            r.tci.push_back(number_from(c.at("tci")));
            r.tci_scaled.push_back(number_from(c.at("tci_scaled")));
            r.ubiquity.push_back(c.at("ubiquity").get<int>());
            r.avg_diversity.push_back(number_from(c.at("avg_diversity")));
        }
        for (const auto& a : doc.at("actors")) {
            r.actors.push_back(a.at("id").get<std::string>());
            r.actor_index.push_back(number_from(a.at("actor_index")));
            r.diversity.push_back(a.at("diversity").get<int>());
        }
        r.absent_categories = doc.at("absent_categories").get<std::vector<std::string>>();
        r.absent_actors = doc.at("absent_actors").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed result document: ") + e.what());
    }
    return r;
}

}  // namespace tcx::io
