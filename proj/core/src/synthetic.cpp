#include "tcx/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

#include "tcx/error.hpp"

namespace tcx::synthetic {

namespace {

// Uniform in [0, 1) from the top 53 bits; avoids the library-specific
// behaviour of std::uniform_real_distribution.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(uniform(rng) * static_cast<double>(n)));
}

class Discrete {
public:
    explicit Discrete(const std::vector<double>& weights) : cumulative_(weights.size()) {
        double s = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) cumulative_[i] = s += weights[i];
    }
    std::size_t operator()(std::mt19937_64& rng) const {
        const double x = uniform(rng) * cumulative_.back();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
        return std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
    }

private:
    std::vector<double> cumulative_;
};

}  // namespace

const std::vector<std::string>& ipc_codes() {
    static const std::vector<std::string> codes = {
        "A01H", "A21B", "A24B", "A41H", "A47B", "A61B", "A62C", "B01B", "B05C", "B21B", "B22C", "B25J",
        "B60B", "B81B", "C05B", "C07B", "C08B", "C12M", "E01B", "F01B", "F15B", "F21H", "F22B", "G01B",
        "G02B", "G05B", "G06C", "G08C", "G09F", "H01L", "H03B", "H04L", "A22B", "A23B", "A42B", "A43D",
        "A44B", "A45B", "A46D", "A63B", "B02C", "B03B", "B04B", "B06B", "B07B", "B08B", "B09B", "B23B",
        "B24B", "B26B", "B27B", "B28B", "B29B", "B30B", "B31B", "B32B", "B33Y", "B41B", "B42B", "B43K",
        "B44B", "B61B", "B62B", "B63B", "B64B", "B65F", "B66B", "B68B", "B82B", "C01B", "C02F", "C03C",
        "C04B", "C06B", "C09B", "C10B", "C11B", "C13B", "C14C", "C21B", "C22B", "C23C", "C25B", "C30B",
        "C40B", "D01B", "D02G", "D03C", "D04B", "D05B", "D06B", "D07B", "D21B", "E02B", "E03B", "E04B",
        "E05B", "E06B", "E21B", "F02B", "F03B", "F04B", "F16B", "F17B", "F23G", "F24B", "F25J", "F26B",
        "F27B", "F28B", "F41A", "F42B", "G03B", "G04B", "G07B", "G10L", "G11B", "G12B", "G21B", "H02B",
        "H05B", "A99Z", "B99Z", "C99Z",
    };
    return codes;
}

std::string region_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "region%02zu", i + 1);
    return buf;
}

std::string actor_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "corp%06zu", i + 1);
    return buf;
}

void write_corpus(std::ostream& out, const CorpusSpec& spec) {
    const auto& codes = ipc_codes();
    if (spec.categories == 0 || spec.categories > codes.size()) {
        throw ArgumentError("synthetic: categories must be in [1, " + std::to_string(codes.size()) + "]");
    }
    if (spec.actors == 0 || spec.regions == 0) throw ArgumentError("synthetic: need at least one actor and region");
    if (spec.last_year < spec.first_year) throw ArgumentError("synthetic: inverted year range");
    if (spec.late_categories >= spec.categories) throw ArgumentError("synthetic: too many late categories");

    std::mt19937_64 rng(spec.seed);
    const std::size_t n_cat = spec.categories;
    const std::size_t n_early = n_cat - spec.late_categories;

    std::vector<double> size(spec.actors);
    for (std::size_t a = 0; a < spec.actors; ++a) {
        size[a] = 1.0 / std::pow(static_cast<double>(a + 1), spec.zipf_exponent);
    }
    const Discrete actor_draw(size);

    // Capability: number of reachable categories, at least one. Larger
    // actors tend to reach further.
    std::vector<std::size_t> reach(spec.actors);
    std::vector<std::size_t> home(spec.actors);
    for (std::size_t a = 0; a < spec.actors; ++a) {
        const double rank = static_cast<double>(a) / static_cast<double>(spec.actors);
        const double level = std::max(uniform(rng), 1.0 - rank) * 0.85 + 0.15;
        reach[a] = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(level * n_cat)), 1, n_cat);
        home[a] = pick(rng, spec.regions);
    }

    const int years = spec.last_year - spec.first_year + 1;
    out << "patent_id,fiscal_year,assignees,assignee_regions,primary_ipc\n";
    std::string line;
    for (std::size_t r = 0; r < spec.records; ++r) {
        const int year = spec.first_year + static_cast<int>(pick(rng, static_cast<std::size_t>(years)));
        const std::size_t a = actor_draw(rng);
        std::size_t t = uniform(rng) < spec.noise ? pick(rng, n_cat) : pick(rng, reach[a]);
        if (t >= n_early && year < spec.late_start_year) t %= n_early;

        std::vector<std::size_t> owners{a};
        if (uniform(rng) < spec.coassign_probability && spec.actors > 1) {
            std::size_t b = actor_draw(rng);
            if (b == a) b = (a + 1) % spec.actors;
            owners.push_back(b);
        }

        char id[32];
        std::snprintf(id, sizeof id, "P%09zu", r + 1);
        line.assign(id);
        line += ',';
        line += std::to_string(year);
        line += ',';
        for (std::size_t i = 0; i < owners.size(); ++i) {
            if (i) line += '|';
            line += actor_name(owners[i]);
        }
        line += ',';
        for (std::size_t i = 0; i < owners.size(); ++i) {
            if (i) line += '|';
            line += region_name(home[owners[i]]);
        }
        line += ',';
        line += codes[t];
        line += " 1/00\n";
        out << line;
    }
}

std::string corpus_csv(const CorpusSpec& spec) {
    std::ostringstream s;
    write_corpus(s, spec);
    return s.str();
}

}  // namespace tcx::synthetic
