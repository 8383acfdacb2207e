#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tcx::synthetic {

// Parameters of a generated patent corpus. Actors draw record counts from
// a Zipf law; each actor can reach the categories up to a random
// capability level, so the specialization network comes out nested.
struct CorpusSpec {
    std::size_t records = 1000;
    std::size_t actors = 100;
    std::size_t categories = 10;  // at most ipc_codes().size()
    std::size_t regions = 3;
    int first_year = 1981;
    int last_year = 2010;
    std::uint64_t seed = 1;
    double zipf_exponent = 1.0;
    double coassign_probability = 0.1;
    // Probability of ignoring the capability bound for one record.
    double noise = 0.05;
    // The last `late_categories` categories only appear from `late_start_year`.
    std::size_t late_categories = 0;
    int late_start_year = 1996;
};

// Curated IPC subclasses, one per class, each mapped by the bundled
// Schmoch concordance. The first entries hit distinct fields.
const std::vector<std::string>& ipc_codes();

std::string region_name(std::size_t i);
std::string actor_name(std::size_t i);

// Record file with header patent_id,fiscal_year,assignees,assignee_regions,primary_ipc.
void write_corpus(std::ostream& out, const CorpusSpec& spec);
std::string corpus_csv(const CorpusSpec& spec);

}  // namespace tcx::synthetic
