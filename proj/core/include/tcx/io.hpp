#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tcx/bipartite.hpp"
#include "tcx/complexity.hpp"
#include "tcx/ingest.hpp"

namespace tcx::io {

// 12 significant digits ("%.12g"); NaN prints as "NA".
std::string format_number(double v);

// Value as it reads back after format_number.
double round12(double v);

// Quotes a field when it holds the delimiter, a quote or a newline.
std::string csv_field(std::string_view s, char delimiter = ',');

// FNV-1a 64-bit, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string file_digest(const std::string& path);

std::string read_file(const std::string& path);
// Writes via a temporary and rename so readers never see partial files.
void write_file(const std::string& path, std::string_view contents);

// Long-format actor,category,weight with a "# key=value" metadata
// preamble. Weights use round-trip precision so a reloaded matrix gives
// bit-identical downstream results.
std::string weight_matrix_csv(const WeightMatrix& w);
WeightMatrix parse_weight_matrix_csv(std::string_view text);

std::string rejects_csv(const std::vector<Reject>& rejects);

// actor,category,value triples.
std::string rta_csv(const RtaMatrix& rta);
std::string specialization_csv(const SpecializationMatrix& m);

// category,metric,value rows (tci, tci_scaled, ubiquity, avg_diversity)
// followed by actor rows (actor_index, diversity) under kind "actor".
std::string result_csv(const ComplexityResult& r);

// Exported document, numbers at 12 significant digits.
std::string result_json(const ComplexityResult& r, const MatrixMeta& meta);

// Lossless cache form and its inverse.
std::string result_cache_json(const ComplexityResult& r);
ComplexityResult parse_result_cache_json(std::string_view text);

}  // namespace tcx::io
