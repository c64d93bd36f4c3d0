#pragma once

// File formats. Matrices are CSV, row-major, one row per line, no header.
// Signals and index sets are JSON; indices are 1-based on disk.

#include <filesystem>
#include <string>

#include "json.hpp"
#include "wl1/model.hpp"

namespace wl1 {

using Json = nlohmann::json;

/// Shortest round-trip decimal representation; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double value);

Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// Reads a vector stored as a single CSV row or a single CSV column.
Vector read_vector_csv(const std::filesystem::path& path);
void write_vector_csv(const std::filesystem::path& path, const Vector& v);

/// {"n": N, "entries": [...]}
Json signal_to_json(const Vector& x);
Vector signal_from_json(const Json& j);

/// {"indices": [...]} with 1-based indices.
Json index_set_to_json(const IndexSet& s);
IndexSet index_set_from_json(const Json& j);

/// Accepts either explicit weights {"n", "entries"} or
/// {"n": N, "omega": w, "indices": [...]} describing a support estimate.
WeightVector weights_from_json(const Json& j);
Json weights_to_json(const WeightVector& w);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace wl1
