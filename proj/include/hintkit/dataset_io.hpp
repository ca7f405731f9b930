#pragma once

// Canonical JSON and compressed archive formats for Dataset.
//
// Canonical JSON key order (fixed):
//   Dataset   name, version, url, description, metadata, subsets
//   Subset    name, metadata, instances        (instances keyed by q_id, sorted)
//   Instance  question, answers, hints, metadata
//   Question  text, question_type, entities, metrics, metadata
//   Answer    text, entities, metrics, metadata
//   Hint      text, source, entities, metrics, metadata
//   Entity    text, label, start_index, end_index
//   metrics   { name: {value, detail} }
// Output is indented by two spaces and ends with a newline. Unknown keys are
// rejected everywhere except inside metadata maps and metric details.
//
// Archive: the 8 bytes "HINTDS01" followed by gzip(canonical JSON).

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hintkit/model.hpp"

namespace hintkit {

struct Violation {
  std::string path;  // JSON pointer
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Empty iff every model invariant holds.
std::vector<Violation> validate_dataset(const Dataset& dataset);

/// Parses and checks JSON text, reporting schema problems, duplicate keys and
/// model violations as a list instead of throwing.
std::vector<Violation> validate_json(std::string_view text);

std::string export_json(const Dataset& dataset);
Dataset import_json(std::string_view text);

inline constexpr std::string_view kArchiveMagic = "HINTDS01";

std::string export_archive(const Dataset& dataset);
Dataset import_archive(std::string_view bytes);

bool looks_like_archive(std::string_view bytes) noexcept;

/// gzip helpers used by the archive format.
std::string gzip_compress(std::string_view data);
std::string gzip_decompress(std::string_view data);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Loads JSON or archive, detected by the magic prefix.
Dataset load_dataset(const std::filesystem::path& path);
/// ".json" extension selects JSON; anything else writes an archive.
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);

}  // namespace hintkit
