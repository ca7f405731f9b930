#pragma once

// Remote registry of preprocessed datasets.
//
// Manifest wire format (schema_version 1):
//   {"schema_version": 1,
//    "entries": [{"dataset_name": "...", "description": "...",
//                 "download_url": "https://.../x.hds", "checksum": "<sha256 hex>",
//                 "subsets": [{"name": "...", "finetuned": false, "uses_answer": true,
//                              "num_questions": 0, "num_hints": 0}]}]}
//
// Cache layout under the cache dir:
//   registry.json            last fetched manifest, plus "fetched_at"
//   datasets/<name>.hds      verified archives
//   datasets/<name>.lock     per-entry download lock

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hintkit/model.hpp"
#include "hintkit/remote.hpp"

namespace hintkit {

struct RegistrySubset {
  std::string name;
  bool finetuned = false;
  bool uses_answer = false;
  std::int64_t num_questions = 0;
  std::int64_t num_hints = 0;
  bool operator==(const RegistrySubset&) const = default;
};

struct RegistryEntry {
  std::string dataset_name;
  std::vector<RegistrySubset> subsets;
  std::string download_url;
  std::string checksum;  // lowercase SHA-256 hex of the archive bytes
  std::string description;
  bool operator==(const RegistryEntry&) const = default;
};

struct RegistryManifest {
  int schema_version = 1;
  std::vector<RegistryEntry> entries;
  std::string fetched_at;  // ISO-8601 UTC, empty when never cached

  const RegistryEntry* find(std::string_view dataset_name) const;
};

inline constexpr int kManifestSchemaVersion = 1;

/// Throws ManifestSchemaError with a JSON pointer path.
RegistryManifest parse_manifest(std::string_view json_text);
std::string serialize_manifest(const RegistryManifest& manifest);

struct RegistryOptions {
  std::string registry_url;                   // empty: HINTKIT_REGISTRY_URL
  std::shared_ptr<HttpTransport> transport;  // null: default transport
  RetryPolicy retry;
  Sleeper sleep;
};

/// HINTKIT_CACHE_DIR, else $XDG_CACHE_HOME/hintkit, else ~/.cache/hintkit.
std::filesystem::path default_cache_dir();

/// With update=false a cached manifest is returned when present. Otherwise the
/// manifest is fetched and cached; if that fails, a cached copy is returned
/// with a warning, and NetworkError is raised only when there is none.
RegistryManifest available_datasets(bool update, const std::filesystem::path& cache_dir,
                                    const RegistryOptions& options = {});

/// Serves a verified cached archive or downloads, verifies and caches it.
/// A checksum failure leaves nothing behind in the cache.
Dataset download_dataset(std::string_view name, const std::filesystem::path& cache_dir,
                         const RegistryOptions& options = {});

std::filesystem::path cached_archive_path(const std::filesystem::path& cache_dir, std::string_view name);

}  // namespace hintkit
