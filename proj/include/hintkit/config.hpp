#pragma once

// Run settings merged from a config file, the environment and CLI flags
// (flags win over env, env over the file).
//
// The file is TOML-style "key = value" lines with optional [section] headers;
// '#' starts a comment, string values may be double-quoted. Keys:
//
//   cache_dir, offline
//   [chat]        url, key, model
//   [embed]       url, key, model
//   [ner]         url, key
//   [scorer]      specificity_url, regression_url, key
//   [registry]    url
//   [generation]  num_hints, temperature, max_regeneration_rounds, prompt_file, seed, workers
//   [evaluate]    metrics, freq_table, vectors, linear_scorer, workers, pageview_window_days
//   [readability] flesch_easy, flesch_medium, grade_easy, grade_medium
//
// Environment: HINTKIT_CHAT_URL, HINTKIT_CHAT_KEY, HINTKIT_CHAT_MODEL,
// HINTKIT_EMBED_URL, HINTKIT_EMBED_KEY, HINTKIT_EMBED_MODEL, HINTKIT_NER_URL,
// HINTKIT_REGISTRY_URL, HINTKIT_CACHE_DIR, HINTKIT_OFFLINE, HINTKIT_CONFIG.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "hintkit/metrics/readability.hpp"

namespace hintkit {

struct EndpointSettings {
  std::string url;
  std::string key;
  std::string model = "default";
};

struct RunConfig {
  EndpointSettings chat;
  EndpointSettings embed;
  EndpointSettings ner;
  std::string specificity_url;
  std::string regression_url;
  std::string scorer_key;
  std::string registry_url;
  std::filesystem::path cache_dir;
  bool offline = false;

  int num_hints = 5;
  double temperature = 0.7;
  int max_regeneration_rounds = 2;
  std::filesystem::path prompt_file;
  std::optional<std::int64_t> seed;
  std::size_t generation_workers = 4;

  std::string metrics;  // comma list; empty means the CLI default
  std::filesystem::path freq_table;
  std::filesystem::path vectors;
  std::filesystem::path linear_scorer;
  std::size_t evaluation_workers = 4;
  int pageview_window_days = 30;
  ReadabilityBands bands;
};

/// "section.key" -> raw value. Throws ConfigError(line).
std::map<std::string, std::string> parse_config_text(std::string_view text);

/// Throws ConfigError for unknown keys or bad values.
void apply_config_values(RunConfig& config, const std::map<std::string, std::string>& values);
void apply_environment(RunConfig& config);

/// ~/.config/hintkit/config.toml (or $XDG_CONFIG_HOME/hintkit/config.toml).
std::filesystem::path default_config_path();

/// Defaults, then the config file (explicit path, else HINTKIT_CONFIG, else
/// the default path when it exists), then the environment.
RunConfig load_run_config(const std::optional<std::filesystem::path>& explicit_path);

}  // namespace hintkit
