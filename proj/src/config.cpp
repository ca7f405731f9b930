#include "hintkit/config.hpp"

#include <cctype>
#include <cstdlib>
#include <functional>

#include "hintkit/dataset_io.hpp"
#include "hintkit/error.hpp"
#include "hintkit/registry.hpp"

namespace hintkit {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Removes a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string unquote(std::string_view v, const std::string& where) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) {
        ++i;
        out += v[i] == 'n' ? '\n' : (v[i] == 't' ? '\t' : v[i]);
      } else {
        out += v[i];
      }
    }
    return out;
  }
  if (!v.empty() && v.front() == '"') throw Error(ErrorKind::ConfigError, "unterminated string", where);
  return std::string(v);
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off" || v.empty()) return false;
  throw Error(ErrorKind::ConfigError, "expected a boolean", key);
}

template <typename T>
T to_number(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    T out{};
    if constexpr (std::is_floating_point_v<T>)
      out = static_cast<T>(std::stod(v, &used));
    else
      out = static_cast<T>(std::stoll(v, &used));
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, "expected a number, got \"" + v + "\"", key);
  }
}

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::string section;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++lineno;
    const auto where = "line " + std::to_string(lineno);
    const auto line = trim(strip_comment(text.substr(start, end - start)));
    start = end + 1;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) throw Error(ErrorKind::ConfigError, "bad section header", where);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::ConfigError, "expected key = value", where);
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::ConfigError, "empty key", where);
    out[section.empty() ? std::string(key) : section + "." + std::string(key)] = unquote(trim(line.substr(eq + 1)), where);
  }
  return out;
}

void apply_config_values(RunConfig& c, const std::map<std::string, std::string>& values) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto str = [](std::string& field) -> Setter { return [&field](const std::string& v, const std::string&) { field = v; }; };
  auto path = [](fs::path& field) -> Setter { return [&field](const std::string& v, const std::string&) { field = v; }; };
  auto real = [](double& field) -> Setter {
    return [&field](const std::string& v, const std::string& k) { field = to_number<double>(v, k); };
  };
  auto integer = [](int& field) -> Setter {
    return [&field](const std::string& v, const std::string& k) { field = to_number<int>(v, k); };
  };
  auto count = [](std::size_t& field) -> Setter {
    return [&field](const std::string& v, const std::string& k) {
      const auto n = to_number<long long>(v, k);
      if (n < 1) throw Error(ErrorKind::ConfigError, "must be at least 1", k);
      field = static_cast<std::size_t>(n);
    };
  };

  const std::map<std::string, Setter> setters{
      {"cache_dir", path(c.cache_dir)},
      {"offline", [&c](const std::string& v, const std::string& k) { c.offline = to_bool(v, k); }},
      {"chat.url", str(c.chat.url)},
      {"chat.key", str(c.chat.key)},
      {"chat.model", str(c.chat.model)},
      {"embed.url", str(c.embed.url)},
      {"embed.key", str(c.embed.key)},
      {"embed.model", str(c.embed.model)},
      {"ner.url", str(c.ner.url)},
      {"ner.key", str(c.ner.key)},
      {"scorer.specificity_url", str(c.specificity_url)},
      {"scorer.regression_url", str(c.regression_url)},
      {"scorer.key", str(c.scorer_key)},
      {"registry.url", str(c.registry_url)},
      {"generation.num_hints", integer(c.num_hints)},
      {"generation.temperature", real(c.temperature)},
      {"generation.max_regeneration_rounds", integer(c.max_regeneration_rounds)},
      {"generation.prompt_file", path(c.prompt_file)},
      {"generation.seed",
       [&c](const std::string& v, const std::string& k) { c.seed = to_number<std::int64_t>(v, k); }},
      {"generation.workers", count(c.generation_workers)},
      {"evaluate.metrics", str(c.metrics)},
      {"evaluate.freq_table", path(c.freq_table)},
      {"evaluate.vectors", path(c.vectors)},
      {"evaluate.linear_scorer", path(c.linear_scorer)},
      {"evaluate.workers", count(c.evaluation_workers)},
      {"evaluate.pageview_window_days", integer(c.pageview_window_days)},
      {"readability.flesch_easy", real(c.bands.flesch_easy)},
      {"readability.flesch_medium", real(c.bands.flesch_medium)},
      {"readability.grade_easy", real(c.bands.grade_easy)},
      {"readability.grade_medium", real(c.bands.grade_medium)},
  };
  for (const auto& [key, value] : values) {
    auto it = setters.find(key);
    if (it == setters.end()) throw Error(ErrorKind::ConfigError, "unknown setting", key);
    it->second(value, key);
  }
  if (c.num_hints < 1) throw Error(ErrorKind::ConfigError, "must be at least 1", "generation.num_hints");
  if (c.max_regeneration_rounds < 0)
    throw Error(ErrorKind::ConfigError, "must be >= 0", "generation.max_regeneration_rounds");
  if (c.pageview_window_days < 1) throw Error(ErrorKind::ConfigError, "must be at least 1", "evaluate.pageview_window_days");
}

void apply_environment(RunConfig& c) {
  if (auto v = env("HINTKIT_CHAT_URL")) c.chat.url = v;
  if (auto v = env("HINTKIT_CHAT_KEY")) c.chat.key = v;
  if (auto v = env("HINTKIT_CHAT_MODEL")) c.chat.model = v;
  if (auto v = env("HINTKIT_EMBED_URL")) c.embed.url = v;
  if (auto v = env("HINTKIT_EMBED_KEY")) c.embed.key = v;
  if (auto v = env("HINTKIT_EMBED_MODEL")) c.embed.model = v;
  if (auto v = env("HINTKIT_NER_URL")) c.ner.url = v;
  if (auto v = env("HINTKIT_REGISTRY_URL")) c.registry_url = v;
  if (auto v = env("HINTKIT_CACHE_DIR")) c.cache_dir = v;
  if (auto v = env("HINTKIT_OFFLINE")) c.offline = to_bool(v, "HINTKIT_OFFLINE");
}

fs::path default_config_path() {
  if (auto xdg = env("XDG_CONFIG_HOME")) return fs::path(xdg) / "hintkit" / "config.toml";
  if (auto home = env("HOME")) return fs::path(home) / ".config" / "hintkit" / "config.toml";
  return {};
}

RunConfig load_run_config(const std::optional<fs::path>& explicit_path) {
  RunConfig config;
  std::optional<fs::path> file = explicit_path;
  if (!file) {
    if (auto v = env("HINTKIT_CONFIG")) {
      file = fs::path(v);
    } else {
      std::error_code ec;
      const auto def = default_config_path();
      if (!def.empty() && fs::exists(def, ec)) file = def;
    }
  }
  if (file) {
    try {
      apply_config_values(config, parse_config_text(read_file(*file)));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ConfigError) throw;
      throw Error(ErrorKind::ConfigError, std::string(e.what()), file->string());
    }
  }
  apply_environment(config);
  if (config.cache_dir.empty()) config.cache_dir = default_cache_dir();
  return config;
}

}  // namespace hintkit
