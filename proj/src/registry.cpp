#include "hintkit/registry.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <set>

#include <spdlog/spdlog.h>

#include "hintkit/dataset_io.hpp"
#include "hintkit/digest.hpp"
#include "hintkit/error.hpp"

namespace hintkit {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::ManifestSchemaError, message, path);
}

const Json& field(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "/" + key, "missing field");
  return *it;
}

std::string string_field(const Json& obj, const char* key, const std::string& path) {
  const auto& v = field(obj, key, path);
  if (!v.is_string()) schema_error(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::int64_t count_field(const Json& obj, const char* key, const std::string& path) {
  const auto& v = field(obj, key, path);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    schema_error(path + "/" + key, "expected a non-negative integer");
  return v.get<std::int64_t>();
}

bool bool_field(const Json& obj, const char* key, const std::string& path) {
  const auto& v = field(obj, key, path);
  if (!v.is_boolean()) schema_error(path + "/" + key, "expected a boolean");
  return v.get<bool>();
}

std::string normalize_checksum(std::string checksum, const std::string& path) {
  std::transform(checksum.begin(), checksum.end(), checksum.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const bool hex = std::all_of(checksum.begin(), checksum.end(), [](unsigned char c) { return std::isxdigit(c); });
  if (checksum.size() != 64 || !hex) schema_error(path, "checksum must be 64 hex characters");
  return checksum;
}

std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string registry_url(const RegistryOptions& options) {
  if (!options.registry_url.empty()) return options.registry_url;
  if (const char* env = std::getenv("HINTKIT_REGISTRY_URL"); env && *env) return env;
  return {};
}

std::shared_ptr<HttpTransport> transport_for(const RegistryOptions& options) {
  return options.transport ? options.transport : make_default_transport();
}

std::string fetch(const RegistryOptions& options, const std::string& url) {
  HttpRequest req{"GET", url, {{"User-Agent", "hintkit/0.1"}}, {}};
  HttpResponse response;
  try {
    response = send_with_retry(*transport_for(options), req, options.retry, options.sleep ? options.sleep : real_sleeper(),
                               nullptr, nullptr);
  } catch (const Error& e) {
    throw Error(ErrorKind::NetworkError, e.what(), url);
  }
  if (response.status != 200) throw Error(ErrorKind::NetworkError, "HTTP " + std::to_string(response.status), url);
  return std::move(response.body);
}

bool valid_dataset_name(std::string_view name) {
  return !name.empty() && name != "." && name != ".." && name.find('/') == std::string_view::npos &&
         name.find('\\') == std::string_view::npos;
}

// Exclusive advisory lock held for the object's lifetime.
class FileLock {
 public:
  explicit FileLock(const fs::path& path) {
    fs::create_directories(path.parent_path());
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorKind::Io, "cannot open lock file", path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw Error(ErrorKind::Io, "cannot lock", path.string());
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace

const RegistryEntry* RegistryManifest::find(std::string_view dataset_name) const {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const RegistryEntry& e) { return e.dataset_name == dataset_name; });
  return it == entries.end() ? nullptr : &*it;
}

RegistryManifest parse_manifest(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    schema_error("", std::string("manifest is not valid JSON: ") + e.what());
  }
  RegistryManifest manifest;
  const auto& version = field(j, "schema_version", "");
  if (!version.is_number_integer()) schema_error("/schema_version", "expected an integer");
  manifest.schema_version = version.get<int>();
  if (manifest.schema_version != kManifestSchemaVersion)
    schema_error("/schema_version", "unsupported schema version " + std::to_string(manifest.schema_version));
  if (auto it = j.find("fetched_at"); it != j.end() && it->is_string()) manifest.fetched_at = it->get<std::string>();

  const auto& entries = field(j, "entries", "");
  if (!entries.is_array()) schema_error("/entries", "expected an array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto path = "/entries/" + std::to_string(i);
    const auto& e = entries[i];
    RegistryEntry entry;
    entry.dataset_name = string_field(e, "dataset_name", path);
    if (!valid_dataset_name(entry.dataset_name)) schema_error(path + "/dataset_name", "invalid dataset name");
    if (!names.insert(entry.dataset_name).second)
      schema_error(path + "/dataset_name", "duplicate dataset name \"" + entry.dataset_name + "\"");
    entry.download_url = string_field(e, "download_url", path);
    entry.checksum = normalize_checksum(string_field(e, "checksum", path), path + "/checksum");
    entry.description = e.contains("description") ? string_field(e, "description", path) : "";
    const auto& subsets = field(e, "subsets", path);
    if (!subsets.is_array()) schema_error(path + "/subsets", "expected an array");
    for (std::size_t k = 0; k < subsets.size(); ++k) {
      const auto sp = path + "/subsets/" + std::to_string(k);
      const auto& s = subsets[k];
      entry.subsets.push_back(RegistrySubset{string_field(s, "name", sp), bool_field(s, "finetuned", sp),
                                             bool_field(s, "uses_answer", sp), count_field(s, "num_questions", sp),
                                             count_field(s, "num_hints", sp)});
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

std::string serialize_manifest(const RegistryManifest& manifest) {
  nlohmann::ordered_json j;
  j["schema_version"] = manifest.schema_version;
  if (!manifest.fetched_at.empty()) j["fetched_at"] = manifest.fetched_at;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : manifest.entries) {
    nlohmann::ordered_json entry;
    entry["dataset_name"] = e.dataset_name;
    entry["description"] = e.description;
    entry["download_url"] = e.download_url;
    entry["checksum"] = e.checksum;
    entry["subsets"] = nlohmann::ordered_json::array();
    for (const auto& s : e.subsets)
      entry["subsets"].push_back({{"name", s.name},
                                  {"finetuned", s.finetuned},
                                  {"uses_answer", s.uses_answer},
                                  {"num_questions", s.num_questions},
                                  {"num_hints", s.num_hints}});
    j["entries"].push_back(std::move(entry));
  }
  return j.dump(2) + "\n";
}

fs::path default_cache_dir() {
  if (const char* env = std::getenv("HINTKIT_CACHE_DIR"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "hintkit";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "hintkit";
  return fs::temp_directory_path() / "hintkit-cache";
}

fs::path cached_archive_path(const fs::path& cache_dir, std::string_view name) {
  return cache_dir / "datasets" / (std::string(name) + ".hds");
}

RegistryManifest available_datasets(bool update, const fs::path& cache_dir, const RegistryOptions& options) {
  const auto cached_path = cache_dir / "registry.json";
  std::error_code ec;
  const bool have_cache = fs::exists(cached_path, ec);
  if (!update && have_cache) return parse_manifest(read_file(cached_path));

  const auto url = registry_url(options);
  try {
    if (url.empty()) throw Error(ErrorKind::NetworkError, "no registry URL configured (set HINTKIT_REGISTRY_URL)");
    auto manifest = parse_manifest(fetch(options, url));
    manifest.fetched_at = utc_now_iso8601();
    write_file_atomic(cached_path, serialize_manifest(manifest));
    return manifest;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NetworkError || !have_cache) throw;
    spdlog::warn("registry refresh failed ({}); using cached manifest", e.what());
    return parse_manifest(read_file(cached_path));
  }
}

Dataset download_dataset(std::string_view name, const fs::path& cache_dir, const RegistryOptions& options) {
  const auto manifest = available_datasets(false, cache_dir, options);
  const auto* entry = manifest.find(name);
  if (!entry) throw Error(ErrorKind::UnknownDataset, "dataset is not in the registry", std::string(name));

  const auto target = cached_archive_path(cache_dir, name);
  FileLock lock(cache_dir / "datasets" / (std::string(name) + ".lock"));

  std::error_code ec;
  if (fs::exists(target, ec)) {
    auto bytes = read_file(target);
    if (sha256_hex(bytes) == entry->checksum) return import_archive(bytes);
    spdlog::warn("cached archive for {} does not match the registry checksum; downloading again", name);
    fs::remove(target, ec);
  }

  const auto bytes = fetch(options, entry->download_url);
  const auto actual = sha256_hex(bytes);
  if (actual != entry->checksum)
    throw Error(ErrorKind::ChecksumMismatch, "expected " + entry->checksum + ", got " + actual, std::string(name));
  // Import before caching so a well-checksummed but unreadable archive is never kept.
  auto dataset = import_archive(bytes);
  write_file_atomic(target, bytes);
  return dataset;
}

}  // namespace hintkit
