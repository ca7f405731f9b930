#include <doctest.h>

#include <atomic>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "check.hpp"
#include "hintkit/dataset_io.hpp"
#include "hintkit/digest.hpp"
#include "hintkit/http.hpp"
#include "hintkit/registry.hpp"
#include "support.hpp"

using namespace hintkit;
using namespace hintkit::test;

namespace {

RegistryOptions options_for(const std::string& url) {
  RegistryOptions o;
  o.registry_url = url;
  o.transport = std::make_shared<HttplibTransport>();
  o.retry.max_attempts = 2;
  o.sleep = [](std::chrono::milliseconds) {};
  return o;
}

// The fixture manifest pointed at `base`, with TriviaHG carrying `checksum`.
std::string manifest_for(const std::string& base, const std::string& checksum) {
  auto j = Json::parse(read_file(data_dir() / "manifest.json"));
  for (auto& e : j["entries"]) e["download_url"] = base + "/files/" + e["dataset_name"].get<std::string>() + ".hds";
  j["entries"][0]["checksum"] = checksum;
  return j.dump();
}

// Serves the manifest and the fixture archive; `flip` corrupts one byte of the archive.
struct RegistryStub {
  StubServer server;
  std::string archive = export_archive(load_fixture());
  std::atomic<bool> flip{false};
  std::atomic<bool> down{false};
  std::atomic<int> archive_hits{0};

  RegistryStub() {
    server.get("/manifest.json", [this](const httplib::Request&, httplib::Response& res) {
      if (down) {
        res.status = 404;
        return;
      }
      res.set_content(manifest_for(server.url(), sha256_hex(archive)), "application/json");
    });
    server.get("/files/TriviaHG.hds", [this](const httplib::Request&, httplib::Response& res) {
      ++archive_hits;
      auto bytes = archive;
      if (flip) bytes[bytes.size() / 2] ^= 0x01;
      res.set_content(bytes, "application/octet-stream");
    });
    server.start();
  }
  std::string manifest_url() const { return server.url() + "/manifest.json"; }
};

}  // namespace

TEST_CASE("fixture manifest parses with the published subset sizes") {
  const auto m = parse_manifest(read_file(data_dir() / "manifest.json"));
  CHECK(m.schema_version == 1);
  REQUIRE(m.entries.size() == 2);
  const auto* trivia = m.find("TriviaHG");
  REQUIRE(trivia != nullptr);
  REQUIRE(trivia->subsets.size() == 3);
  const auto& training = trivia->subsets[0];
  CHECK(training.name == "training");
  CHECK_FALSE(training.finetuned);
  CHECK(training.uses_answer);
  CHECK(training.num_questions == 14645);
  CHECK(training.num_hints == 140973);
  CHECK(m.find("KG-Hint")->subsets[0].num_hints == 307);
  CHECK(m.find("nope") == nullptr);

  const auto again = parse_manifest(serialize_manifest(m));
  CHECK(again.entries == m.entries);
}

TEST_CASE("manifest schema errors carry a path") {
  const auto base = Json::parse(read_file(data_dir() / "manifest.json"));
  auto expect = [](const Json& j, const std::string& path) {
    try {
      parse_manifest(j.dump());
      FAIL("expected ManifestSchemaError at " << path);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ManifestSchemaError);
      CHECK(e.path() == path);
    }
  };
  CHECK_ERROR_KIND(parse_manifest("{not json"), ErrorKind::ManifestSchemaError);

  auto j = base;
  j["schema_version"] = 2;
  expect(j, "/schema_version");
  j = base;
  j.erase("entries");
  expect(j, "/entries");
  j = base;
  j["entries"][1]["dataset_name"] = "TriviaHG";
  CHECK_ERROR_KIND(parse_manifest(j.dump()), ErrorKind::ManifestSchemaError);
  j = base;
  j["entries"][0]["subsets"][0]["num_hints"] = -1;
  expect(j, "/entries/0/subsets/0/num_hints");
  j = base;
  j["entries"][0]["subsets"][1]["finetuned"] = "no";
  expect(j, "/entries/0/subsets/1/finetuned");
  j = base;
  j["entries"][0]["checksum"] = "abc";
  CHECK_ERROR_KIND(parse_manifest(j.dump()), ErrorKind::ManifestSchemaError);
  j = base;
  j["entries"][0]["dataset_name"] = "../escape";
  CHECK_ERROR_KIND(parse_manifest(j.dump()), ErrorKind::ManifestSchemaError);
}

TEST_CASE("download verifies, caches and reloads") {
  RegistryStub stub;
  TempDir cache;
  const auto opts = options_for(stub.manifest_url());

  const auto manifest = available_datasets(true, cache.path(), opts);
  CHECK_FALSE(manifest.fetched_at.empty());
  CHECK(manifest.find("TriviaHG")->subsets[0].num_questions == 14645);
  CHECK(fs::exists(cache / "registry.json"));

  const auto d = download_dataset("TriviaHG", cache.path(), opts);
  CHECK(export_json(d) == export_json(load_fixture()));
  CHECK(fs::exists(cached_archive_path(cache.path(), "TriviaHG")));
  CHECK(stub.archive_hits == 1);

  // Served from cache the second time.
  const auto again = download_dataset("TriviaHG", cache.path(), opts);
  CHECK(export_json(again) == export_json(d));
  CHECK(stub.archive_hits == 1);

  CHECK_ERROR_KIND(download_dataset("Nope", cache.path(), opts), ErrorKind::UnknownDataset);
}

TEST_CASE("a flipped byte is rejected and nothing is cached") {
  RegistryStub stub;
  stub.flip = true;
  TempDir cache;
  const auto opts = options_for(stub.manifest_url());
  CHECK_ERROR_KIND(download_dataset("TriviaHG", cache.path(), opts), ErrorKind::ChecksumMismatch);
  CHECK_FALSE(fs::exists(cached_archive_path(cache.path(), "TriviaHG")));

  stub.flip = false;
  CHECK_NOTHROW(download_dataset("TriviaHG", cache.path(), opts));
  CHECK(fs::exists(cached_archive_path(cache.path(), "TriviaHG")));
}

TEST_CASE("a damaged cached archive is downloaded again") {
  RegistryStub stub;
  TempDir cache;
  const auto opts = options_for(stub.manifest_url());
  download_dataset("TriviaHG", cache.path(), opts);
  write_file_atomic(cached_archive_path(cache.path(), "TriviaHG"), "HINTDS01garbage");
  CHECK_NOTHROW(download_dataset("TriviaHG", cache.path(), opts));
  CHECK(stub.archive_hits == 2);
}

TEST_CASE("cached manifest is used when the registry is unreachable") {
  RegistryStub stub;
  TempDir cache;
  const auto opts = options_for(stub.manifest_url());
  const auto first = available_datasets(true, cache.path(), opts);

  stub.down = true;
  const auto cached = available_datasets(true, cache.path(), opts);
  CHECK(cached.entries == first.entries);
  CHECK(cached.fetched_at == first.fetched_at);
  CHECK(available_datasets(false, cache.path(), opts).entries == first.entries);

  TempDir empty;
  CHECK_ERROR_KIND(available_datasets(true, empty.path(), opts), ErrorKind::NetworkError);
  auto no_url = opts;
  no_url.registry_url.clear();
  ScopedEnv env("HINTKIT_REGISTRY_URL", std::nullopt);
  CHECK_ERROR_KIND(available_datasets(false, empty.path(), no_url), ErrorKind::NetworkError);
}

TEST_CASE("cache directory resolution") {
  {
    ScopedEnv a("HINTKIT_CACHE_DIR", "/tmp/hk-cache");
    CHECK(default_cache_dir() == fs::path("/tmp/hk-cache"));
  }
  ScopedEnv a("HINTKIT_CACHE_DIR", std::nullopt);
  ScopedEnv b("XDG_CACHE_HOME", "/tmp/xdg");
  CHECK(default_cache_dir() == fs::path("/tmp/xdg/hintkit"));
}
