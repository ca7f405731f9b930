#include <doctest.h>

#include <cstdlib>

#include "check.hpp"
#include "hintkit/config.hpp"
#include "hintkit/dataset_io.hpp"
#include "hintkit/report.hpp"
#include "pipeline.hpp"
#include "support.hpp"

using namespace hintkit;
using namespace hintkit::test;

namespace {

Dataset scored_dataset() {
  Dataset d;
  d.name = "r";
  d.version = "1";
  auto& a = add_subset(d, "alpha");
  Instance i1;
  i1.question.text = "Q one?";
  i1.hints.push_back({"h1", "human", {}, {}, {}});
  i1.hints.push_back({"h2", "human", {}, {}, {}});
  attach_metric(i1.hints[0].metrics, {"relevance/rouge/rougeL", 0.2, std::nullopt});
  attach_metric(i1.hints[1].metrics, {"relevance/rouge/rougeL", 0.5, std::nullopt});
  attach_metric(i1.hints[1].metrics, {"readability/traditional/flesch", 2.0, Json{{"raw", 88.1}}});
  attach_metric(i1.question.metrics, {"familiarity/wordfreq/stop", 1.0, std::nullopt});
  a.instances.emplace("q,1", std::move(i1));
  auto& b = add_subset(d, "beta");
  Instance i2;
  i2.question.text = "Q two?";
  i2.hints.push_back({"h", "human", {}, {}, {}});
  attach_metric(i2.hints[0].metrics, {"custom/score", -0.001, std::nullopt});
  b.instances.emplace("q2", std::move(i2));
  return d;
}

}  // namespace

TEST_CASE("report table and renderers") {
  const auto d = scored_dataset();
  const auto table = build_report(d);
  CHECK(table.columns == std::vector<std::string>{"custom/score", "familiarity/wordfreq/stop",
                                                  "readability/traditional/flesch", "relevance/rouge/rougeL"});
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].subset == "alpha");
  CHECK(table.rows[0].means.at("relevance/rouge/rougeL") == doctest::Approx(0.35));
  CHECK(table.rows[0].counts.at("relevance/rouge/rougeL") == 2);

  CHECK(render_csv(table) ==
        "subset,custom/score,familiarity/wordfreq/stop,readability/traditional/flesch,relevance/rouge/rougeL\r\n"
        "alpha,,1.00,2.00,0.35\r\n"
        "beta,0.00,,,\r\n");
  const auto md = render_markdown(table);
  CHECK(md.rfind("| subset | custom/score |", 0) == 0);
  CHECK(md.find("| alpha |  | 1.00 | 2.00 | 0.35 |") != std::string::npos);
  const auto j = Json::parse(render_json(table));
  CHECK(j["subsets"]["alpha"]["means"]["relevance/rouge/rougeL"].get<double>() == doctest::Approx(0.35));
  CHECK(j["subsets"]["beta"]["counts"]["custom/score"] == 1);

  const auto long_csv = render_long_csv(d);
  CHECK(long_csv.rfind("subset,q_id,target,index,metric,value\r\n", 0) == 0);
  CHECK(long_csv.find("alpha,\"q,1\",hint,1,readability/traditional/flesch,2.0\r\n") != std::string::npos);
  CHECK(long_csv.find("alpha,\"q,1\",question,0,familiarity/wordfreq/stop,1.0\r\n") != std::string::npos);
  CHECK(long_csv.find("beta,q2,hint,0,custom/score,-0.001\r\n") != std::string::npos);
  CHECK_ERROR_KIND(render_report(d, ReportFormat::md, true), ErrorKind::InvalidArgument);

  CHECK_ERROR_KIND(build_report(load_fixture()), ErrorKind::NoMetricsFound);
  CHECK_ERROR_KIND(render_long_csv(load_fixture()), ErrorKind::NoMetricsFound);
}

TEST_CASE("csv helpers") {
  CHECK(format_two_decimals(-0.001) == "0.00");
  CHECK(format_two_decimals(0.125) == "0.12");
  CHECK(format_two_decimals(2.0 / 3.0) == "0.67");
  CHECK(format_two_decimals(-1.5) == "-1.50");
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(parse_report_format("md") == ReportFormat::md);
  CHECK_FALSE(parse_report_format("xlsx").has_value());
}

TEST_CASE("config text parsing") {
  const auto values = parse_config_text(
      "# comment\n"
      "cache_dir = \"/tmp/c # not a comment\"\n"
      "\n"
      "[chat]\n"
      "url = http://localhost:9/v1   # trailing\n"
      "model = \"m\"\n"
      "[ generation ]\n"
      "num_hints = 3\n");
  CHECK(values.at("cache_dir") == "/tmp/c # not a comment");
  CHECK(values.at("chat.url") == "http://localhost:9/v1");
  CHECK(values.at("chat.model") == "m");
  CHECK(values.at("generation.num_hints") == "3");

  auto line_of = [](std::string_view text) {
    try {
      parse_config_text(text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ConfigError);
      return e.path();
    }
    return std::string("no error");
  };
  CHECK(line_of("a = 1\n[broken\n") == "line 2");
  CHECK(line_of("a = 1\nb = 2\njust words\n") == "line 3");
  CHECK(line_of(" = 4") == "line 1");
  CHECK(line_of("x = \"open") == "line 1");
}

TEST_CASE("config values, environment and precedence") {
  RunConfig c;
  apply_config_values(c, {{"generation.num_hints", "7"},
                          {"evaluate.workers", "2"},
                          {"offline", "true"},
                          {"readability.flesch_easy", "65.5"},
                          {"generation.seed", "42"}});
  CHECK(c.num_hints == 7);
  CHECK(c.evaluation_workers == 2);
  CHECK(c.offline);
  CHECK(c.bands.flesch_easy == 65.5);
  CHECK(c.seed == 42);
  CHECK_ERROR_KIND(apply_config_values(c, {{"chat.colour", "blue"}}), ErrorKind::ConfigError);
  CHECK_ERROR_KIND(apply_config_values(c, {{"generation.num_hints", "many"}}), ErrorKind::ConfigError);
  CHECK_ERROR_KIND(apply_config_values(c, {{"generation.num_hints", "0"}}), ErrorKind::ConfigError);
  CHECK_ERROR_KIND(apply_config_values(c, {{"offline", "perhaps"}}), ErrorKind::ConfigError);

  IsolatedEnv iso;
  TempDir dir;
  write_file_atomic(dir / "cfg.toml", "[chat]\nurl = http://file\nmodel = file-model\n[evaluate]\nworkers = 3\n");
  ScopedEnv url("HINTKIT_CHAT_URL", "http://env");
  ScopedEnv model("HINTKIT_CHAT_MODEL", std::nullopt);
  auto cfg = load_run_config(dir / "cfg.toml");
  CHECK(cfg.chat.url == "http://env");
  CHECK(cfg.chat.model == "file-model");
  CHECK(cfg.evaluation_workers == 3);
  CHECK(cfg.cache_dir == iso.home.path() / "cache");

  {
    ScopedEnv via_env("HINTKIT_CONFIG", (dir / "cfg.toml").string());
    CHECK(load_run_config(std::nullopt).evaluation_workers == 3);
  }
  CHECK(load_run_config(std::nullopt).evaluation_workers == 4);

  write_file_atomic(dir / "bad.toml", "[chat]\nnope = 1\n");
  try {
    load_run_config(dir / "bad.toml");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    CHECK(e.path() == (dir / "bad.toml").string());
  }
}

TEST_CASE("cli: usage errors and local commands") {
  IsolatedEnv iso;
  TempDir dir;
  CHECK(run({}).code != 0);
  CHECK(run({"frobnicate"}).code != 0);
  CHECK(run({"report"}).code != 0);

  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("evaluate") != std::string::npos);

  const auto methods = run({"methods"});
  CHECK(methods.code == 0);
  CHECK(methods.out.find("convergence/llm\n") != std::string::npos);

  const auto fixture = (data_dir() / "fixture.json").string();
  const auto ok = run({"dataset", "validate", fixture});
  CHECK(ok.code == 0);
  CHECK(ok.out.find(": ok") != std::string::npos);

  auto broken = Json::parse(read_file(fixture));
  broken["subsets"]["test"]["instances"]["q1"]["hints"][0]["text"] = "";
  write_file_atomic(dir / "broken.json", broken.dump());
  const auto bad = run({"dataset", "validate", (dir / "broken.json").string()});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("/subsets/test/instances/q1/hints/0/text") != std::string::npos);

  const auto archive = (dir / "f.hds").string();
  CHECK(run({"dataset", "convert", fixture, archive}).code == 0);
  CHECK(looks_like_archive(read_file(archive)));
  CHECK(run({"dataset", "validate", archive}).code == 0);
  const auto info = run({"dataset", "info", archive});
  CHECK(info.code == 0);
  CHECK(info.out.find("fixture (version 1.0)") != std::string::npos);

  const auto enriched = (dir / "enriched.json").string();
  CHECK(run({"--offline", "enrich", fixture, enriched}).code == 0);
  const auto e = load_dataset(enriched);
  CHECK(get_instance(e, "test", "q1").question.question_type.has_value());
  CHECK(run({"--offline", "enrich", fixture, enriched, "--ner", "remote"}).code == 1);

  const auto missing = run({"report", (dir / "nope.json").string()});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("error: ") != std::string::npos);
  CHECK(run({"report", fixture}).code == 1);  // nothing scored yet
}

TEST_CASE("cli: network commands respect offline mode and missing endpoints") {
  IsolatedEnv iso;
  TempDir dir;
  const auto fixture = (data_dir() / "fixture.json").string();
  const auto out = (dir / "o.json").string();
  {
    ScopedEnv url("HINTKIT_CHAT_URL", std::nullopt);
    const auto r = run({"generate", fixture, out});
    CHECK(r.code == 1);
    CHECK(r.err.find("HINTKIT_CHAT_URL") != std::string::npos);
  }
  {
    ScopedEnv url("HINTKIT_CHAT_URL", "http://127.0.0.1:1/v1");
    const auto r = run({"--offline", "generate", fixture, out});
    CHECK(r.code == 1);
    CHECK(r.err.find("offline") != std::string::npos);
  }
  const auto ev = run({"--offline", "evaluate", fixture, out, "--metrics", "relevance/contextual"});
  CHECK(ev.code == 1);
  CHECK(ev.err.find("BackendUnavailable") != std::string::npos);
  CHECK_FALSE(fs::exists(out));

  // Only a method without its table: every method failed.
  const auto nofreq = run({"--offline", "evaluate", fixture, out, "--metrics", "familiarity/wordfreq/stop"});
  CHECK(nofreq.code == 1);
  CHECK(nofreq.err.find("frequency table") != std::string::npos);

  ScopedEnv reg("HINTKIT_REGISTRY_URL", std::nullopt);
  const auto list = run({"--cache-dir", dir.path().string(), "dataset", "list"});
  CHECK(list.code == 1);
  CHECK(list.err.find("NetworkError") != std::string::npos);
}

TEST_CASE("cli: end-to-end pipeline matches the golden report") {
  IsolatedEnv iso;
  HintChatStub chat;
  TempDir dir;
  const auto r = run_pipeline(dir, chat);
  INFO(r.generate.err << r.evaluate.err << r.report.err);
  REQUIRE(r.generate.code == 0);
  CHECK(r.generate.out == "test: 10 hints generated\n");
  CHECK(chat.hits() == 2);
  REQUIRE(r.evaluate.code == 0);
  CHECK(r.evaluate.out.find("40 computed, 0 skipped") != std::string::npos);
  REQUIRE(r.report.code == 0);

  const auto golden_path = data_dir() / "golden_report.csv";
  if (std::getenv("HINTKIT_WRITE_GOLDEN")) write_file_atomic(golden_path, r.report.out);
  CHECK(r.report.out == read_file(golden_path));

  // Generated hints replace the human ones and are tagged with the model.
  const auto d = load_dataset(dir / "generated.json");
  const auto& q2 = get_instance(d, "test", "q2");
  REQUIRE(q2.hints.size() == 5);
  CHECK(q2.hints[0].source == "model:stub-model/answer-agnostic");
  CHECK(q2.hints[0].text == "Think about the word \"university\" and what it usually refers to.");

  // Evaluating again skips everything.
  const auto again = run({"--offline", "evaluate", (dir / "scored.json").string(), (dir / "again.json").string(),
                          "--freq-table", (data_dir() / "wordfreq.tsv").string()});
  CHECK(again.code == 0);
  CHECK(again.out.find("0 computed, 40 skipped") != std::string::npos);

  const auto md = run({"report", (dir / "scored.json").string(), "--format", "md", "-o", (dir / "r.md").string()});
  CHECK(md.code == 0);
  CHECK(md.out.empty());
  CHECK(read_file(dir / "r.md").rfind("| subset |", 0) == 0);
}
