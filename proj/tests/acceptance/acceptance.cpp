// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "hintkit/clients.hpp"
#include "hintkit/dataset_io.hpp"
#include "hintkit/digest.hpp"
#include "hintkit/error.hpp"
#include "hintkit/evaluation.hpp"
#include "hintkit/http.hpp"
#include "hintkit/metrics/convergence.hpp"
#include "hintkit/metrics/leakage.hpp"
#include "hintkit/metrics/readability.hpp"
#include "hintkit/metrics/relevance.hpp"
#include "hintkit/registry.hpp"
#include "hintkit/text.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"
#include "support.hpp"

using namespace hintkit;
using namespace hintkit::test;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Collects the first few mismatches so a failing line says why.
class Failures {
 public:
  void add(std::string what) {
    ++count_;
    if (count_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  std::size_t count() const { return count_; }
  Outcome outcome(const std::string& ok_detail) const {
    if (count_ == 0) return {true, ok_detail};
    return {false, std::to_string(count_) + " mismatch(es): " + notes_};
  }

 private:
  std::size_t count_ = 0;
  std::string notes_;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::shared_ptr<const FrequencyTable> frequency_table() {
  static const auto table =
      std::make_shared<const FrequencyTable>(FrequencyTable::load(data_dir() / "wordfreq.tsv"));
  return table;
}

// Static vectors for every word in the frequency fixture, derived from a hash.
std::shared_ptr<const StaticVectors> static_vectors() {
  static const auto vectors = [] {
    std::ostringstream text;
    std::istringstream freq(read_file(data_dir() / "wordfreq.tsv"));
    std::string line;
    while (std::getline(freq, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto token = line.substr(0, line.find('\t'));
      text << token;
      auto h = fnv1a(token);
      for (int d = 0; d < 6; ++d, h = h * 6364136223846793005ULL + 1442695040888963407ULL)
        text << ' ' << (static_cast<double>(h >> 40) / static_cast<double>(1ULL << 24) - 0.5);
      text << '\n';
    }
    std::istringstream in(text.str());
    return std::make_shared<const StaticVectors>(StaticVectors::parse(in));
  }();
  return vectors;
}

std::shared_ptr<const LinearScorer> linear_scorer() {
  static const auto scorer = std::make_shared<const LinearScorer>(LinearScorer::parse(
      R"({"feature_names": ["words_per_sentence", "syllables_per_word", "complex_word_ratio"],
          "weights": [0.05, 1.2, 2.0], "bias": -1.0, "class_thresholds": [0.8, 1.6]})"));
  return scorer;
}

Backends offline_backends() {
  Backends b;
  b.offline = true;
  b.frequencies = frequency_table();
  b.vectors = static_vectors();
  b.linear_scorer = linear_scorer();
  return b;
}

std::vector<std::string> all_offline_methods() {
  auto names = default_offline_methods();
  names.push_back("relevance/noncontextual/static");
  names.push_back("readability/ml/linear");
  return names;
}

// -------------------------------------------------------------- criteria

Outcome rouge_oracle() {
  const auto start = Clock::now();
  Rng rng(20240101);
  Failures f;
  const std::pair<RougeVariant, std::size_t> variants[] = {
      {RougeVariant::rouge1, 1}, {RougeVariant::rouge2, 2}, {RougeVariant::rougeL, 0}};
  for (int pair = 0; pair < 200; ++pair) {
    const auto vocab = uniform(rng, 2, 12);
    const auto cand = random_tokens(rng, 0, 20, vocab);
    const auto ref = random_tokens(rng, 0, 20, vocab);
    for (const auto& [variant, n] : variants) {
      const double got = rouge_score(cand, ref, variant);
      const double want = oracle::rouge(cand, ref, n);
      if (got != want)
        f.add("pair " + std::to_string(pair) + " " + std::string(to_string(variant)) + ": " + std::to_string(got) +
              " vs " + std::to_string(want));
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 5.0) f.add("took " + fixed(elapsed) + " s");
  return f.outcome("200 pairs x 3 variants exact, " + fixed(elapsed, 3) + " s");
}

Outcome readability_reference() {
  struct Reference {
    const char* text;
    double words, sentences, syllables, complex, letters;
  };
  // Counts analysed by hand: vowel groups with the silent-e rule, words of
  // three or more syllables, and letters inside words.
  const Reference refs[] = {
      {"The cat sat.", 3, 1, 3, 0, 9},
      {"Education is important for everyone.", 5, 1, 12, 3, 31},
      {"I like big dogs. They run fast!", 7, 2, 7, 0, 23},
      {"Photosynthesis converts sunlight into chemical energy.", 6, 1, 17, 3, 48},
      {"Mount Everest, the highest mountain on Earth, is in Nepal.", 10, 1, 15, 1, 46},
  };
  auto expected = [](const Reference& r, ReadabilityFormula f) {
    const double wps = r.words / r.sentences;
    switch (f) {
      case ReadabilityFormula::flesch: return 206.835 - 1.015 * wps - 84.6 * r.syllables / r.words;
      case ReadabilityFormula::gunning_fog: return 0.4 * (wps + 100.0 * r.complex / r.words);
      case ReadabilityFormula::coleman_liau:
        return 0.0588 * (r.letters / r.words * 100.0) - 0.296 * (r.sentences / r.words * 100.0) - 15.8;
      case ReadabilityFormula::smog: return 1.0430 * std::sqrt(r.complex * 30.0 / r.sentences) + 3.1291;
      case ReadabilityFormula::ari: return 4.71 * r.letters / r.words + 0.5 * wps - 21.43;
    }
    return std::nan("");
  };
  const ReadabilityFormula formulas[] = {ReadabilityFormula::flesch, ReadabilityFormula::gunning_fog,
                                         ReadabilityFormula::coleman_liau, ReadabilityFormula::smog,
                                         ReadabilityFormula::ari};
  Failures f;
  for (const auto& r : refs) {
    const auto stats = analyze_text(r.text);
    for (auto formula : formulas) {
      const double got = readability_raw(stats, formula);
      const double want = expected(r, formula);
      if (!(std::abs(got - want) <= 1e-6))
        f.add(std::string(r.text) + " " + std::string(to_string(formula)) + ": " + fixed(got, 6) + " vs " +
              fixed(want, 6));
    }
  }
  // Pinned values for the first sentence.
  const auto cat = analyze_text("The cat sat.");
  if (std::abs(readability_raw(cat, ReadabilityFormula::flesch) - 119.19) > 1e-6) f.add("cat flesch != 119.19");
  if (std::abs(readability_raw(cat, ReadabilityFormula::ari) - (-5.80)) > 1e-6) f.add("cat ari != -5.80");
  return f.outcome("5 sentences x 5 formulas within 1e-6");
}

Outcome range_fuzz() {
  Rng rng(7);
  const auto backends = offline_backends();
  std::vector<std::unique_ptr<Evaluator>> evaluators;
  MetricConfig cfg;
  cfg.familiarity_all_targets = true;
  for (const auto& name : all_offline_methods()) evaluators.push_back(make_evaluator(parse_method_spec(name), backends, cfg));

  Failures f;
  std::size_t evaluations = 0;
  while (evaluations < 10000) {
    Instance inst;
    inst.question.text = coin(rng, 0.9) ? random_text(rng) : "";
    for (auto a = uniform(rng, 0, 3); a > 0; --a) inst.answers.push_back({random_text(rng, 4), {}, {}, {}});
    for (auto h = uniform(rng, 1, 4); h > 0; --h) {
      auto text = coin(rng, 0.3) ? random_sentence(rng) : random_text(rng);
      // Sometimes copy answer words into the hint to reach high leakage.
      if (!inst.answers.empty() && coin(rng, 0.2)) text += " " + inst.answers.front().text;
      inst.hints.push_back({text, "fuzz", {}, {}, {}});
    }
    for (auto& e : evaluators) {
      const auto targets = e->targets(inst);
      const auto results = e->evaluate(inst, targets);
      for (const auto& r : results) {
        ++evaluations;
        if (!std::isfinite(r.value) || metric_range_violation(r))
          f.add(r.name + " gave " + std::to_string(r.value));
      }
    }
  }
  return f.outcome(std::to_string(evaluations) + " evaluations over " + std::to_string(evaluators.size()) +
                   " offline methods in range");
}

Outcome round_trips() {
  Rng rng(99);
  Failures f;
  for (int i = 0; i < 100; ++i) {
    const auto d = random_dataset(rng);
    const auto json = export_json(d);
    const auto from_json = import_json(json);
    if (!(from_json == d)) f.add("json round-trip " + std::to_string(i));
    if (export_json(from_json) != json) f.add("json bytes differ " + std::to_string(i));
    if (export_json(d) != json) f.add("export not deterministic " + std::to_string(i));
    const auto archive = export_archive(d);
    if (!(import_archive(archive) == d)) f.add("archive round-trip " + std::to_string(i));
    if (export_archive(d) != archive) f.add("archive bytes differ " + std::to_string(i));
  }
  return f.outcome("100 datasets, JSON and archive, byte-stable");
}

Outcome convergence_transcripts() {
  Rng rng(2024);
  Failures f;
  for (int t = 0; t < 20; ++t) {
    // Candidate list: 2..8 entries, the gold answer present in most transcripts.
    const auto n = uniform(rng, 2, 8);
    const bool has_gold = t % 5 != 4;
    const auto gold_at = uniform(rng, 0, n - 1);
    std::vector<std::string> listed;
    for (std::size_t i = 0; i < n; ++i)
      listed.push_back(has_gold && i == gold_at ? "Nelson MANDELA" : "Candidate " + std::to_string(t) + "-" + std::to_string(i));
    std::string list_reply;
    for (std::size_t i = 0; i < n; ++i) list_reply += std::to_string(i + 1) + ". " + listed[i] + "\n";

    const std::vector<std::string> hints{"first hint " + std::to_string(t), "second hint " + std::to_string(t),
                                         "third hint " + std::to_string(t)};
    std::set<std::pair<std::string, std::string>> drop;  // (hint, candidate) judged implausible
    for (const auto& h : hints)
      for (const auto& c : listed)
        if (coin(rng, 0.45)) drop.insert({h, c});

    FunctionChat chat([&](const ChatRequest& r) -> std::string {
      const auto user = last_user_message(r);
      const auto hint_at = user.find("\nHint: ");
      if (hint_at == std::string::npos) return list_reply;
      const auto cand_at = user.find("\nCandidate answer: ");
      const auto hint = user.substr(hint_at + 7, cand_at - hint_at - 7);
      const auto cand_start = cand_at + 19;
      const auto cand = user.substr(cand_start, user.find('\n', cand_start) - cand_start);
      return drop.count({hint, cand}) ? "No, ruled out." : "Yes.";
    });
    ConvergenceOptions opts;
    opts.num_candidates = static_cast<int>(n);
    const std::vector<std::string> gold{"Nelson Mandela", "Mandela"};
    const auto report = convergence_llm("Who?", gold, hints, chat, opts);

    for (std::size_t h = 0; h < hints.size(); ++h) {
      std::size_t incorrect = 0, eliminated_incorrect = 0;
      bool gold_out = false;
      for (std::size_t c = 0; c < n; ++c) {
        const bool is_gold = has_gold && c == gold_at;
        const bool out = drop.count({hints[h], listed[c]}) > 0;
        if (is_gold) {
          gold_out = gold_out || out;
        } else {
          ++incorrect;
          eliminated_incorrect += out ? 1 : 0;
        }
      }
      double want = incorrect == 0 ? 1.0 : static_cast<double>(eliminated_incorrect) / static_cast<double>(incorrect);
      if (gold_out) want = 0.0;
      const double got = report.per_hint.at(h).score;
      if (got != want)
        f.add("transcript " + std::to_string(t) + " hint " + std::to_string(h) + ": " + std::to_string(got) + " vs " +
              std::to_string(want));
    }
    if (chat.calls != static_cast<int>(1 + n * hints.size())) f.add("unexpected call count in " + std::to_string(t));
  }

  // The two worked examples.
  const std::vector<ConvergenceCandidate> five{{"gold", true}, {"a", false}, {"b", false}, {"c", false}, {"d", false}};
  const std::vector<std::size_t> two{1, 3};
  if (convergence_from_judgements(five, two).score != 0.5) f.add("2 of 4 eliminated should be 0.5");
  const std::vector<std::size_t> with_gold{0, 1, 2, 3, 4};
  if (convergence_from_judgements(five, with_gold).score != 0.0) f.add("gold eliminated should be 0.0");
  return f.outcome("20 transcripts x 3 hints equal the hand formula");
}

Outcome leakage_properties() {
  Failures f;
  const std::vector<std::string> answers{"Nelson Mandela"};
  auto lexical = [](std::string_view hint, std::span<const std::string> a) {
    return answerleakage_lexical(hint, a, false).value;
  };
  if (lexical("It was Nelson Mandela, of course.", answers) != 1.0) f.add("contained answer should be 1.0");
  if (lexical("The president of the country.", answers) != 0.0) f.add("disjoint hint should be 0.0");
  if (lexical("the of and", std::vector<std::string>{"The Who"}) != 0.0) f.add("stopword-only overlap should be 0.0");

  Rng rng(5150);
  for (int i = 0; i < 1000; ++i) {
    const auto hint = random_tokens(rng, 0, 12, 30);
    std::vector<std::vector<std::string>> answer_tokens;
    std::vector<std::string> answer_texts;
    for (auto a = uniform(rng, 1, 3); a > 0; --a) {
      answer_tokens.push_back(random_tokens(rng, 1, 4, 30));
      std::string joined;
      for (const auto& t : answer_tokens.back()) joined += (joined.empty() ? "" : " ") + t;
      answer_texts.push_back(joined);
    }
    auto augmented = hint;
    for (auto extra = uniform(rng, 1, 5); extra > 0; --extra)
      augmented.insert(augmented.begin() + static_cast<std::ptrdiff_t>(uniform(rng, 0, augmented.size())),
                       "w" + std::to_string(uniform(rng, 0, 29)));
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& t : v) s += (s.empty() ? "" : " ") + t;
      return s;
    };
    const double before = lexical(join(hint), answer_texts);
    const double after = lexical(join(augmented), answer_texts);
    if (after < before) f.add("augmentation " + std::to_string(i) + " lowered leakage");
    if (before != oracle::lexical_leakage(hint, answer_tokens)) f.add("oracle mismatch at " + std::to_string(i));
  }
  return f.outcome("endpoints 1.0/0.0, 1000 augmentations monotone and oracle-exact");
}

Outcome end_to_end() {
  const auto start = Clock::now();
  IsolatedEnv iso;
  HintChatStub chat;
  TempDir dir;
  const auto r = run_pipeline(dir, chat);
  const double elapsed = seconds_since(start);
  Failures f;
  if (r.generate.code != 0) f.add("generate failed: " + r.generate.err);
  if (r.evaluate.code != 0) f.add("evaluate failed: " + r.evaluate.err);
  if (r.report.code != 0) f.add("report failed: " + r.report.err);
  if (r.report.out != read_file(data_dir() / "golden_report.csv")) f.add("report differs from golden CSV");
  if (elapsed >= 10.0) f.add("took " + fixed(elapsed) + " s");
  return f.outcome("golden CSV reproduced byte-for-byte, " + fixed(elapsed, 3) + " s, chat stub on 127.0.0.1");
}

Outcome registry_flow() {
  Failures f;
  const auto manifest = parse_manifest(read_file(data_dir() / "manifest.json"));
  const auto* trivia = manifest.find("TriviaHG");
  if (!trivia || trivia->subsets.empty() || trivia->subsets[0].num_questions != 14645 ||
      trivia->subsets[0].num_hints != 140973)
    f.add("TriviaHG training row did not parse to 14645 / 140973");

  const auto archive = export_archive(load_fixture());
  std::atomic<bool> flip{false};
  StubServer server;
  server.get("/manifest.json", [&](const httplib::Request&, httplib::Response& res) {
    auto j = Json::parse(read_file(data_dir() / "manifest.json"));
    j["entries"][0]["download_url"] = server.url() + "/TriviaHG.hds";
    j["entries"][0]["checksum"] = sha256_hex(archive);
    res.set_content(j.dump(), "application/json");
  });
  server.get("/TriviaHG.hds", [&](const httplib::Request&, httplib::Response& res) {
    auto bytes = archive;
    if (flip) bytes[bytes.size() / 3] ^= 0x20;
    res.set_content(bytes, "application/octet-stream");
  });
  server.start();

  RegistryOptions opts;
  opts.registry_url = server.url() + "/manifest.json";
  opts.transport = std::make_shared<HttplibTransport>();
  opts.sleep = [](std::chrono::milliseconds) {};

  TempDir good_cache;
  try {
    const auto d = download_dataset("TriviaHG", good_cache.path(), opts);
    if (export_json(d) != export_json(load_fixture())) f.add("downloaded dataset differs");
  } catch (const std::exception& e) {
    f.add(std::string("download failed: ") + e.what());
  }

  flip = true;
  TempDir bad_cache;
  try {
    download_dataset("TriviaHG", bad_cache.path(), opts);
    f.add("flipped byte was accepted");
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ChecksumMismatch) f.add(std::string("wrong error: ") + e.what());
  }
  if (fs::exists(cached_archive_path(bad_cache.path(), "TriviaHG"))) f.add("corrupt archive was cached");
  return f.outcome("14,645 / 140,973 parsed; stub download verified and loaded; flipped byte -> ChecksumMismatch");
}

// Deterministic HTTP transport standing in for every remote service.
std::shared_ptr<HttpTransport> mock_transport() {
  return std::make_shared<CallbackTransport>([](const HttpRequest& req) -> HttpResponse {
    auto unit = [](std::string_view s) { return static_cast<double>(fnv1a(s) % 10007) / 10006.0; };
    if (req.url.find("/per-article/") != std::string::npos) {
      Json items = Json::array();
      items.push_back({{"views", static_cast<std::int64_t>(fnv1a(req.url) % 50000)}});
      return {200, Json{{"items", items}}.dump()};
    }
    const auto body = Json::parse(req.body);
    if (req.url.ends_with("/embeddings")) {
      Json data = Json::array();
      const auto inputs = body.at("input").get<std::vector<std::string>>();
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        std::vector<double> v;
        auto h = fnv1a(inputs[i]);
        for (int d = 0; d < 8; ++d, h = h * 6364136223846793005ULL + 1) v.push_back(static_cast<double>(h >> 44) / 1e6);
        data.push_back({{"index", i}, {"embedding", v}});
      }
      return {200, Json{{"data", data}}.dump()};
    }
    if (req.url.ends_with("/chat/completions")) {
      std::string system, user;
      for (const auto& m : body.at("messages"))
        (m.at("role") == "system" ? system : user) = m.at("content").get<std::string>();
      std::string reply;
      if (user.find("\nCandidate answer: ") != std::string::npos)
        reply = unit(user) < 0.5 ? "no" : "yes";
      else if (user.rfind("Question: ", 0) == 0)
        reply = "1. Mandela\n2. Innsbruck\n3. Paris\n4. Rome";
      else if (user.rfind("Statement: ", 0) == 0)
        reply = "1. Which place is meant?\n2. Who said this?\n3. " + user.substr(11);
      else
        reply = std::vector<std::string>{"Beginner", "Intermediate", "Advanced"}[fnv1a(user) % 3];
      return {200, chat_completion_body(reply)};
    }
    // Remote scorer.
    std::vector<double> scores;
    for (const auto& t : body.at("texts")) scores.push_back(unit(t.get<std::string>()));
    return {200, Json{{"scores", scores}}.dump()};
  });
}

Outcome determinism() {
  ScopedEnv offline("HINTKIT_OFFLINE", std::nullopt);
  auto run_once = [] {
    Rng rng(31337);
    Dataset d;
    d.name = "determinism";
    d.version = "1";
    for (int s = 0; s < 2; ++s) {
      auto& subset = add_subset(d, "split" + std::to_string(s));
      for (int q = 0; q < 12; ++q) {
        Instance inst;
        inst.question.text = random_sentence(rng);
        inst.answers.push_back({random_sentence(rng, 1, 2), {}, {}, {}});
        for (int h = 0; h < 3; ++h) inst.hints.push_back({random_sentence(rng), "human", {}, {}, {}});
        subset.instances.emplace("q" + std::to_string(q), std::move(inst));
      }
    }
    auto transport = mock_transport();
    EndpointConfig ep;
    ep.base_url = "http://mock/v1";
    ep.sleep = [](std::chrono::milliseconds) {};
    auto b = offline_backends();
    b.offline = false;
    b.seed = 1;
    b.chat = std::make_shared<OpenAIChatClient>(transport, ep);
    b.embed = std::make_shared<OpenAIEmbeddingClient>(transport, ep, "embed");
    PageviewConfig pv;
    pv.sleep = ep.sleep;
    pv.today = [] { return std::chrono::sys_days{std::chrono::year{2024} / 5 / 1}; };
    b.pageviews = std::make_shared<WikimediaPageviewClient>(transport, pv);
    for (const char* name : {"convergence/specificity", "convergence/regression"}) {
      EndpointConfig sc = ep;
      sc.base_url = std::string("http://mock/") + name;
      b.scorers[name] = std::make_shared<RemoteScorerClient>(transport, sc);
    }
    MetricConfig cfg;
    for (const auto& name : known_methods()) cfg.enabled.push_back(parse_method_spec(name));
    cfg.workers = 4;
    cfg.familiarity_all_targets = true;
    const auto summary = evaluate_dataset(d, cfg, b);
    std::string failed;
    for (const auto& [name, m] : summary.methods)
      if (m.failed) failed += name + " (" + m.error + ") ";
    return std::pair{export_json(d), failed};
  };
  const auto [first, failed_first] = run_once();
  const auto [second, failed_second] = run_once();
  Failures f;
  if (!failed_first.empty()) f.add("methods failed: " + failed_first);
  if (first != second) f.add("dataset bytes differ between runs");
  return f.outcome("all " + std::to_string(known_methods().size()) + " methods, 4 workers, " +
                   std::to_string(first.size()) + " identical bytes twice");
}

Outcome scale_smoke() {
  Rng rng(4242);
  Dataset d;
  d.name = "scale";
  d.version = "1";
  std::size_t hints = 0;
  for (int s = 0; s < 4; ++s) {
    auto& subset = add_subset(d, "part" + std::to_string(s));
    for (int q = 0; q < 500; ++q) {
      Instance inst;
      inst.question.text = random_sentence(rng);
      inst.answers.push_back({random_sentence(rng, 1, 3), {}, {}, {}});
      for (int h = 0; h < 5; ++h, ++hints) inst.hints.push_back({random_sentence(rng), "synthetic", {}, {}, {}});
      subset.instances.emplace("q" + std::to_string(q), std::move(inst));
    }
  }
  MetricConfig cfg;
  for (const auto& name : all_offline_methods()) cfg.enabled.push_back(parse_method_spec(name));
  cfg.workers = 4;
  const auto start = Clock::now();
  const auto summary = evaluate_dataset(d, cfg, offline_backends());
  const double elapsed = seconds_since(start);
  Failures f;
  const auto expected = hints * cfg.enabled.size();
  if (summary.computed() != expected)
    f.add("computed " + std::to_string(summary.computed()) + " of " + std::to_string(expected));
  if (elapsed >= 60.0) f.add("took " + fixed(elapsed) + " s");
  return f.outcome(std::to_string(hints) + " hints x " + std::to_string(cfg.enabled.size()) + " methods in " +
                   fixed(elapsed) + " s");
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"rouge oracle equivalence", rouge_oracle},
      {"readability formula reproduction", readability_reference},
      {"range fuzzing", range_fuzz},
      {"dataset round-trip", round_trips},
      {"convergence formula", convergence_transcripts},
      {"leakage endpoints and monotonicity", leakage_properties},
      {"end-to-end offline pipeline", end_to_end},
      {"registry flow", registry_flow},
      {"determinism under mocks", determinism},
      {"scale smoke test", scale_smoke},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
