#include "support.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hintkit/dataset_io.hpp"
#include "hintkit/error.hpp"
#include "hintkit/text.hpp"

namespace hintkit::test {

fs::path data_dir() { return fs::path(HINTKIT_TEST_DATA_DIR); }

Dataset load_fixture() { return load_dataset(data_dir() / "fixture.json"); }

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  Rng rng(std::random_device{}());
  path_ = fs::temp_directory_path() /
          ("hintkit-test-" + std::to_string(rng() % 1000000007) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

ScopedEnv::ScopedEnv(std::string name, std::optional<std::string> value) : name_(std::move(name)) {
  if (const char* old = std::getenv(name_.c_str())) previous_ = old;
  if (value)
    ::setenv(name_.c_str(), value->c_str(), 1);
  else
    ::unsetenv(name_.c_str());
}

ScopedEnv::~ScopedEnv() {
  if (previous_)
    ::setenv(name_.c_str(), previous_->c_str(), 1);
  else
    ::unsetenv(name_.c_str());
}

// ----------------------------------------------------------- random inputs

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string random_word(Rng& rng) {
  static const std::vector<std::string> exotic{"é", "ü", "ß", "ñ", "ø", "ж", "λ", "ω", "中", "日"};
  static const std::string consonants = "bcdfghjklmnprstvwz";
  static const std::string vowels = "aeiouy";
  std::string w;
  const auto syllables = uniform(rng, 1, 4);
  for (std::size_t i = 0; i < syllables; ++i) {
    w += consonants[uniform(rng, 0, consonants.size() - 1)];
    w += vowels[uniform(rng, 0, vowels.size() - 1)];
    if (coin(rng, 0.3)) w += consonants[uniform(rng, 0, consonants.size() - 1)];
  }
  if (coin(rng, 0.08)) w += exotic[uniform(rng, 0, exotic.size() - 1)];
  if (coin(rng, 0.05)) w += "e";
  return w;
}

std::string random_sentence(Rng& rng, std::size_t lo, std::size_t hi) {
  const auto n = uniform(rng, lo, hi);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    auto w = random_word(rng);
    if (i == 0 || coin(rng, 0.1)) w[0] = static_cast<char>(w[0] - 'a' + 'A');
    if (!s.empty()) s += coin(rng, 0.08) ? ", " : " ";
    s += w;
  }
  static const char* enders[] = {".", "?", "!"};
  return s + enders[uniform(rng, 0, 2)];
}

std::string random_text(Rng& rng, std::size_t max_words) {
  static const std::vector<std::string> stray{"the", "of", "a", "and", "1964", "42", "-", "(x)", "'", "...",
                                              "!!", "don't", "3.14", "\t", "\n", "?"};
  const auto n = uniform(rng, 0, max_words);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (!s.empty()) s += ' ';
    s += coin(rng, 0.25) ? stray[uniform(rng, 0, stray.size() - 1)] : random_word(rng);
    if (coin(rng, 0.12)) s += '.';
  }
  return s;
}

std::vector<std::string> random_tokens(Rng& rng, std::size_t lo, std::size_t hi, std::size_t vocab) {
  std::vector<std::string> out(uniform(rng, lo, hi));
  for (auto& t : out) t = "w" + std::to_string(uniform(rng, 0, vocab - 1));
  return out;
}

namespace {

Json random_json(Rng& rng, int depth) {
  switch (uniform(rng, 0, depth > 0 ? 6 : 4)) {
    case 0: return nullptr;
    case 1: return coin(rng);
    case 2: return static_cast<std::int64_t>(uniform(rng, 0, 2000000)) - 1000000;
    case 3: return uniform_real(rng, -1e6, 1e6);
    case 4: return random_word(rng);
    case 5: {
      Json arr = Json::array();
      for (std::size_t i = uniform(rng, 0, 3); i > 0; --i) arr.push_back(random_json(rng, depth - 1));
      return arr;
    }
    default: {
      Json obj = Json::object();
      for (std::size_t i = uniform(rng, 0, 3); i > 0; --i) obj[random_word(rng)] = random_json(rng, depth - 1);
      return obj;
    }
  }
}

Metadata random_metadata(Rng& rng) {
  Metadata m;
  for (std::size_t i = uniform(rng, 0, 2); i > 0; --i) m[random_word(rng)] = random_json(rng, 2);
  return m;
}

std::vector<Entity> random_entities(Rng& rng, const std::string& text) {
  std::vector<Entity> out;
  const auto len = utf8_length(text);
  if (len == 0) return out;
  for (std::size_t i = uniform(rng, 0, 2); i > 0; --i) {
    const auto start = uniform(rng, 0, len - 1);
    const auto end = uniform(rng, start + 1, std::min(len, start + 12));
    out.push_back({utf8_slice(text, start, end), static_cast<EntityLabel>(uniform(rng, 0, 18)), start, end});
  }
  return out;
}

MetricMap random_metrics(Rng& rng) {
  static const std::vector<std::string> names{"relevance/rouge/rougeL", "readability/traditional/flesch",
                                              "familiarity/wordfreq/nostop", "answerleakage/lexical/stop",
                                              "convergence/llm", "custom/thing"};
  MetricMap m;
  for (std::size_t i = uniform(rng, 0, 3); i > 0; --i) {
    MetricResult r;
    r.name = names[uniform(rng, 0, names.size() - 1)];
    if (r.name.rfind("readability", 0) == 0)
      r.value = static_cast<double>(uniform(rng, 0, 2));
    else if (r.name.rfind("custom", 0) == 0)
      r.value = uniform_real(rng, -50, 50);
    else
      r.value = uniform_real(rng, 0, 1);
    if (coin(rng)) {
      auto detail = random_json(rng, 2);
      if (!detail.is_null()) r.detail = std::move(detail);
    }
    m[r.name] = std::move(r);
  }
  return m;
}

std::string random_qid(Rng& rng) {
  static const std::vector<std::string> pieces{"q", "id/", "~", "a~1", "/b", "x"};
  std::string id = pieces[uniform(rng, 0, pieces.size() - 1)] + std::to_string(uniform(rng, 0, 99999));
  if (coin(rng, 0.3)) id += pieces[uniform(rng, 0, pieces.size() - 1)];
  return id;
}

}  // namespace

Dataset random_dataset(Rng& rng) {
  Dataset d;
  d.name = random_word(rng);
  d.version = std::to_string(uniform(rng, 1, 3)) + "." + std::to_string(uniform(rng, 0, 9));
  d.url = coin(rng) ? "https://example.org/" + random_word(rng) : "";
  d.description = coin(rng) ? random_sentence(rng) : "";
  d.metadata = random_metadata(rng);
  for (std::size_t s = uniform(rng, 1, 3); s > 0; --s) {
    auto& subset = add_subset(d, random_word(rng) + (coin(rng, 0.2) ? "/split~" : ""));
    subset.metadata = random_metadata(rng);
    for (std::size_t q = uniform(rng, 0, 5); q > 0; --q) {
      Instance inst;
      inst.question.text = random_sentence(rng);
      if (coin(rng)) inst.question.question_type = QuestionType{static_cast<QTypeMajor>(uniform(rng, 0, 5)), random_word(rng)};
      inst.question.entities = random_entities(rng, inst.question.text);
      inst.question.metrics = random_metrics(rng);
      inst.question.metadata = random_metadata(rng);
      for (std::size_t a = uniform(rng, 0, 3); a > 0; --a) {
        Answer ans;
        ans.text = random_sentence(rng, 1, 3);
        ans.entities = random_entities(rng, ans.text);
        ans.metrics = random_metrics(rng);
        ans.metadata = random_metadata(rng);
        inst.answers.push_back(std::move(ans));
      }
      for (std::size_t h = uniform(rng, 0, 5); h > 0; --h) {
        Hint hint;
        hint.text = random_sentence(rng);
        hint.source = coin(rng) ? "human" : "model:" + random_word(rng) + "/answer-aware";
        hint.entities = random_entities(rng, hint.text);
        hint.metrics = random_metrics(rng);
        hint.metadata = random_metadata(rng);
        inst.hints.push_back(std::move(hint));
      }
      inst.metadata = random_metadata(rng);
      subset.instances[random_qid(rng)] = std::move(inst);
    }
  }
  return d;
}

// ------------------------------------------------------------------ fakes

std::string ScriptedChat::complete(const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  requests_.push_back(request);
  if (replies_.empty()) throw Error(ErrorKind::EmptyCompletion, "no scripted reply");
  const auto& reply = replies_[std::min(next_, replies_.size() - 1)];
  ++next_;
  return reply;
}

std::vector<ChatRequest> ScriptedChat::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

std::size_t ScriptedChat::calls() const {
  std::lock_guard lock(mutex_);
  return requests_.size();
}

std::string last_user_message(const ChatRequest& request) {
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it)
    if (it->role == "user") return it->content;
  return {};
}

std::vector<EmbeddingVector> TableEmbedder::embed(std::span<const std::string> texts) {
  ++calls;
  std::vector<EmbeddingVector> out;
  for (const auto& t : texts) {
    EmbeddingVector v;
    v.model = "table";
    if (auto it = table_.find(t); it != table_.end()) {
      v.values = it->second;
    } else {
      Rng rng(std::hash<std::string>{}(t));
      v.values.resize(dim_);
      for (auto& x : v.values) x = static_cast<float>(uniform_real(rng, -1, 1));
    }
    out.push_back(std::move(v));
  }
  return out;
}

PageviewResult FakePageviews::pageviews(std::string_view title, int) {
  ++calls;
  auto it = views_.find(std::string(title));
  if (it == views_.end()) return {0, true};
  return {it->second, false};
}

std::vector<double> FakeScorer::score(std::span<const std::string> texts) {
  std::vector<double> out;
  for (const auto& t : texts) out.push_back(fn_(t));
  return out;
}

// ------------------------------------------------------------ stub server

StubServer::StubServer() : server_(std::make_unique<httplib::Server>()) {}

StubServer::~StubServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

void StubServer::get(const std::string& pattern, Handler handler) {
  server_->Get(pattern, [this, handler](const httplib::Request& req, httplib::Response& res) {
    ++hits_;
    handler(req, res);
  });
}

void StubServer::post(const std::string& pattern, Handler handler) {
  server_->Post(pattern, [this, handler](const httplib::Request& req, httplib::Response& res) {
    ++hits_;
    handler(req, res);
  });
}

void StubServer::start() {
  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("stub server could not bind");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

std::string StubServer::url() const { return "http://127.0.0.1:" + std::to_string(port_); }

std::string chat_completion_body(std::string_view content) {
  nlohmann::json j = {{"id", "stub"},
                      {"object", "chat.completion"},
                      {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}}}};
  return j.dump();
}

std::string scripted_hint_reply(std::string_view user_prompt) {
  std::string question(user_prompt);
  if (auto at = question.find("Question: "); at != std::string::npos) question = question.substr(at + 10);
  if (auto nl = question.find('\n'); nl != std::string::npos) question.resize(nl);
  auto words = tokenize(question);
  std::stable_sort(words.begin(), words.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  words.resize(std::min<std::size_t>(words.size(), 5));
  while (words.size() < 5) words.push_back("it");
  std::string out;
  out += "1. Think about the word \"" + words[0] + "\" and what it usually refers to.\n";
  out += "2. The story behind " + words[1] + " is well known to many people.\n";
  out += "3. Recall where " + words[2] + " and " + words[3] + " appear together.\n";
  out += "4. A famous name is linked to " + words[4] + ".\n";
  out += "5. Consider the most obvious candidate first.\n";
  return out;
}

}  // namespace hintkit::test
