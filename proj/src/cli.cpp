#include "hintkit/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "hintkit/config.hpp"
#include "hintkit/dataset_io.hpp"
#include "hintkit/enrichment.hpp"
#include "hintkit/error.hpp"
#include "hintkit/evaluation.hpp"
#include "hintkit/generation.hpp"
#include "hintkit/registry.hpp"
#include "hintkit/report.hpp"

namespace hintkit {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDefaultMetrics =
    "relevance/rouge/rougeL,readability/traditional/flesch,familiarity/wordfreq/nostop,answerleakage/lexical/nostop";

// Routes spdlog to `err` for the duration of one command.
class LogScope {
 public:
  LogScope(std::ostream& err, int verbosity) : previous_(spdlog::default_logger()) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
    auto logger = std::make_shared<spdlog::logger>("hintkit", sink);
    logger->set_pattern("%l: %v");
    logger->set_level(verbosity >= 2 ? spdlog::level::debug
                                     : (verbosity == 1 ? spdlog::level::info : spdlog::level::warn));
    spdlog::set_default_logger(logger);
  }
  ~LogScope() { spdlog::set_default_logger(previous_); }
  LogScope(const LogScope&) = delete;
  LogScope& operator=(const LogScope&) = delete;

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i];
      if (i + 1 < row.size()) line += std::string(widths[i] - row[i].size() + 2, ' ');
    }
    out << line << "\n";
  }
}

struct Globals {
  std::optional<std::string> config_path;
  bool offline = false;
  bool no_cache = false;
  std::string cache_dir;
  int verbosity = 0;
};

struct Context {
  RunConfig cfg;
  bool no_cache = false;
  std::shared_ptr<HttpTransport> transport;

  EndpointConfig endpoint(const EndpointSettings& s, const char* cache_name) const {
    EndpointConfig e;
    e.base_url = s.url;
    e.api_key = s.key;
    if (!no_cache) e.cache = std::make_shared<DiskCache>(cfg.cache_dir / "responses" / cache_name);
    return e;
  }

  RegistryOptions registry() const { return RegistryOptions{cfg.registry_url, transport, {}, {}}; }
};

Context make_context(const Globals& g) {
  Context ctx;
  ctx.cfg = load_run_config(g.config_path ? std::optional<fs::path>(*g.config_path) : std::nullopt);
  if (g.offline) ctx.cfg.offline = true;
  if (!g.cache_dir.empty()) ctx.cfg.cache_dir = g.cache_dir;
  ctx.no_cache = g.no_cache;
  if (ctx.cfg.offline || offline_mode())
    ctx.transport = std::make_shared<OfflineTransport>();
  else
    ctx.transport = std::make_shared<HttplibTransport>();
  return ctx;
}

bool is_offline(const Context& ctx) { return ctx.cfg.offline || offline_mode(); }

std::shared_ptr<ChatClient> make_chat(const Context& ctx, const char* purpose) {
  if (is_offline(ctx)) throw Error(ErrorKind::BackendUnavailable, std::string(purpose) + " needs the chat endpoint, which offline mode forbids", "chat");
  if (ctx.cfg.chat.url.empty())
    throw Error(ErrorKind::BackendUnavailable, "chat endpoint is not configured (set HINTKIT_CHAT_URL)", "chat");
  return std::make_shared<OpenAIChatClient>(ctx.transport, ctx.endpoint(ctx.cfg.chat, "chat"));
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

void print_dataset_stats(std::ostream& out, const Dataset& d) {
  std::vector<std::vector<std::string>> rows{{"subset", "questions", "hints", "answers"}};
  for (const auto& [name, subset] : d.subsets) {
    std::size_t answers = 0;
    for (const auto& [_, inst] : subset.instances) answers += inst.answers.size();
    rows.push_back({name, std::to_string(subset.instances.size()), std::to_string(count_hints(subset)),
                    std::to_string(answers)});
  }
  out << d.name << " (version " << d.version << ")\n";
  print_table(out, rows);
}

// ----------------------------------------------------------------- dataset

int cmd_dataset_list(const Context& ctx, bool update, std::ostream& out) {
  const auto manifest = available_datasets(update, ctx.cfg.cache_dir, ctx.registry());
  std::vector<std::vector<std::string>> rows{{"dataset", "subset", "finetuned", "uses answer", "questions", "hints"}};
  for (const auto& e : manifest.entries)
    for (const auto& s : e.subsets)
      rows.push_back({e.dataset_name, s.name, yes_no(s.finetuned), yes_no(s.uses_answer),
                      std::to_string(s.num_questions), std::to_string(s.num_hints)});
  print_table(out, rows);
  return 0;
}

int cmd_dataset_info(const Context& ctx, const std::string& target, bool update, std::ostream& out) {
  std::error_code ec;
  if (fs::is_regular_file(target, ec)) {
    print_dataset_stats(out, load_dataset(target));
    return 0;
  }
  const auto manifest = available_datasets(update, ctx.cfg.cache_dir, ctx.registry());
  const auto* e = manifest.find(target);
  if (!e) throw Error(ErrorKind::UnknownDataset, "dataset is not in the registry", target);
  out << e->dataset_name << "\n";
  if (!e->description.empty()) out << e->description << "\n";
  out << "download: " << e->download_url << "\nsha256:   " << e->checksum << "\n";
  std::vector<std::vector<std::string>> rows{{"subset", "finetuned", "uses answer", "questions", "hints"}};
  for (const auto& s : e->subsets)
    rows.push_back({s.name, yes_no(s.finetuned), yes_no(s.uses_answer), std::to_string(s.num_questions),
                    std::to_string(s.num_hints)});
  print_table(out, rows);
  return 0;
}

int cmd_dataset_download(const Context& ctx, const std::string& name, const std::string& output, std::ostream& out) {
  const auto dataset = download_dataset(name, ctx.cfg.cache_dir, ctx.registry());
  if (!output.empty()) save_dataset(output, dataset);
  print_dataset_stats(out, dataset);
  out << "cached at " << cached_archive_path(ctx.cfg.cache_dir, name).string() << "\n";
  return 0;
}

int cmd_dataset_validate(const std::string& path, std::ostream& out) {
  const auto bytes = read_file(path);
  const auto json = looks_like_archive(bytes) ? gzip_decompress(std::string_view(bytes).substr(kArchiveMagic.size()))
                                              : bytes;
  const auto violations = validate_json(json);
  if (violations.empty()) {
    out << path << ": ok\n";
    return 0;
  }
  for (const auto& v : violations) out << (v.path.empty() ? "/" : v.path) << ": " << v.message << "\n";
  out << violations.size() << " violation(s)\n";
  return 1;
}

int cmd_dataset_convert(const std::string& in, const std::string& output, std::ostream& out) {
  const auto dataset = load_dataset(in);
  save_dataset(output, dataset);
  out << "wrote " << output << "\n";
  return 0;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string input, output, mode = "agnostic", model, prompt_file;
  std::optional<int> n_hints;
  std::optional<double> temperature;
  std::optional<std::int64_t> seed;
  std::optional<std::size_t> workers;
  bool replace = false, skip_missing = false;
};

int cmd_generate(const Context& ctx, const GenerateArgs& a, std::ostream& out) {
  const auto mode = a.mode == "aware" ? GenerationMode::answer_aware : GenerationMode::answer_agnostic;
  auto dataset = load_dataset(a.input);
  GenerationConfig gen;
  gen.num_hints = a.n_hints.value_or(ctx.cfg.num_hints);
  gen.model = a.model.empty() ? ctx.cfg.chat.model : a.model;
  gen.temperature = a.temperature.value_or(ctx.cfg.temperature);
  gen.max_regeneration_rounds = ctx.cfg.max_regeneration_rounds;
  gen.seed = a.seed ? a.seed : ctx.cfg.seed;
  gen.workers = a.workers.value_or(ctx.cfg.generation_workers);
  const auto prompt_file = a.prompt_file.empty() ? ctx.cfg.prompt_file : fs::path(a.prompt_file);
  if (!prompt_file.empty()) gen.prompt = load_prompt_template(prompt_file, mode);
  auto chat = make_chat(ctx, "generation");

  const auto summary = generate_for_dataset(dataset, mode, gen, *chat, {a.replace, a.skip_missing});
  save_dataset(a.output, dataset);
  for (const auto& [subset, n] : summary.hints_per_subset) out << subset << ": " << n << " hints generated\n";
  if (summary.skipped_instances) out << summary.skipped_instances << " instance(s) skipped (no answer)\n";
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string input, output, metrics, freq_table, vectors, scorer;
  std::optional<std::size_t> workers;
  bool overwrite = false, all_targets = false, progress = false;
};

Backends make_backends(const Context& ctx, const MetricConfig& metrics, const EvaluateArgs& a) {
  Backends b;
  b.offline = is_offline(ctx);
  b.bands = ctx.cfg.bands;
  b.chat_model = ctx.cfg.chat.model;
  b.seed = ctx.cfg.seed;
  auto wants = [&](std::string_view prefix) {
    return std::any_of(metrics.enabled.begin(), metrics.enabled.end(),
                       [&](const MethodSpec& s) { return s.name().rfind(prefix, 0) == 0; });
  };
  const fs::path freq = a.freq_table.empty() ? ctx.cfg.freq_table : fs::path(a.freq_table);
  const fs::path vectors = a.vectors.empty() ? ctx.cfg.vectors : fs::path(a.vectors);
  const fs::path scorer = a.scorer.empty() ? ctx.cfg.linear_scorer : fs::path(a.scorer);
  if (!freq.empty() && wants("familiarity/wordfreq"))
    b.frequencies = std::make_shared<FrequencyTable>(FrequencyTable::load(freq));
  if (!vectors.empty() && wants("relevance/noncontextual"))
    b.vectors = std::make_shared<StaticVectors>(StaticVectors::load(vectors));
  if (!scorer.empty() && wants("readability/ml"))
    b.linear_scorer = std::make_shared<LinearScorer>(LinearScorer::load(scorer));
  if (b.offline) return b;

  if (!ctx.cfg.chat.url.empty())
    b.chat = std::make_shared<OpenAIChatClient>(ctx.transport, ctx.endpoint(ctx.cfg.chat, "chat"));
  if (!ctx.cfg.embed.url.empty())
    b.embed = std::make_shared<OpenAIEmbeddingClient>(ctx.transport, ctx.endpoint(ctx.cfg.embed, "embed"),
                                                      ctx.cfg.embed.model);
  if (wants("familiarity/wikipedia")) b.pageviews = std::make_shared<WikimediaPageviewClient>(ctx.transport);
  if (!ctx.cfg.ner.url.empty())
    b.entities = std::make_shared<RemoteEntityProvider>(ctx.transport, ctx.endpoint(ctx.cfg.ner, "ner"));
  auto scorer_client = [&](const std::string& url) {
    EndpointSettings s{url, ctx.cfg.scorer_key, ""};
    return std::make_shared<RemoteScorerClient>(ctx.transport, ctx.endpoint(s, "scorer"));
  };
  if (!ctx.cfg.specificity_url.empty()) b.scorers["convergence/specificity"] = scorer_client(ctx.cfg.specificity_url);
  if (!ctx.cfg.regression_url.empty()) b.scorers["convergence/regression"] = scorer_client(ctx.cfg.regression_url);
  return b;
}

int cmd_evaluate(const Context& ctx, const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  const std::string list = !a.metrics.empty() ? a.metrics : (!ctx.cfg.metrics.empty() ? ctx.cfg.metrics : kDefaultMetrics);
  auto metrics = parse_metric_list(list);
  if (metrics.enabled.empty()) throw Error(ErrorKind::InvalidArgument, "no metric methods requested");
  metrics.overwrite = a.overwrite;
  metrics.familiarity_all_targets = a.all_targets;
  metrics.workers = a.workers.value_or(ctx.cfg.evaluation_workers);

  auto dataset = load_dataset(a.input);
  const auto backends = make_backends(ctx, metrics, a);
  ProgressSink progress;
  if (a.progress)
    progress = [&err](std::size_t done, std::size_t total) {
      err << "\r" << done << "/" << total << " instances" << (done == total ? "\n" : "") << std::flush;
    };
  const auto summary = evaluate_dataset(dataset, metrics, backends, progress);
  save_dataset(a.output, dataset);

  std::vector<std::vector<std::string>> rows{{"method", "computed", "skipped", "status"}};
  for (const auto& [name, m] : summary.methods)
    rows.push_back({name, std::to_string(m.computed), std::to_string(m.skipped), m.failed ? "failed" : "ok"});
  print_table(out, rows);
  if (!summary.subset_means.empty()) {
    out << "\n";
    std::vector<std::vector<std::string>> means{{"subset", "method", "mean"}};
    for (const auto& [subset, per_method] : summary.subset_means)
      for (const auto& [name, mean] : per_method) means.push_back({subset, name, format_two_decimals(mean)});
    print_table(out, means);
  }
  out << "\n" << summary.computed() << " computed, " << summary.skipped() << " skipped\n";
  for (const auto& [name, m] : summary.methods)
    if (m.failed) err << "warning: " << name << " failed: " << m.error << "\n";
  return summary.all_failed() ? 1 : 0;
}

// ------------------------------------------------------------------ report

int cmd_report(const std::string& input, const std::string& format, bool long_format, const std::string& output,
               std::ostream& out) {
  const auto fmt = parse_report_format(format);
  if (!fmt) throw Error(ErrorKind::InvalidArgument, "unknown report format", format);
  const auto text = render_report(load_dataset(input), *fmt, long_format);
  if (output.empty())
    out << text;
  else
    write_file_atomic(output, text);
  return 0;
}

// ------------------------------------------------------------------ enrich

int cmd_enrich(const Context& ctx, const std::string& input, const std::string& output, const std::string& ner,
               bool overwrite, bool no_types, bool no_entities, std::ostream& out) {
  auto dataset = load_dataset(input);
  std::shared_ptr<EntityProvider> provider;
  if (ner == "remote") {
    if (is_offline(ctx)) throw Error(ErrorKind::BackendUnavailable, "remote NER is forbidden in offline mode", "ner");
    if (ctx.cfg.ner.url.empty())
      throw Error(ErrorKind::BackendUnavailable, "NER endpoint is not configured (set HINTKIT_NER_URL)", "ner");
    provider = std::make_shared<RemoteEntityProvider>(ctx.transport, ctx.endpoint(ctx.cfg.ner, "ner"));
  } else {
    provider = std::make_shared<HeuristicEntityProvider>();
  }
  enrich_dataset(dataset, *provider, {!no_types, !no_entities, overwrite});
  save_dataset(output, dataset);
  out << "wrote " << output << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hint dataset toolkit: registry, generation, evaluation and reports", "hintkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Config file (key = value)");
  app.add_flag("--offline", g.offline, "Forbid all network access");
  app.add_flag("--no-cache", g.no_cache, "Do not use the on-disk response cache");
  app.add_option("--cache-dir", g.cache_dir, "Cache directory");
  app.add_flag("-v,--verbose", g.verbosity, "More logging (repeatable)");

  // dataset
  auto* dataset = app.add_subcommand("dataset", "Registry and local dataset files");
  dataset->require_subcommand(1);
  bool update = false;
  auto* list = dataset->add_subcommand("list", "List datasets in the registry");
  list->add_flag("--update", update, "Refetch the registry manifest");
  std::string info_target;
  auto* info = dataset->add_subcommand("info", "Subset statistics of a registry entry or a local file");
  info->add_option("name", info_target)->required();
  info->add_flag("--update", update, "Refetch the registry manifest");
  std::string download_name, download_output;
  auto* download = dataset->add_subcommand("download", "Download, verify and cache a dataset");
  download->add_option("name", download_name)->required();
  download->add_option("-o,--output", download_output, "Also write the dataset to this file");
  std::string validate_path;
  auto* validate = dataset->add_subcommand("validate", "Check a dataset file");
  validate->add_option("file", validate_path)->required();
  std::string convert_in, convert_out;
  auto* convert = dataset->add_subcommand("convert", "Convert between .json and the archive format");
  convert->add_option("input", convert_in)->required();
  convert->add_option("output", convert_out, "Output file (.json writes JSON, anything else an archive)")->required();

  // generate
  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate hints with a chat model");
  generate->add_option("input", gen.input)->required();
  generate->add_option("output", gen.output)->required();
  generate->add_option("--mode", gen.mode, "aware or agnostic")->check(CLI::IsMember({"aware", "agnostic"}));
  generate->add_option("--n-hints", gen.n_hints, "Hints per question")->check(CLI::PositiveNumber);
  generate->add_option("--model", gen.model, "Chat model name");
  generate->add_option("--temperature", gen.temperature);
  generate->add_option("--seed", gen.seed);
  generate->add_option("--workers", gen.workers)->check(CLI::PositiveNumber);
  generate->add_option("--prompt-file", gen.prompt_file, "Prompt template file");
  generate->add_flag("--replace", gen.replace, "Remove existing hints first");
  generate->add_flag("--skip-missing", gen.skip_missing, "Aware mode: skip questions without an answer");

  // evaluate
  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score hints with the configured metric methods");
  evaluate->add_option("input", ev.input)->required();
  evaluate->add_option("output", ev.output)->required();
  evaluate->add_option("--metrics", ev.metrics, "Comma list of metric/method[/variant]");
  evaluate->add_flag("--overwrite", ev.overwrite, "Recompute existing results");
  evaluate->add_option("--freq-table", ev.freq_table, "Word familiarity table (token<TAB>value)");
  evaluate->add_option("--vectors", ev.vectors, "Static word vectors (token v1 ... vD)");
  evaluate->add_option("--scorer", ev.scorer, "Linear readability scorer (JSON)");
  evaluate->add_option("--workers", ev.workers)->check(CLI::PositiveNumber);
  evaluate->add_flag("--all-targets", ev.all_targets, "Familiarity also scores questions and answers");
  evaluate->add_flag("--progress", ev.progress, "Print a progress counter");
  auto* methods = app.add_subcommand("methods", "List known metric method names");

  // report
  std::string report_input, report_format = "csv", report_output;
  bool report_long = false;
  auto* report = app.add_subcommand("report", "Per-subset metric means");
  report->add_option("input", report_input)->required();
  report->add_option("--format", report_format, "csv, json or md")->check(CLI::IsMember({"csv", "json", "md"}));
  report->add_flag("--long", report_long, "One row per result (csv only)");
  report->add_option("-o,--output", report_output, "Write to a file instead of stdout");

  // enrich
  std::string enrich_in, enrich_out, enrich_ner = "builtin";
  bool enrich_overwrite = false, enrich_no_types = false, enrich_no_entities = false;
  auto* enrich = app.add_subcommand("enrich", "Add question types and entities");
  enrich->add_option("input", enrich_in)->required();
  enrich->add_option("output", enrich_out)->required();
  enrich->add_option("--ner", enrich_ner, "builtin or remote")->check(CLI::IsMember({"builtin", "remote"}));
  enrich->add_flag("--overwrite", enrich_overwrite, "Replace existing types and entities");
  enrich->add_flag("--no-types", enrich_no_types);
  enrich->add_flag("--no-entities", enrich_no_entities);

  // CLI11 wants a mutable argv.
  std::vector<std::string> args(argv, argv + argc);
  std::reverse(args.begin(), args.end());
  args.pop_back();
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  LogScope logs(err, g.verbosity);
  try {
    if (*dataset) {
      if (*validate) return cmd_dataset_validate(validate_path, out);
      if (*convert) return cmd_dataset_convert(convert_in, convert_out, out);
      const auto ctx = make_context(g);
      if (*list) return cmd_dataset_list(ctx, update, out);
      if (*info) return cmd_dataset_info(ctx, info_target, update, out);
      if (*download) return cmd_dataset_download(ctx, download_name, download_output, out);
    }
    if (*methods) {
      for (const auto& m : known_methods()) out << m << "\n";
      return 0;
    }
    if (*report) return cmd_report(report_input, report_format, report_long, report_output, out);
    const auto ctx = make_context(g);
    if (*generate) return cmd_generate(ctx, gen, out);
    if (*evaluate) return cmd_evaluate(ctx, ev, out, err);
    if (*enrich) return cmd_enrich(ctx, enrich_in, enrich_out, enrich_ner, enrich_overwrite, enrich_no_types,
                                   enrich_no_entities, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace hintkit
