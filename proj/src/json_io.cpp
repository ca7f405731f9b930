#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>

#include "hintkit/dataset_io.hpp"
#include "hintkit/error.hpp"
#include "hintkit/text.hpp"

namespace hintkit {

namespace {

using OJson = nlohmann::ordered_json;

std::string escape_pointer(std::string_view token) {
  std::string out;
  for (char c : token) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out.push_back(c);
  }
  return out;
}

std::string join(const std::string& base, std::string_view token) { return base + "/" + escape_pointer(token); }

// ---------------------------------------------------------------- validation

void check_entities(const std::vector<Entity>& entities, std::string_view text, const std::string& path,
                    std::vector<Violation>& out) {
  if (entities.empty()) return;
  const auto cps = decode_utf8(text);
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const auto& e = entities[i];
    const auto at = path + "/entities/" + std::to_string(i);
    if (!(e.start_index < e.end_index) || e.end_index > cps.size()) {
      out.push_back({at, "offsets [" + std::to_string(e.start_index) + "," + std::to_string(e.end_index) +
                             ") outside text of length " + std::to_string(cps.size())});
      continue;
    }
    const auto slice = encode_utf8(std::u32string_view(cps).substr(e.start_index, e.end_index - e.start_index));
    if (slice != e.text) out.push_back({at + "/text", "entity text does not match its span \"" + slice + "\""});
  }
}

void check_metrics(const MetricMap& metrics, const std::string& path, std::vector<Violation>& out) {
  for (const auto& [key, result] : metrics) {
    const auto at = join(path + "/metrics", key);
    if (key.empty()) out.push_back({at, "metric name is empty"});
    if (result.name != key) out.push_back({at, "metric name does not match its key"});
    if (!std::isfinite(result.value)) {
      out.push_back({at + "/value", "metric value is not finite"});
      continue;
    }
    if (auto why = metric_range_violation(result)) out.push_back({at + "/value", *why});
  }
}

// ------------------------------------------------------------------ encoding

OJson to_ordered(const Json& j) {
  if (j.is_object()) {
    OJson out = OJson::object();
    for (const auto& [k, v] : j.items()) out[k] = to_ordered(v);
    return out;
  }
  if (j.is_array()) {
    OJson out = OJson::array();
    for (const auto& v : j) out.push_back(to_ordered(v));
    return out;
  }
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  return nullptr;
}

OJson encode_metadata(const Metadata& metadata) {
  OJson out = OJson::object();
  for (const auto& [k, v] : metadata) out[k] = to_ordered(v);
  return out;
}

OJson encode_entities(const std::vector<Entity>& entities) {
  OJson out = OJson::array();
  for (const auto& e : entities) {
    OJson item = OJson::object();
    item["text"] = e.text;
    item["label"] = std::string(to_string(e.label));
    item["start_index"] = e.start_index;
    item["end_index"] = e.end_index;
    out.push_back(std::move(item));
  }
  return out;
}

OJson encode_metrics(const MetricMap& metrics) {
  OJson out = OJson::object();
  for (const auto& [name, result] : metrics) {
    OJson item = OJson::object();
    item["value"] = result.value;
    item["detail"] = result.detail ? to_ordered(*result.detail) : OJson(nullptr);
    out[name] = std::move(item);
  }
  return out;
}

OJson encode_instance(const Instance& instance) {
  OJson q = OJson::object();
  q["text"] = instance.question.text;
  if (instance.question.question_type) {
    OJson qt = OJson::object();
    qt["major"] = std::string(to_string(instance.question.question_type->major));
    qt["minor"] = instance.question.question_type->minor;
    q["question_type"] = std::move(qt);
  } else {
    q["question_type"] = nullptr;
  }
  q["entities"] = encode_entities(instance.question.entities);
  q["metrics"] = encode_metrics(instance.question.metrics);
  q["metadata"] = encode_metadata(instance.question.metadata);

  OJson answers = OJson::array();
  for (const auto& a : instance.answers) {
    OJson item = OJson::object();
    item["text"] = a.text;
    item["entities"] = encode_entities(a.entities);
    item["metrics"] = encode_metrics(a.metrics);
    item["metadata"] = encode_metadata(a.metadata);
    answers.push_back(std::move(item));
  }

  OJson hints = OJson::array();
  for (const auto& h : instance.hints) {
    OJson item = OJson::object();
    item["text"] = h.text;
    item["source"] = h.source;
    item["entities"] = encode_entities(h.entities);
    item["metrics"] = encode_metrics(h.metrics);
    item["metadata"] = encode_metadata(h.metadata);
    hints.push_back(std::move(item));
  }

  OJson out = OJson::object();
  out["question"] = std::move(q);
  out["answers"] = std::move(answers);
  out["hints"] = std::move(hints);
  out["metadata"] = encode_metadata(instance.metadata);
  return out;
}

// ------------------------------------------------------------------ decoding

[[noreturn]] void schema(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::SchemaViolation, message, path.empty() ? "/" : path);
}

const Json& require_object(const Json& j, const std::string& path, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) schema(path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (auto key : keys) known = known || key == k;
    if (!known) schema(join(path, k), "unknown key");
  }
  for (auto key : keys)
    if (!j.contains(key)) schema(join(path, key), "missing key");
  return j;
}

std::string get_string(const Json& obj, std::string_view key, const std::string& path) {
  const auto& v = obj.at(std::string(key));
  if (!v.is_string()) schema(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::size_t get_index(const Json& obj, std::string_view key, const std::string& path) {
  const auto& v = obj.at(std::string(key));
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    schema(join(path, key), "expected a non-negative integer");
  return v.get<std::size_t>();
}

Metadata decode_metadata(const Json& j, const std::string& path) {
  if (!j.is_object()) schema(path, "expected an object");
  Metadata out;
  for (const auto& [k, v] : j.items()) out.emplace(k, v);
  return out;
}

std::vector<Entity> decode_entities(const Json& j, const std::string& path) {
  if (!j.is_array()) schema(path, "expected an array");
  std::vector<Entity> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto at = path + "/" + std::to_string(i);
    const auto& obj = require_object(j[i], at, {"text", "label", "start_index", "end_index"});
    Entity e;
    e.text = get_string(obj, "text", at);
    const auto label = get_string(obj, "label", at);
    auto parsed = parse_entity_label(label);
    if (!parsed) schema(at + "/label", "unknown entity label \"" + label + "\"");
    e.label = *parsed;
    e.start_index = get_index(obj, "start_index", at);
    e.end_index = get_index(obj, "end_index", at);
    out.push_back(std::move(e));
  }
  return out;
}

MetricMap decode_metrics(const Json& j, const std::string& path) {
  if (!j.is_object()) schema(path, "expected an object");
  MetricMap out;
  for (const auto& [name, v] : j.items()) {
    const auto at = join(path, name);
    const auto& obj = require_object(v, at, {"value", "detail"});
    if (!obj["value"].is_number()) schema(at + "/value", "expected a number");
    MetricResult r;
    r.name = name;
    r.value = obj["value"].get<double>();
    if (!obj["detail"].is_null()) r.detail = obj["detail"];
    out.emplace(name, std::move(r));
  }
  return out;
}

Instance decode_instance(const Json& j, const std::string& path) {
  const auto& obj = require_object(j, path, {"question", "answers", "hints", "metadata"});
  Instance inst;

  const auto qp = path + "/question";
  const auto& q = require_object(obj["question"], qp, {"text", "question_type", "entities", "metrics", "metadata"});
  inst.question.text = get_string(q, "text", qp);
  if (!q["question_type"].is_null()) {
    const auto tp = qp + "/question_type";
    const auto& qt = require_object(q["question_type"], tp, {"major", "minor"});
    const auto major = get_string(qt, "major", tp);
    auto parsed = parse_qtype_major(major);
    if (!parsed) schema(tp + "/major", "unknown question type \"" + major + "\"");
    inst.question.question_type = QuestionType{*parsed, get_string(qt, "minor", tp)};
  }
  inst.question.entities = decode_entities(q["entities"], qp + "/entities");
  inst.question.metrics = decode_metrics(q["metrics"], qp + "/metrics");
  inst.question.metadata = decode_metadata(q["metadata"], qp + "/metadata");

  const auto ap = path + "/answers";
  if (!obj["answers"].is_array()) schema(ap, "expected an array");
  for (std::size_t i = 0; i < obj["answers"].size(); ++i) {
    const auto at = ap + "/" + std::to_string(i);
    const auto& a = require_object(obj["answers"][i], at, {"text", "entities", "metrics", "metadata"});
    Answer answer;
    answer.text = get_string(a, "text", at);
    answer.entities = decode_entities(a["entities"], at + "/entities");
    answer.metrics = decode_metrics(a["metrics"], at + "/metrics");
    answer.metadata = decode_metadata(a["metadata"], at + "/metadata");
    inst.answers.push_back(std::move(answer));
  }

  const auto hp = path + "/hints";
  if (!obj["hints"].is_array()) schema(hp, "expected an array");
  for (std::size_t i = 0; i < obj["hints"].size(); ++i) {
    const auto at = hp + "/" + std::to_string(i);
    const auto& h = require_object(obj["hints"][i], at, {"text", "source", "entities", "metrics", "metadata"});
    Hint hint;
    hint.text = get_string(h, "text", at);
    hint.source = get_string(h, "source", at);
    hint.entities = decode_entities(h["entities"], at + "/entities");
    hint.metrics = decode_metrics(h["metrics"], at + "/metrics");
    hint.metadata = decode_metadata(h["metadata"], at + "/metadata");
    inst.hints.push_back(std::move(hint));
  }

  inst.metadata = decode_metadata(obj["metadata"], path + "/metadata");
  return inst;
}

Dataset decode_dataset(const Json& j) {
  const auto& obj = require_object(j, "", {"name", "version", "url", "description", "metadata", "subsets"});
  Dataset ds;
  ds.name = get_string(obj, "name", "");
  ds.version = get_string(obj, "version", "");
  ds.url = get_string(obj, "url", "");
  ds.description = get_string(obj, "description", "");
  ds.metadata = decode_metadata(obj["metadata"], "/metadata");
  if (!obj["subsets"].is_object()) schema("/subsets", "expected an object");
  for (const auto& [key, sj] : obj["subsets"].items()) {
    const auto sp = join("/subsets", key);
    const auto& s = require_object(sj, sp, {"name", "metadata", "instances"});
    Subset subset;
    subset.name = get_string(s, "name", sp);
    subset.metadata = decode_metadata(s["metadata"], sp + "/metadata");
    if (!s["instances"].is_object()) schema(sp + "/instances", "expected an object");
    for (const auto& [q_id, ij] : s["instances"].items())
      subset.instances.emplace(q_id, decode_instance(ij, join(sp + "/instances", q_id)));
    ds.subsets.emplace(key, std::move(subset));
  }
  return ds;
}

// Tracks object keys while parsing so duplicate keys, which the parser would
// silently collapse, are reported with the path of the enclosing object.
class DuplicateKeyTracker {
 public:
  bool operator()(int /*depth*/, nlohmann::json::parse_event_t event, Json& parsed) {
    using E = nlohmann::json::parse_event_t;
    switch (event) {
      case E::object_start:
      case E::array_start:
        frames_.push_back(Frame{event == E::array_start, child_path(), {}, {}, 0});
        break;
      case E::key: {
        auto& top = frames_.back();
        auto key = parsed.get<std::string>();
        if (!top.keys.insert(key).second) duplicates_.push_back({top.path, "duplicate key \"" + key + "\""});
        top.key = std::move(key);
        break;
      }
      case E::value:
        advance();
        break;
      case E::object_end:
      case E::array_end:
        frames_.pop_back();
        advance();
        break;
    }
    return true;
  }

  const std::vector<Violation>& duplicates() const { return duplicates_; }

 private:
  struct Frame {
    bool array;
    std::string path;
    std::set<std::string> keys;
    std::string key;
    std::size_t index;
  };

  std::string child_path() const {
    if (frames_.empty()) return "";
    const auto& top = frames_.back();
    return top.array ? top.path + "/" + std::to_string(top.index) : join(top.path, top.key);
  }

  void advance() {
    if (!frames_.empty() && frames_.back().array) ++frames_.back().index;
  }

  std::vector<Frame> frames_;
  std::vector<Violation> duplicates_;
};

bool is_instances_path(const std::string& path) {
  return path.rfind("/subsets/", 0) == 0 && path.size() > 10 && path.ends_with("/instances") &&
         std::count(path.begin(), path.end(), '/') == 3;
}

Json parse_tracked(std::string_view text, std::vector<Violation>& duplicates) {
  DuplicateKeyTracker tracker;
  Json j;
  try {
    j = Json::parse(text.begin(), text.end(), std::ref(tracker));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MalformedJson, e.what());
  }
  duplicates = tracker.duplicates();
  return j;
}

std::string summarize(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.path + ": " + v.message;
  }
  return out;
}

}  // namespace

std::vector<Violation> validate_dataset(const Dataset& dataset) {
  std::vector<Violation> out;
  if (dataset.version.empty()) out.push_back({"/version", "version is empty"});
  for (const auto& [key, subset] : dataset.subsets) {
    const auto sp = join("/subsets", key);
    if (key.empty()) out.push_back({sp, "subset name is empty"});
    if (subset.name != key) out.push_back({sp + "/name", "subset name does not match its key"});
    for (const auto& [q_id, inst] : subset.instances) {
      const auto ip = join(sp + "/instances", q_id);
      if (q_id.empty()) out.push_back({ip, "q_id is empty"});
      const auto qp = ip + "/question";
      if (inst.question.text.empty()) out.push_back({qp + "/text", "question text is empty"});
      check_entities(inst.question.entities, inst.question.text, qp, out);
      check_metrics(inst.question.metrics, qp, out);
      for (std::size_t i = 0; i < inst.answers.size(); ++i) {
        const auto ap = ip + "/answers/" + std::to_string(i);
        const auto& a = inst.answers[i];
        if (a.text.empty()) out.push_back({ap + "/text", "answer text is empty"});
        check_entities(a.entities, a.text, ap, out);
        check_metrics(a.metrics, ap, out);
      }
      for (std::size_t i = 0; i < inst.hints.size(); ++i) {
        const auto hp = ip + "/hints/" + std::to_string(i);
        const auto& h = inst.hints[i];
        if (h.text.empty()) out.push_back({hp + "/text", "hint text is empty"});
        check_entities(h.entities, h.text, hp, out);
        check_metrics(h.metrics, hp, out);
      }
    }
  }
  return out;
}

std::string export_json(const Dataset& dataset) {
  if (auto violations = validate_dataset(dataset); !violations.empty())
    throw Error(ErrorKind::ValidationFailed, summarize(violations), violations.front().path);

  OJson subsets = OJson::object();
  for (const auto& [key, subset] : dataset.subsets) {
    OJson instances = OJson::object();
    for (const auto& [q_id, inst] : subset.instances) instances[q_id] = encode_instance(inst);
    OJson s = OJson::object();
    s["name"] = subset.name;
    s["metadata"] = encode_metadata(subset.metadata);
    s["instances"] = std::move(instances);
    subsets[key] = std::move(s);
  }
  OJson root = OJson::object();
  root["name"] = dataset.name;
  root["version"] = dataset.version;
  root["url"] = dataset.url;
  root["description"] = dataset.description;
  root["metadata"] = encode_metadata(dataset.metadata);
  root["subsets"] = std::move(subsets);
  return root.dump(2) + "\n";
}

Dataset import_json(std::string_view text) {
  std::vector<Violation> duplicates;
  const auto j = parse_tracked(text, duplicates);
  for (const auto& d : duplicates) {
    if (is_instances_path(d.path)) throw Error(ErrorKind::ValidationFailed, "duplicate q_id: " + d.message, d.path);
    throw Error(ErrorKind::SchemaViolation, d.message, d.path.empty() ? "/" : d.path);
  }
  auto ds = decode_dataset(j);
  if (auto violations = validate_dataset(ds); !violations.empty())
    throw Error(ErrorKind::ValidationFailed, summarize(violations), violations.front().path);
  return ds;
}

std::vector<Violation> validate_json(std::string_view text) {
  std::vector<Violation> out;
  Json j;
  try {
    j = parse_tracked(text, out);
  } catch (const Error& e) {
    return {{"/", e.what()}};
  }
  try {
    auto more = validate_dataset(decode_dataset(j));
    out.insert(out.end(), more.begin(), more.end());
  } catch (const Error& e) {
    out.push_back({e.path(), e.what()});
  }
  return out;
}

}  // namespace hintkit
