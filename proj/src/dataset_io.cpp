#include "labelforge/dataset_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "labelforge/error.hpp"

namespace labelforge {
namespace {

using nlohmann::json;

json labels_to_json(const LabelVector& labels) {
  json out = json::object();
  for (const auto& [id, state] : labels.entries()) out[id] = to_string(state);
  return out;
}

LabelVector labels_from_json(const json& record) {
  LabelVector labels;
  for (const auto& [id, value] : record.items()) {
    auto state = label_state_from_string(value.get<std::string>());
    if (!state) throw IoError("invalid label state '" + value.get<std::string>() + "'");
    labels.set(id, *state);
  }
  return labels;
}

json optional_string(const std::optional<std::string>& value) {
  return value ? json(*value) : json(nullptr);
}

std::optional<std::string> optional_string_from(const json& record, const char* key) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

json post_to_json(const Dataset& dataset, const Post& post,
                  const std::vector<const Annotation*>& annotations) {
  json out;
  out["id"] = post.id;
  out["text"] = post.text;
  out["source"] = to_string(post.source);
  out["origin_subreddit"] = optional_string(post.origin_subreddit);
  out["origin_disorder"] = optional_string(post.origin_disorder);
  out["is_control"] = post.is_control;
  if (const auto* truth = dataset.truth(post.id)) {
    json sources = json::object();
    for (const auto& [id, source] : truth->sources) sources[id] = source;
    out["truth"] = {{"labels", labels_to_json(truth->labels)}, {"sources", sources}};
  } else {
    out["truth"] = nullptr;
  }
  json list = json::array();
  for (const auto* a : annotations) {
    auto record = annotation_to_json(*a);
    record.erase("post_id");
    list.push_back(std::move(record));
  }
  out["annotations"] = std::move(list);
  return out;
}

}  // namespace

json outcome_to_json(const ParseOutcome& outcome) {
  json out;
  out["status"] = to_string(outcome.status);
  out["labels"] = outcome.labels ? labels_to_json(*outcome.labels) : json(nullptr);
  out["unknown_tokens"] = outcome.unknown_tokens;
  out["note"] = outcome.note;
  return out;
}

ParseOutcome outcome_from_json(const json& record) {
  ParseOutcome outcome;
  auto status = parse_status_from_string(record.at("status").get<std::string>());
  if (!status) throw IoError("invalid parse status in annotation");
  outcome.status = *status;
  if (!record.at("labels").is_null()) outcome.labels = labels_from_json(record.at("labels"));
  outcome.unknown_tokens = record.at("unknown_tokens").get<std::vector<std::string>>();
  outcome.note = record.at("note").get<std::string>();
  return outcome;
}

json annotation_to_json(const Annotation& a) {
  json out;
  out["post_id"] = a.post_id;
  out["model_id"] = a.model_id;
  out["kind"] = to_string(a.kind);
  out["target"] = a.target;
  out["raw_response"] = a.raw_response;
  out["outcome"] = outcome_to_json(a.outcome);
  out["latency_ms"] = a.latency_ms;
  out["cached"] = a.cached;
  out["timestamp"] = a.timestamp;
  return out;
}

Annotation annotation_from_json(const json& record) {
  Annotation a;
  if (auto it = record.find("post_id"); it != record.end()) a.post_id = it->get<std::string>();
  a.model_id = record.at("model_id").get<std::string>();
  a.kind = prompt_kind_from_string(record.at("kind").get<std::string>());
  a.target = record.at("target").get<std::string>();
  a.raw_response = record.at("raw_response").get<std::string>();
  a.outcome = outcome_from_json(record.at("outcome"));
  a.latency_ms = record.at("latency_ms").get<std::int64_t>();
  a.cached = record.at("cached").get<bool>();
  a.timestamp = record.at("timestamp").get<std::string>();
  return a;
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
  json header;
  header["schema"] = kDatasetSchemaName;
  header["version"] = kDatasetSchemaVersion;
  header["meta"] = {{"name", dataset.meta().name}, {"seed", dataset.meta().seed}, {"params", dataset.meta().params}};
  header["posts"] = dataset.size();
  out << header.dump() << '\n';

  std::map<std::string, std::vector<const Annotation*>, std::less<>> by_post;
  for (const auto& [key, annotation] : dataset.annotations()) by_post[key.post_id].push_back(&annotation);
  static const std::vector<const Annotation*> kNone;
  for (const auto& post : dataset.posts()) {
    auto it = by_post.find(post.id);
    out << post_to_json(dataset, post, it == by_post.end() ? kNone : it->second).dump() << '\n';
  }
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ostringstream buffer;
  write_dataset(dataset, buffer);
  write_file_atomic(path, buffer.str());
}

Dataset read_dataset(std::istream& in, const std::string& origin) {
  Dataset dataset;
  std::string line;
  std::size_t line_no = 0;
  std::size_t offset = 0;  // byte offset of the current line
  std::size_t declared_posts = 0;
  auto fail = [&](const std::string& what, std::size_t byte) -> IoError {
    return IoError(origin + ": " + what + " (line " + std::to_string(line_no) + ", byte offset " +
                   std::to_string(byte) + ")");
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      const std::size_t byte = line_offset + (e.byte > 0 ? e.byte - 1 : 0);
      throw fail(std::string("parse error: ") + e.what(), byte);
    }
    try {
      if (line_no == 1) {
        if (!record.is_object() || record.value("schema", "") != kDatasetSchemaName) {
          throw fail("not a labelforge dataset file", line_offset);
        }
        const int version = record.at("version").get<int>();
        if (version != kDatasetSchemaVersion) {
          throw IoError(origin + ": dataset schema version " + std::to_string(version) +
                        " is not supported (this build reads version " +
                        std::to_string(kDatasetSchemaVersion) + ")");
        }
        const auto& meta = record.at("meta");
        dataset.meta().name = meta.at("name").get<std::string>();
        dataset.meta().seed = meta.at("seed").get<std::uint64_t>();
        dataset.meta().params = meta.at("params");
        declared_posts = record.at("posts").get<std::size_t>();
        continue;
      }
      Post post;
      post.id = record.at("id").get<std::string>();
      post.text = record.at("text").get<std::string>();
      auto source = corpus_source_from_string(record.at("source").get<std::string>());
      if (!source) throw fail("invalid source tag", line_offset);
      post.source = *source;
      post.origin_subreddit = optional_string_from(record, "origin_subreddit");
      post.origin_disorder = optional_string_from(record, "origin_disorder");
      post.is_control = record.at("is_control").get<bool>();
      const std::string id = post.id;
      dataset.add_post(std::move(post));
      const auto& truth = record.at("truth");
      if (!truth.is_null()) {
        auto labels = labels_from_json(truth.at("labels"));
        const auto& sources = truth.at("sources");
        for (const auto& [disorder, state] : labels.entries()) {
          dataset.set_truth(id, disorder, state, sources.value(disorder, std::string(cell_source::corpus)));
        }
      }
      for (const auto& entry : record.at("annotations")) {
        auto annotation = annotation_from_json(entry);
        annotation.post_id = id;
        dataset.put_annotation(std::move(annotation));
      }
    } catch (const json::exception& e) {
      throw fail(std::string("malformed record: ") + e.what(), line_offset);
    } catch (const UserError& e) {
      throw fail(e.what(), line_offset);
    }
  }
  if (line_no == 0) throw IoError(origin + ": empty dataset file");
  if (dataset.size() != declared_posts) {
    throw IoError(origin + ": truncated dataset, header declares " + std::to_string(declared_posts) +
                  " posts but " + std::to_string(dataset.size()) + " were read (byte offset " +
                  std::to_string(offset > 0 ? offset - 1 : 0) + ")");
  }
  return dataset;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + path);
  return read_dataset(in, path);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace labelforge
