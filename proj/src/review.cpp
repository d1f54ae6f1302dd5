#include "labelforge/review.hpp"

#include "labelforge/dataset_io.hpp"
#include "labelforge/error.hpp"

namespace labelforge {

std::string_view to_string(Decision decision) {
  switch (decision) {
    case Decision::pending: return "pending";
    case Decision::keep: return "keep";
    case Decision::remove: return "remove";
  }
  return "pending";
}

std::optional<Decision> decision_from_string(std::string_view text) {
  if (text == "pending") return Decision::pending;
  if (text == "keep") return Decision::keep;
  if (text == "remove") return Decision::remove;
  return std::nullopt;
}

void ReviewQueue::add(ReviewItem item) {
  if (index_.count(item.post_id) != 0) throw UserError("post " + item.post_id + " is already queued");
  index_.emplace(item.post_id, items_.size());
  items_.push_back(std::move(item));
}

const ReviewItem* ReviewQueue::find(std::string_view post_id) const {
  auto it = index_.find(post_id);
  return it == index_.end() ? nullptr : &items_[it->second];
}

ReviewItem& ReviewQueue::at(const std::string& post_id) {
  auto it = index_.find(post_id);
  if (it == index_.end()) throw UserError("post " + post_id + " is not in the review queue");
  return items_[it->second];
}

DecideResult ReviewQueue::decide(const std::string& post_id, Decision decision, std::string decided_at,
                                 std::optional<std::string> note) {
  if (decision == Decision::pending) throw UserError("a decision must be keep or remove; use undo to reset");
  auto& item = at(post_id);
  if (item.decision == decision) return DecideResult::unchanged;
  if (item.decision != Decision::pending) {
    throw UserError("post " + post_id + " is already decided " + std::string(to_string(item.decision)) +
                    "; undo it first");
  }
  item.decision = decision;
  item.decided_at = std::move(decided_at);
  if (note) item.note = std::move(note);
  return DecideResult::applied;
}

DecideResult ReviewQueue::undo(const std::string& post_id) {
  auto& item = at(post_id);
  if (item.decision == Decision::pending) return DecideResult::unchanged;
  item.decision = Decision::pending;
  item.decided_at.reset();
  return DecideResult::applied;
}

std::size_t ReviewQueue::keep_all_pending(const std::string& decided_at) {
  std::size_t changed = 0;
  for (auto& item : items_) {
    if (item.decision != Decision::pending) continue;
    item.decision = Decision::keep;
    item.decided_at = decided_at;
    ++changed;
  }
  return changed;
}

std::size_t ReviewQueue::pending_count() const {
  std::size_t n = 0;
  for (const auto& item : items_) n += item.decision == Decision::pending;
  return n;
}

std::vector<std::string> ReviewQueue::removed_ids() const {
  std::vector<std::string> out;
  for (const auto& item : items_) {
    if (item.decision == Decision::remove) out.push_back(item.post_id);
  }
  return out;
}

std::map<std::string, ReviewProgress> ReviewQueue::progress() const {
  std::map<std::string, ReviewProgress> out;
  out["all"];
  for (const auto& item : items_) {
    for (auto* p : {&out["all"], &out[item.origin_disorder]}) {
      ++p->total;
      if (item.decision == Decision::pending) ++p->pending;
      if (item.decision == Decision::keep) ++p->kept;
      if (item.decision == Decision::remove) ++p->removed;
    }
  }
  return out;
}

nlohmann::json to_json(const ReviewItem& item) {
  nlohmann::json j = {{"post_id", item.post_id},
                      {"text", item.text},
                      {"origin_disorder", item.origin_disorder},
                      {"prediction", item.prediction},
                      {"decision", to_string(item.decision)},
                      {"decided_at", item.decided_at ? nlohmann::json(*item.decided_at) : nlohmann::json()},
                      {"note", item.note ? nlohmann::json(*item.note) : nlohmann::json()}};
  return j;
}

nlohmann::json to_json(const ReviewQueue& queue) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : queue.items()) items.push_back(to_json(item));
  return {{"schema", "labelforge.review_queue"}, {"version", 1}, {"auto_kept", queue.auto_kept}, {"items", items}};
}

ReviewQueue review_queue_from_json(const nlohmann::json& record) {
  try {
    if (record.at("schema") != "labelforge.review_queue") throw IoError("not a review queue file");
    if (record.at("version") != 1) {
      throw IoError("review queue version " + record.at("version").dump() + " is not supported (expected 1)");
    }
    ReviewQueue queue;
    queue.auto_kept = record.at("auto_kept").get<std::vector<std::string>>();
    for (const auto& j : record.at("items")) {
      ReviewItem item;
      item.post_id = j.at("post_id").get<std::string>();
      item.text = j.at("text").get<std::string>();
      item.origin_disorder = j.at("origin_disorder").get<std::string>();
      item.prediction = j.value("prediction", item.prediction);
      auto decision = decision_from_string(j.at("decision").get<std::string>());
      if (!decision) throw IoError("bad decision for post " + item.post_id);
      item.decision = *decision;
      if (j.contains("decided_at") && !j["decided_at"].is_null()) item.decided_at = j["decided_at"].get<std::string>();
      if (j.contains("note") && !j["note"].is_null()) item.note = j["note"].get<std::string>();
      queue.add(std::move(item));
    }
    return queue;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed review queue: ") + e.what());
  }
}

void save_review_queue(const ReviewQueue& queue, const std::string& path) {
  write_file_atomic(path, to_json(queue).dump(2) + "\n");
}

ReviewQueue load_review_queue(const std::string& path) {
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("cannot parse review queue " + path + ": " + e.what());
  }
  try {
    return review_queue_from_json(record);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace labelforge
