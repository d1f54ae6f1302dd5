#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace labelforge {

enum class Decision : std::uint8_t { pending, keep, remove };

std::string_view to_string(Decision decision);
std::optional<Decision> decision_from_string(std::string_view text);

/// A screened post whose prediction for its own origin disorder was
/// negative and therefore waits for a human decision.
struct ReviewItem {
  std::string post_id;
  std::string text;
  std::string origin_disorder;
  std::string prediction = "negative";
  Decision decision = Decision::pending;
  std::optional<std::string> decided_at;
  std::optional<std::string> note;

  bool operator==(const ReviewItem&) const = default;
};

struct ReviewProgress {
  std::size_t total = 0;
  std::size_t pending = 0;
  std::size_t kept = 0;
  std::size_t removed = 0;
};

enum class DecideResult { applied, unchanged };

/// Review queue in insertion order.
class ReviewQueue {
 public:
  void add(ReviewItem item);
  const std::vector<ReviewItem>& items() const { return items_; }
  const ReviewItem* find(std::string_view post_id) const;

  /// Records a keep/remove decision. Repeating the current decision is a
  /// no-op. Throws UserError for an unknown id, `pending` as a decision, or
  /// an attempt to change a decided item without undoing it first.
  DecideResult decide(const std::string& post_id, Decision decision, std::string decided_at,
                      std::optional<std::string> note = std::nullopt);
  /// Back to pending; a no-op on a pending item.
  DecideResult undo(const std::string& post_id);
  /// Marks every pending item keep. Returns how many changed.
  std::size_t keep_all_pending(const std::string& decided_at);

  std::size_t pending_count() const;
  std::vector<std::string> removed_ids() const;
  /// Per origin disorder, plus "all".
  std::map<std::string, ReviewProgress> progress() const;

  /// Posts kept by screening without review, for the record.
  std::vector<std::string> auto_kept;

  bool operator==(const ReviewQueue&) const = default;

 private:
  ReviewItem& at(const std::string& post_id);

  std::vector<ReviewItem> items_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

nlohmann::json to_json(const ReviewItem& item);
nlohmann::json to_json(const ReviewQueue& queue);
ReviewQueue review_queue_from_json(const nlohmann::json& record);
/// Atomic replace.
void save_review_queue(const ReviewQueue& queue, const std::string& path);
ReviewQueue load_review_queue(const std::string& path);

}  // namespace labelforge
