#include "labelforge/dataset.hpp"

#include <algorithm>
#include <set>

#include "labelforge/error.hpp"
#include "labelforge/registry.hpp"
#include "labelforge/vote.hpp"
#include "text_util.hpp"

namespace labelforge {

std::string_view to_string(CorpusSource source) {
  switch (source) {
    case CorpusSource::dreaddit: return "dreaddit";
    case CorpusSource::depseverity: return "depseverity";
    case CorpusSource::rmhd: return "rmhd";
    case CorpusSource::merged: return "merged";
  }
  return "merged";
}

std::optional<CorpusSource> corpus_source_from_string(std::string_view text) {
  if (text == "dreaddit") return CorpusSource::dreaddit;
  if (text == "depseverity") return CorpusSource::depseverity;
  if (text == "rmhd") return CorpusSource::rmhd;
  if (text == "merged") return CorpusSource::merged;
  return std::nullopt;
}

void Dataset::add_post(Post post) {
  if (post.id.empty()) throw UserError("post id must not be empty");
  if (text::trim(post.text).empty()) throw UserError("post '" + post.id + "' has empty text");
  if (post.is_control && post.origin_disorder) {
    throw UserError("control post '" + post.id + "' must not carry an origin disorder");
  }
  if (index_.count(post.id) != 0) throw UserError("duplicate post id '" + post.id + "'");
  index_.emplace(post.id, posts_.size());
  posts_.push_back(std::move(post));
}

const Post& Dataset::post(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw UserError("unknown post id '" + std::string(id) + "'");
  return posts_[it->second];
}

void Dataset::set_truth(const std::string& post_id, std::string_view disorder, LabelState state,
                        std::string_view source) {
  if (!has_post(post_id)) throw UserError("truth label for unknown post id '" + post_id + "'");
  auto& record = truth_[post_id];
  record.labels.set(std::string(disorder), state);
  record.sources[std::string(disorder)] = std::string(source);
}

const TruthRecord* Dataset::truth(std::string_view post_id) const {
  auto it = truth_.find(post_id);
  return it == truth_.end() ? nullptr : &it->second;
}

void Dataset::put_annotation(Annotation annotation) {
  if (!has_post(annotation.post_id)) {
    throw UserError("annotation for unknown post id '" + annotation.post_id + "'");
  }
  auto key = annotation.key();
  annotations_.insert_or_assign(std::move(key), std::move(annotation));
}

const Annotation* Dataset::annotation(const AnnotationKey& key) const {
  auto it = annotations_.find(key);
  return it == annotations_.end() ? nullptr : &it->second;
}

Dataset Dataset::subset(const std::vector<std::string>& post_ids) const {
  std::set<std::string, std::less<>> wanted(post_ids.begin(), post_ids.end());
  for (const auto& id : wanted) {
    if (!has_post(id)) throw UserError("subset requests unknown post id '" + id + "'");
  }
  Dataset out;
  out.meta_ = meta_;
  for (const auto& p : posts_) {
    if (wanted.count(p.id) != 0) out.add_post(p);
  }
  for (const auto& [id, record] : truth_) {
    if (wanted.count(id) != 0) out.truth_.emplace(id, record);
  }
  for (const auto& [key, annotation] : annotations_) {
    if (wanted.count(key.post_id) != 0) out.annotations_.emplace(key, annotation);
  }
  return out;
}

void Dataset::check_registry(const Registry& registry) const {
  auto check = [&](const LabelVector& labels, const std::string& where) {
    for (const auto& [id, state] : labels.entries()) {
      if (!registry.contains(id)) throw UserError("unknown disorder '" + id + "' in " + where);
    }
  };
  for (const auto& p : posts_) {
    if (p.origin_disorder && !registry.contains(*p.origin_disorder)) {
      throw UserError("unknown origin disorder '" + *p.origin_disorder + "' on post " + p.id);
    }
  }
  for (const auto& [id, record] : truth_) check(record.labels, "truth of post " + id);
  for (const auto& [key, annotation] : annotations_) {
    if (annotation.outcome.labels) check(*annotation.outcome.labels, "annotation of post " + key.post_id);
  }
}

LabelSource LabelSource::parse(std::string_view text, PromptKind kind) {
  LabelSource source;
  source.kind = kind;
  if (text == "truth") return source;
  auto split_models = [](std::string_view list) {
    std::vector<std::string> models;
    for (auto part : text::split(list, ',')) {
      auto trimmed = text::trim(part);
      if (!trimmed.empty()) models.emplace_back(trimmed);
    }
    return models;
  };
  if (text.starts_with("model:")) {
    source.type = Type::model;
    source.models = split_models(text.substr(6));
    if (source.models.size() != 1) throw UserError("label source 'model:' takes exactly one model id");
    return source;
  }
  if (text.starts_with("vote:")) {
    source.type = Type::vote;
    source.models = split_models(text.substr(5));
    if (source.models.size() < 2) throw UserError("label source 'vote:' needs at least two model ids");
    return source;
  }
  // A bare model id is accepted as shorthand.
  if (!text.empty() && text.find(':') == std::string_view::npos) {
    source.type = Type::model;
    source.models = {std::string(text)};
    return source;
  }
  throw UserError("cannot parse label source '" + std::string(text) + "'");
}

std::string LabelSource::describe() const {
  switch (type) {
    case Type::truth: return "truth";
    case Type::model: return "model:" + models.front();
    case Type::vote: {
      std::string out = "vote:";
      for (std::size_t i = 0; i < models.size(); ++i) {
        if (i) out += ',';
        out += models[i];
      }
      return out;
    }
  }
  return "truth";
}

ResolvedPrediction resolve_model_prediction(const Dataset& dataset, std::string_view post_id,
                                            std::string_view model_id, PromptKind kind,
                                            const std::vector<std::string>& disorders) {
  ResolvedPrediction out;
  auto account = [&](const Annotation& a) {
    ++out.annotations;
    if (a.outcome.status == ParseStatus::failed) ++out.failed;
    if (a.outcome.status == ParseStatus::ambiguous_recovered) ++out.recovered;
  };
  // Failed parses score as negative and are tallied separately.
  auto state_of = [](const Annotation& a, const std::string& id) {
    if (a.outcome.status == ParseStatus::failed || !a.outcome.labels) return LabelState::negative;
    auto s = a.outcome.labels->get(id);
    return s == LabelState::unknown ? LabelState::negative : s;
  };
  if (kind == PromptKind::single_label) {
    for (const auto& id : disorders) {
      const auto* a = dataset.annotation({std::string(post_id), std::string(model_id), kind, id});
      if (!a) {
        out.missing.push_back(id);
        continue;
      }
      account(*a);
      out.labels.set(id, state_of(*a, id));
    }
    return out;
  }
  const auto* a = dataset.annotation({std::string(post_id), std::string(model_id), kind, ""});
  if (!a) {
    out.missing = disorders;
    return out;
  }
  account(*a);
  for (const auto& id : disorders) {
    // A multi-label annotation made for a different disorder list leaves gaps.
    if (a->outcome.status != ParseStatus::failed && a->outcome.labels && !a->outcome.labels->has(id)) {
      out.missing.push_back(id);
      continue;
    }
    out.labels.set(id, state_of(*a, id));
  }
  return out;
}

std::map<std::string, LabelVector> resolve_labels(const Dataset& dataset, const LabelSource& source,
                                                  const std::vector<std::string>& disorders,
                                                  bool require_complete) {
  std::map<std::string, LabelVector> out;
  std::vector<std::string> incomplete;
  for (const auto& post : dataset.posts()) {
    const auto* truth = dataset.truth(post.id);
    LabelVector labels;
    bool complete = true;
    if (source.type == LabelSource::Type::truth) {
      if (truth) labels = truth->labels.restricted(disorders);
      complete = labels.covers(disorders);
    } else {
      // Disorders whose truth comes from provenance are not model output.
      std::vector<std::string> modelled;
      for (const auto& id : disorders) {
        bool retained = false;
        if (truth) {
          auto it = truth->sources.find(id);
          retained = it != truth->sources.end() && it->second == cell_source::origin;
        }
        if (retained) {
          labels.set(id, truth->labels.get(id));
        } else {
          modelled.push_back(id);
        }
      }
      if (!modelled.empty()) {
        std::vector<LabelVector> votes;
        for (const auto& model : source.models) {
          auto resolved = resolve_model_prediction(dataset, post.id, model, source.kind, modelled);
          if (!resolved.missing.empty()) {
            complete = false;
            break;
          }
          votes.push_back(std::move(resolved.labels));
        }
        if (complete) {
          LabelVector merged = votes.size() == 1 ? votes.front() : majority_vote(votes);
          for (const auto& [id, state] : merged.entries()) labels.set(id, state);
        }
      }
    }
    if (!complete) {
      incomplete.push_back(post.id);
      continue;
    }
    out.emplace(post.id, std::move(labels));
  }
  if (require_complete && !incomplete.empty()) {
    std::string listed;
    for (std::size_t i = 0; i < incomplete.size() && i < 10; ++i) listed += (i ? ", " : "") + incomplete[i];
    if (incomplete.size() > 10) listed += ", ...";
    throw UserError(std::to_string(incomplete.size()) + " posts lack labels from " + source.describe() +
                    ": " + listed);
  }
  return out;
}

}  // namespace labelforge
