#include "labelforge/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "labelforge/error.hpp"
#include "labelforge/random.hpp"
#include "labelforge/registry.hpp"

namespace labelforge {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  tp += other.tp;
  fp += other.fp;
  tn += other.tn;
  fn += other.fn;
  return *this;
}

ConfusionResult confusion(const LabelMap& pred, const LabelMap& truth, const std::string& disorder) {
  if (pred.size() != truth.size()) {
    throw UserError("prediction and truth cover different posts (" + std::to_string(pred.size()) + " vs " +
                    std::to_string(truth.size()) + ")");
  }
  ConfusionResult result;
  for (const auto& [id, t] : truth) {
    auto it = pred.find(id);
    if (it == pred.end()) throw UserError("post " + id + " has truth but no prediction");
    const auto p_state = it->second.get(disorder);
    const auto t_state = t.get(disorder);
    if (p_state == LabelState::unknown || t_state == LabelState::unknown) {
      ++result.excluded;
      continue;
    }
    const bool p = p_state == LabelState::positive;
    const bool y = t_state == LabelState::positive;
    if (p && y) ++result.counts.tp;
    else if (p) ++result.counts.fp;
    else if (y) ++result.counts.fn;
    else ++result.counts.tn;
  }
  if (result.counts.total() == 0) throw UserError("no scorable cells for disorder " + disorder);
  return result;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double precision(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fp); }

double recall(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fn); }

double f1(const ConfusionCounts& c) {
  const double p = precision(c);
  const double r = recall(c);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double balanced_accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw UserError("balanced accuracy of an empty tally");
  double sum = 0.0;
  int classes = 0;
  if (c.tp + c.fn > 0) {
    sum += ratio(c.tp, c.tp + c.fn);
    ++classes;
  }
  if (c.tn + c.fp > 0) {
    sum += ratio(c.tn, c.tn + c.fp);
    ++classes;
  }
  return sum / classes;
}

OverallMetrics overall_micro(std::span<const ConfusionCounts> per_disorder) {
  ConfusionCounts sum;
  for (const auto& c : per_disorder) sum += c;
  OverallMetrics out;
  out.oba = sum.total() == 0 ? 0.0 : balanced_accuracy(sum);
  out.of1 = f1(sum);
  out.op = precision(sum);
  out.orc = recall(sum);
  return out;
}

double hamming_loss(const BinaryMatrix& pred, const BinaryMatrix& truth) {
  if (pred.rows != truth.rows || pred.cols != truth.cols) {
    throw UserError("hamming loss: shape " + std::to_string(pred.rows) + "x" + std::to_string(pred.cols) +
                    " does not match " + std::to_string(truth.rows) + "x" + std::to_string(truth.cols));
  }
  if (pred.cells.empty()) throw UserError("hamming loss of an empty matrix");
  std::uint64_t mismatches = 0;
  for (std::size_t i = 0; i < pred.cells.size(); ++i) mismatches += (pred.cells[i] != 0) != (truth.cells[i] != 0);
  return static_cast<double>(mismatches) / static_cast<double>(pred.cells.size());
}

std::uint64_t power_set_class(const LabelVector& labels, const std::vector<std::string>& disorders) {
  if (disorders.size() > 63) throw UserError("too many disorders for a power-set class id");
  std::uint64_t id = 0;
  for (std::size_t i = 0; i < disorders.size(); ++i) {
    if (labels.get(disorders[i]) == LabelState::positive) id |= std::uint64_t{1} << i;
  }
  return id;
}

double multiclass_ba(std::span<const LabelVector> pred, std::span<const LabelVector> truth,
                     const std::vector<std::string>& disorders) {
  if (pred.size() != truth.size()) throw UserError("multi-class BA: prediction and truth differ in length");
  if (truth.empty()) throw UserError("multi-class BA of no posts");
  std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> per_class;  // support, hits
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto t = power_set_class(truth[i], disorders);
    auto& [support, hits] = per_class[t];
    ++support;
    hits += power_set_class(pred[i], disorders) == t;
  }
  double sum = 0.0;
  for (const auto& [cls, entry] : per_class) sum += ratio(entry.second, entry.first);
  return sum / static_cast<double>(per_class.size());
}

MetricsReport evaluate(const Dataset& dataset, const Registry& registry, const EvaluateRequest& request) {
  if (request.prediction.type == LabelSource::Type::truth) {
    throw UserError("evaluation needs a model or vote prediction source");
  }
  const auto disorders = registry.in_registry_order(request.disorders);
  if (disorders.empty()) throw UserError("evaluation needs at least one disorder");

  auto truth = resolve_labels(dataset, request.truth, disorders, false);
  if (!request.post_ids.empty()) {
    LabelMap selected;
    for (const auto& id : request.post_ids) {
      auto it = truth.find(id);
      if (it == truth.end()) throw UserError("post " + id + " lacks complete truth labels");
      selected.emplace(id, it->second);
    }
    truth = std::move(selected);
  }
  if (truth.empty()) throw UserError("no posts with complete truth labels to evaluate");

  auto pred = resolve_labels(dataset, request.prediction, disorders, false);
  std::vector<std::string> missing;
  for (const auto& [id, labels] : truth) {
    if (pred.count(id) != 0) continue;
    const auto* record = dataset.truth(id);
    for (const auto& model : request.prediction.models) {
      auto resolved = resolve_model_prediction(dataset, id, model, request.prediction.kind, disorders);
      for (const auto& d : resolved.missing) {
        if (record) {
          auto src = record->sources.find(d);
          if (src != record->sources.end() && src->second == cell_source::origin) continue;
        }
        missing.push_back("(" + id + ", " + d + ", " + model + ")");
      }
    }
  }
  if (!missing.empty()) {
    std::string listed;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) listed += (i ? ", " : "") + missing[i];
    if (missing.size() > 10) listed += ", ...";
    throw UserError(std::to_string(missing.size()) + " cells lack annotations from " +
                    request.prediction.describe() + ": " + listed);
  }
  for (auto it = pred.begin(); it != pred.end();) {
    it = truth.count(it->first) ? std::next(it) : pred.erase(it);
  }

  MetricsReport report;
  report.model = request.prediction.describe();
  report.kind = request.prediction.kind;
  report.disorders = disorders;
  report.truth_source = request.truth.describe();
  report.seed = dataset.meta().seed;
  report.posts = truth.size();

  std::vector<ConfusionCounts> counts;
  for (const auto& d : disorders) {
    const auto c = confusion(pred, truth, d).counts;
    counts.push_back(c);
    report.per_disorder[d] = {c, balanced_accuracy(c), f1(c), precision(c), recall(c)};
    report.overall_counts += c;
  }
  report.overall = overall_micro(counts);

  BinaryMatrix p(truth.size(), disorders.size());
  BinaryMatrix t(truth.size(), disorders.size());
  std::vector<LabelVector> pv;
  std::vector<LabelVector> tv;
  std::size_t row = 0;
  for (const auto& [id, labels] : truth) {
    const auto& predicted = pred.at(id);
    for (std::size_t j = 0; j < disorders.size(); ++j) {
      p.at(row, j) = predicted.get(disorders[j]) == LabelState::positive;
      t.at(row, j) = labels.get(disorders[j]) == LabelState::positive;
    }
    pv.push_back(predicted);
    tv.push_back(labels);
    ++row;
  }
  report.hamming_loss = hamming_loss(p, t);
  report.multiclass_ba = multiclass_ba(pv, tv, disorders);

  for (const auto& [id, labels] : truth) {
    for (const auto& model : request.prediction.models) {
      auto resolved = resolve_model_prediction(dataset, id, model, request.prediction.kind, disorders);
      report.annotations += resolved.annotations;
      report.parse_failures += resolved.failed;
      report.recovered += resolved.recovered;
    }
  }
  report.parse_failure_rate = ratio(report.parse_failures, report.annotations);
  report.recovery_rate = ratio(report.recovered, report.annotations);
  return report;
}

namespace {

nlohmann::json counts_json(const ConfusionCounts& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

ConfusionCounts counts_from(const nlohmann::json& j) {
  return {j.at("tp").get<std::uint64_t>(), j.at("fp").get<std::uint64_t>(), j.at("tn").get<std::uint64_t>(),
          j.at("fn").get<std::uint64_t>()};
}

}  // namespace

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& d : r.disorders) {
    const auto& m = r.per_disorder.at(d);
    per[d] = {{"counts", counts_json(m.counts)}, {"CBA", m.cba}, {"CF1", m.cf1}, {"CP", m.cp}, {"CR", m.cr}};
  }
  return {{"model", r.model},
          {"prompt", std::string(to_string(r.kind))},
          {"disorders", r.disorders},
          {"per_disorder", per},
          {"overall_counts", counts_json(r.overall_counts)},
          {"overall", {{"GBA", r.overall.oba}, {"OF1", r.overall.of1}, {"OP", r.overall.op}, {"OR", r.overall.orc}}},
          {"HL", r.hamming_loss},
          {"BA", r.multiclass_ba},
          {"posts", r.posts},
          {"annotations", r.annotations},
          {"parse_failures", r.parse_failures},
          {"recovered", r.recovered},
          {"parse_failure_rate", r.parse_failure_rate},
          {"recovery_rate", r.recovery_rate},
          {"truth_source", r.truth_source},
          {"seed", r.seed}};
}

MetricsReport metrics_report_from_json(const nlohmann::json& j) {
  try {
    MetricsReport r;
    r.model = j.at("model").get<std::string>();
    r.kind = prompt_kind_from_string(j.at("prompt").get<std::string>());
    r.disorders = j.at("disorders").get<std::vector<std::string>>();
    for (const auto& d : r.disorders) {
      const auto& m = j.at("per_disorder").at(d);
      r.per_disorder[d] = {counts_from(m.at("counts")), m.at("CBA").get<double>(), m.at("CF1").get<double>(),
                           m.at("CP").get<double>(), m.at("CR").get<double>()};
    }
    r.overall_counts = counts_from(j.at("overall_counts"));
    const auto& o = j.at("overall");
    r.overall = {o.at("GBA").get<double>(), o.at("OF1").get<double>(), o.at("OP").get<double>(),
                 o.at("OR").get<double>()};
    r.hamming_loss = j.at("HL").get<double>();
    r.multiclass_ba = j.at("BA").get<double>();
    r.posts = j.at("posts").get<std::size_t>();
    r.annotations = j.at("annotations").get<std::size_t>();
    r.parse_failures = j.at("parse_failures").get<std::size_t>();
    r.recovered = j.at("recovered").get<std::size_t>();
    r.parse_failure_rate = j.at("parse_failure_rate").get<double>();
    r.recovery_rate = j.at("recovery_rate").get<double>();
    r.truth_source = j.at("truth_source").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw UserError(std::string("malformed metrics report: ") + e.what());
  }
}

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_metrics_table(std::span<const MetricsReport> reports) {
  if (reports.empty()) return "";
  const auto& disorders = reports.front().disorders;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head = {"Prompt", "LLM"};
  for (const auto& d : disorders) {
    for (const char* m : {"CBA", "CF1", "CP", "CR"}) head.push_back(d + ":" + m);
  }
  for (const char* m : {"GBA", "OF1", "OP", "OR", "HL", "BA"}) head.emplace_back(m);
  rows.push_back(head);
  for (const auto& r : reports) {
    if (r.disorders != disorders) throw UserError("metrics table rows cover different disorders");
    std::vector<std::string> row = {std::string(to_string(r.kind)), r.model};
    for (const auto& d : disorders) {
      const auto& m = r.per_disorder.at(d);
      for (double v : {m.cba, m.cf1, m.cp, m.cr}) row.push_back(fixed2(v));
    }
    for (double v : {r.overall.oba, r.overall.of1, r.overall.op, r.overall.orc, r.hamming_loss, r.multiclass_ba}) {
      row.push_back(fixed2(v));
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += "  ";
      line += row[i];
      if (i + 1 < row.size()) line.append(width[i] - row[i].size(), ' ');
    }
    out += line + "\n";
  }
  return out;
}

Dataset balanced_subset(const Dataset& dataset, const std::vector<std::string>& disorders, std::uint64_t seed) {
  if (disorders.empty() || disorders.size() > 20) throw UserError("balanced subset needs 1 to 20 disorders");
  std::vector<std::vector<std::string>> classes(std::size_t{1} << disorders.size());
  for (const auto& post : dataset.posts()) {
    const auto* truth = dataset.truth(post.id);
    if (!truth || !truth->labels.covers(disorders)) continue;
    classes[power_set_class(truth->labels, disorders)].push_back(post.id);
  }
  std::size_t minority = SIZE_MAX;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].empty()) {
      throw UserError("power-set class " + std::to_string(c) + " has no posts; cannot balance");
    }
    minority = std::min(minority, classes[c].size());
  }
  std::set<std::string> chosen;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    Rng rng(derive_seed(seed, "balanced:" + std::to_string(c)));
    for (auto i : sample_indices(rng, classes[c].size(), minority)) chosen.insert(classes[c][i]);
  }
  std::vector<std::string> ids;
  for (const auto& post : dataset.posts()) {
    if (chosen.count(post.id) != 0) ids.push_back(post.id);
  }
  auto out = dataset.subset(ids);
  out.meta().params["balanced_subset"] = {{"seed", seed}, {"per_class", minority}, {"disorders", disorders}};
  return out;
}

}  // namespace labelforge
