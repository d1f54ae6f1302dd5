#include "labelforge/analysis.hpp"

#include <algorithm>
#include <cstdio>

#include "labelforge/error.hpp"

namespace labelforge {

ContingencyTable contingency(const LabelMap& labels, const std::string& disorder_a, const std::string& disorder_b) {
  if (disorder_a == disorder_b) throw UserError("contingency needs two different disorders, got " + disorder_a + " twice");
  ContingencyTable t{disorder_a, disorder_b};
  for (const auto& [id, v] : labels) {
    const auto x = v.get(disorder_a);
    const auto y = v.get(disorder_b);
    if (x == LabelState::unknown || y == LabelState::unknown) continue;
    const bool a_pos = x == LabelState::positive;
    const bool b_pos = y == LabelState::positive;
    if (a_pos && b_pos) ++t.a;
    else if (a_pos) ++t.b;
    else if (b_pos) ++t.c;
    else ++t.d;
  }
  if (t.total() == 0) {
    throw UserError("no post has definite labels for both " + disorder_a + " and " + disorder_b);
  }
  return t;
}

ConditionalProportions conditional_proportions(const ContingencyTable& t) {
  ConditionalProportions p;
  if (t.a + t.b > 0) {
    const double row = static_cast<double>(t.a + t.b);
    p.pos_given_pos = static_cast<double>(t.a) / row;
    p.neg_given_pos = static_cast<double>(t.b) / row;
  }
  if (t.c + t.d > 0) {
    const double row = static_cast<double>(t.c + t.d);
    p.pos_given_neg = static_cast<double>(t.c) / row;
    p.neg_given_neg = static_cast<double>(t.d) / row;
  }
  return p;
}

OddsRatio odds_ratio(const ContingencyTable& t) {
  double a = static_cast<double>(t.a);
  double b = static_cast<double>(t.b);
  double c = static_cast<double>(t.c);
  double d = static_cast<double>(t.d);
  OddsRatio out;
  if (t.a == 0 || t.b == 0 || t.c == 0 || t.d == 0) {
    a += 0.5;
    b += 0.5;
    c += 0.5;
    d += 0.5;
    out.corrected = true;
  }
  out.value = (a * d) / (b * c);
  return out;
}

const OddsRatio& ComorbidityMatrix::odds(const std::string& x, const std::string& y) const {
  for (std::size_t i = 0; i < unordered.size(); ++i) {
    const auto& t = unordered[i];
    if ((t.disorder_a == x && t.disorder_b == y) || (t.disorder_a == y && t.disorder_b == x)) return odds_ratios[i];
  }
  throw UserError("no odds ratio for " + x + " and " + y);
}

ComorbidityMatrix comorbidity_matrix(const LabelMap& labels, const std::vector<std::string>& disorders,
                                     std::string label_source) {
  if (disorders.size() < 2) throw UserError("comorbidity analysis needs at least two disorders");
  ComorbidityMatrix m;
  m.disorders = disorders;
  m.label_source = std::move(label_source);
  for (std::size_t i = 0; i < disorders.size(); ++i) {
    for (std::size_t j = 0; j < disorders.size(); ++j) {
      if (i == j) continue;
      auto t = contingency(labels, disorders[i], disorders[j]);
      m.proportions.push_back(conditional_proportions(t));
      m.ordered.push_back(t);
      if (i < j) {
        m.odds_ratios.push_back(odds_ratio(t));
        m.unordered.push_back(std::move(t));
      }
    }
  }
  return m;
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

nlohmann::json table_json(const ContingencyTable& t) {
  return {{"a", t.a}, {"b", t.b}, {"c", t.c}, {"d", t.d}};
}

}  // namespace

nlohmann::json to_json(const ComorbidityMatrix& m) {
  nlohmann::json conditional = nlohmann::json::array();
  for (std::size_t i = 0; i < m.ordered.size(); ++i) {
    const auto& t = m.ordered[i];
    const auto& p = m.proportions[i];
    conditional.push_back({{"a", t.disorder_a},
                           {"b", t.disorder_b},
                           {"counts", table_json(t)},
                           {"pos_given_pos", optional_json(p.pos_given_pos)},
                           {"neg_given_pos", optional_json(p.neg_given_pos)},
                           {"pos_given_neg", optional_json(p.pos_given_neg)},
                           {"neg_given_neg", optional_json(p.neg_given_neg)}});
  }
  // Full symmetric grid, null on the diagonal.
  const auto n = m.disorders.size();
  nlohmann::json grid = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < n; ++j) {
      row.push_back(i == j ? nlohmann::json() : nlohmann::json(m.odds(m.disorders[i], m.disorders[j]).value));
    }
    grid.push_back(std::move(row));
  }
  nlohmann::json pairs = nlohmann::json::array();
  for (std::size_t i = 0; i < m.unordered.size(); ++i) {
    const auto& t = m.unordered[i];
    pairs.push_back({{"a", t.disorder_a},
                     {"b", t.disorder_b},
                     {"counts", table_json(t)},
                     {"odds_ratio", m.odds_ratios[i].value},
                     {"corrected", m.odds_ratios[i].corrected}});
  }
  return {{"schema", "labelforge.comorbidity"},
          {"version", 1},
          {"label_source", m.label_source},
          {"disorders", m.disorders},
          {"conditional", conditional},
          {"odds_ratios", pairs},
          {"odds_ratio_grid", grid}};
}

DistributionRow label_distribution(const LabelMap& labels, const std::vector<std::string>& disorders,
                                   std::string source) {
  DistributionRow row;
  row.source = std::move(source);
  row.posts = labels.size();
  for (const auto& d : disorders) row.counts[d] = {0, 0};
  for (const auto& [id, v] : labels) {
    for (const auto& d : disorders) {
      const auto s = v.get(d);
      if (s == LabelState::positive) ++row.counts[d].first;
      if (s == LabelState::negative) ++row.counts[d].second;
    }
  }
  return row;
}

nlohmann::json to_json(const DistributionRow& row) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [d, pn] : row.counts) counts[d] = {{"positive", pn.first}, {"negative", pn.second}};
  return {{"source", row.source}, {"posts", row.posts}, {"counts", counts}};
}

std::string render_distribution_table(const std::vector<DistributionRow>& rows,
                                      const std::vector<std::string>& disorders) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head = {"Source"};
  for (const auto& d : disorders) {
    head.push_back(d + ":Positive");
    head.push_back(d + ":Negative");
  }
  cells.push_back(head);
  for (const auto& r : rows) {
    std::vector<std::string> line = {r.source};
    for (const auto& d : disorders) {
      auto it = r.counts.find(d);
      const auto pn = it == r.counts.end() ? std::pair<std::size_t, std::size_t>{0, 0} : it->second;
      line.push_back(std::to_string(pn.first));
      line.push_back(std::to_string(pn.second));
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::string out;
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) out += "  ";
      out += line[i];
      if (i + 1 < line.size()) out.append(width[i] - line[i].size(), ' ');
    }
    out += "\n";
  }
  return out;
}

}  // namespace labelforge
