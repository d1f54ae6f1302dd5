#pragma once

// Brute-force reference implementations of the evaluation metrics. They
// work on raw 0/1 matrices, share no code with the library, and favour
// obviousness over speed.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace labelforge::oracle {

using Matrix = std::vector<std::vector<int>>;  // rows = posts, cols = disorders

struct Binary {
  double ba = 0, p = 0, r = 0, f1 = 0;
};

inline double safe_div(double num, double den) { return den == 0 ? 0.0 : num / den; }

/// Binary metrics over a list of (pred, truth) cells.
inline Binary binary(const std::vector<int>& pred, const std::vector<int>& truth) {
  double tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == 1 && truth[i] == 1) tp += 1;
    if (pred[i] == 1 && truth[i] == 0) fp += 1;
    if (pred[i] == 0 && truth[i] == 1) fn += 1;
    if (pred[i] == 0 && truth[i] == 0) tn += 1;
  }
  Binary out;
  out.p = safe_div(tp, tp + fp);
  out.r = safe_div(tp, tp + fn);
  out.f1 = out.p + out.r == 0 ? 0.0 : 2 * out.p * out.r / (out.p + out.r);
  // Mean recall over the classes that occur in the truth.
  std::vector<double> recalls;
  if (tp + fn > 0) recalls.push_back(tp / (tp + fn));
  if (tn + fp > 0) recalls.push_back(tn / (tn + fp));
  double sum = 0;
  for (double v : recalls) sum += v;
  out.ba = sum / static_cast<double>(recalls.size());
  return out;
}

inline std::vector<int> column(const Matrix& m, std::size_t j) {
  std::vector<int> out;
  for (const auto& row : m) out.push_back(row[j]);
  return out;
}

/// Every cell of the matrix as one binary problem.
inline Binary micro(const Matrix& pred, const Matrix& truth) {
  std::vector<int> p, t;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < pred[i].size(); ++j) {
      p.push_back(pred[i][j]);
      t.push_back(truth[i][j]);
    }
  }
  return binary(p, t);
}

inline double hamming(const Matrix& pred, const Matrix& truth) {
  double wrong = 0, cells = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < pred[i].size(); ++j) {
      wrong += pred[i][j] != truth[i][j];
      cells += 1;
    }
  }
  return wrong / cells;
}

/// Rows become class names ("0110"); mean recall over truth classes.
inline double multiclass_ba(const Matrix& pred, const Matrix& truth) {
  auto name = [](const std::vector<int>& row) {
    std::string s;
    for (int v : row) s += v ? '1' : '0';
    return s;
  };
  std::map<std::string, std::pair<double, double>> classes;  // support, correct
  for (std::size_t i = 0; i < truth.size(); ++i) {
    auto& entry = classes[name(truth[i])];
    entry.first += 1;
    if (name(pred[i]) == name(truth[i])) entry.second += 1;
  }
  double sum = 0;
  for (const auto& [cls, entry] : classes) sum += entry.second / entry.first;
  return sum / static_cast<double>(classes.size());
}

}  // namespace labelforge::oracle
