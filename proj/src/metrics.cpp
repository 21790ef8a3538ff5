#include <numeric>

#include "mieeg/evaluation.hpp"

namespace mieeg {

namespace {

// 0/0 -> 0, reported through `undefined`.
double ratio(std::uint64_t num, std::uint64_t den, bool& undefined) {
  if (den == 0) {
    undefined = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics one_vs_rest(const ConfusionMatrix& cm, std::size_t c) {
  ClassMetrics m;
  const std::uint64_t total = cm.total();
  std::uint64_t row = 0;
  std::uint64_t col = 0;
  for (std::size_t j = 0; j < cm.n_classes(); ++j) {
    row += cm.at(c, j);
    col += cm.at(j, c);
  }
  m.tp = cm.at(c, c);
  m.fn = row - m.tp;
  m.fp = col - m.tp;
  m.tn = total - m.tp - m.fn - m.fp;
  m.has_support = row > 0;

  bool undefined = false;
  m.accuracy = ratio(m.tp + m.tn, total, undefined);
  m.recall = ratio(m.tp, m.tp + m.fn, undefined);
  m.specificity = ratio(m.tn, m.tn + m.fp, undefined);
  // F1 = TP / (TP + (FP + FN) / 2), kept in integers as 2TP / (2TP + FP + FN).
  m.f1 = ratio(2 * m.tp, 2 * m.tp + m.fp + m.fn, undefined);
  m.undefined = undefined;
  return m;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::size_t n_classes) : k_(n_classes), counts_(n_classes * n_classes, 0) {
  if (n_classes < 2) throw Error(ErrorCode::InvalidArgument, "confusion matrix needs at least 2 classes");
}

ConfusionMatrix ConfusionMatrix::binary(std::uint64_t tp, std::uint64_t tn, std::uint64_t fp, std::uint64_t fn) {
  ConfusionMatrix cm(2);
  cm.at(0, 0) = tp;
  cm.at(0, 1) = fn;
  cm.at(1, 0) = fp;
  cm.at(1, 1) = tn;
  return cm;
}

std::uint64_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < k_; ++i) t += at(i, i);
  return t;
}

ConfusionMatrix confusion(std::span<const ClassLabel> truth, std::span<const ClassLabel> predicted) {
  if (truth.size() != predicted.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(truth.size()) + " true labels vs " +
                                               std::to_string(predicted.size()) + " predictions");
  if (truth.empty()) throw Error(ErrorCode::EmptyDataset, "no labels to tally");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) ++cm.at(label_code(truth[i]), label_code(predicted[i]));
  return cm;
}

std::vector<std::size_t> MetricSet::flagged_classes() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < per_class.size(); ++c)
    if (per_class[c].undefined || !per_class[c].has_support) out.push_back(c);
  return out;
}

MetricSet metrics_from_confusion(const ConfusionMatrix& cm) {
  MetricSet m;
  const std::uint64_t total = cm.total();
  if (total == 0) throw Error(ErrorCode::EmptyDataset, "confusion matrix is empty");
  m.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  for (std::size_t c = 0; c < cm.n_classes(); ++c) m.per_class.push_back(one_vs_rest(cm, c));

  if (cm.n_classes() == 2) {
    const auto& pos = m.per_class[0];
    m.recall = pos.recall;
    m.specificity = pos.specificity;
    m.f1 = pos.f1;
    return m;
  }

  std::size_t n = 0;
  for (const auto& c : m.per_class) {
    if (!c.has_support) continue;
    m.recall += c.recall;
    m.specificity += c.specificity;
    m.f1 += c.f1;
    ++n;
  }
  m.recall /= static_cast<double>(n);
  m.specificity /= static_cast<double>(n);
  m.f1 /= static_cast<double>(n);
  return m;
}

}  // namespace mieeg
