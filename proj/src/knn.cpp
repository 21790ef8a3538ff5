#include <algorithm>
#include <cmath>

#include "mieeg/classifiers.hpp"

namespace mieeg {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

KnnModel KnnModel::fit(std::span<const FeatureVector> features, std::size_t k, KnnMetric metric) {
  if (features.empty()) throw Error(ErrorCode::EmptyDataset, "KNN needs training data");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  if (k > features.size())
    throw Error(ErrorCode::KTooLarge, "k = " + std::to_string(k) + " exceeds " + std::to_string(features.size()) +
                                          " training points");
  KnnModel m;
  m.k_ = k;
  m.metric_ = metric;
  m.dim_ = features.front().values.size();
  m.data_.reserve(features.size() * m.dim_);
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    if (f.values.size() != m.dim_) throw Error(ErrorCode::DimensionMismatch, "ragged feature vectors");
    const double norm = std::sqrt(dot(f.values, f.values));
    if (metric == KnnMetric::Cosine && !(norm > 0.0))
      throw Error(ErrorCode::ZeroNormVector, "training vector " + std::to_string(i) + " has zero norm");
    m.data_.insert(m.data_.end(), f.values.begin(), f.values.end());
    m.norms_.push_back(norm);
    m.labels_.push_back(f.label);
  }
  return m;
}

double KnnModel::distance(std::span<const double> a, std::size_t i) const {
  const auto b = point(i);
  if (metric_ == KnnMetric::Euclidean) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(s);
  }
  const double na = std::sqrt(dot(a, a));
  return 1.0 - dot(a, b) / (na * norms_[i]);
}

std::vector<Neighbor> KnnModel::neighbors(std::span<const double> x) const {
  if (x.size() != dim_)
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(dim_) + " features, got " + std::to_string(x.size()));
  if (metric_ == KnnMetric::Cosine && !(dot(x, x) > 0.0))
    throw Error(ErrorCode::ZeroNormVector, "cosine distance of a zero query");

  std::vector<Neighbor> all(size());
  for (std::size_t i = 0; i < size(); ++i) all[i] = {distance(x, i), i};
  const auto closer = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k_), all.end(), closer);
  all.resize(k_);
  return all;
}

Prediction KnnModel::predict(std::span<const double> x) const {
  const auto nn = neighbors(x);
  std::array<std::size_t, kNumClasses> votes{};
  std::array<double, kNumClasses> summed{};
  for (const auto& n : nn) {
    const int c = label_code(labels_[n.index]);
    ++votes[c];
    summed[c] += n.distance;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && votes[c] > 0 && summed[c] < summed[best])) best = c;
  }
  Prediction p;
  p.label = static_cast<ClassLabel>(best);
  for (std::size_t c = 0; c < kNumClasses; ++c) p.scores[c] = static_cast<double>(votes[c]) / static_cast<double>(k_);
  return p;
}

}  // namespace mieeg
