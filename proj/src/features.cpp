#include <cmath>
#include <fstream>
#include <numeric>

#include "mieeg/features.hpp"

namespace mieeg {

FeatureVector extract_features(const Epoch& epoch, const FeatureParams& params) {
  const std::size_t n_ch = epoch.n_channels();
  FeatureVector f;
  f.label = epoch.label();
  f.subject_id = epoch.subject_id();
  f.values.assign(3 * n_ch, 0.0);

  for (std::size_t c = 0; c < n_ch; ++c) {
    const auto x = epoch.channel(c);
    const double e = energy(x);
    if (!(e > 0.0))
      throw Error(ErrorCode::AllZeroSpectrum, "channel " + epoch.channel_names()[c] + " is silent");
    const auto ise = instantaneous_spectral_entropy(spectrogram(x, params.window, params.hop, epoch.sample_rate_hz()));
    const double n = static_cast<double>(ise.size());
    const double mean = std::accumulate(ise.begin(), ise.end(), 0.0) / n;
    double ss = 0.0;
    for (double h : ise) ss += (h - mean) * (h - mean);

    f.values[c] = e;
    f.values[n_ch + c] = mean;
    f.values[2 * n_ch + c] = std::sqrt(ss / n);
  }
  return f;
}

std::vector<FeatureVector> extract_features(const SubjectDataset& dataset, const FeatureParams& params) {
  std::vector<FeatureVector> out;
  out.reserve(dataset.size());
  for (const Epoch& e : dataset.epochs()) out.push_back(extract_features(e, params));
  return out;
}

Standardizer Standardizer::fit(std::span<const FeatureVector> features) {
  if (features.empty()) throw Error(ErrorCode::EmptyDataset, "cannot standardize an empty feature set");
  const std::size_t d = features.front().values.size();
  Standardizer s;
  s.mean_.assign(d, 0.0);
  s.scale_.assign(d, 0.0);
  const double n = static_cast<double>(features.size());
  for (const auto& f : features) {
    if (f.values.size() != d) throw Error(ErrorCode::DimensionMismatch, "ragged feature vectors");
    for (std::size_t j = 0; j < d; ++j) s.mean_[j] += f.values[j] / n;
  }
  for (const auto& f : features)
    for (std::size_t j = 0; j < d; ++j) s.scale_[j] += (f.values[j] - s.mean_[j]) * (f.values[j] - s.mean_[j]) / n;
  for (double& v : s.scale_) v = v > 0.0 ? std::sqrt(v) : 1.0;
  return s;
}

FeatureVector Standardizer::apply(const FeatureVector& f) const {
  if (f.values.size() != mean_.size()) throw Error(ErrorCode::DimensionMismatch, "feature length differs from fit");
  FeatureVector out = f;
  for (std::size_t j = 0; j < mean_.size(); ++j) out.values[j] = (f.values[j] - mean_[j]) / scale_[j];
  return out;
}

std::vector<FeatureVector> Standardizer::apply(std::span<const FeatureVector> fs) const {
  std::vector<FeatureVector> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(apply(f));
  return out;
}

void write_feature_csv(std::span<const FeatureVector> features, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  out.precision(17);
  const std::size_t d = features.empty() ? 0 : features.front().values.size();
  out << "subject,label";
  for (std::size_t j = 0; j < d; ++j) out << ",f" << j;
  out << '\n';
  for (const auto& f : features) {
    out << f.subject_id << ',' << label_code(f.label);
    for (double v : f.values) out << ',' << v;
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write error on " + path.string());
}

}  // namespace mieeg
