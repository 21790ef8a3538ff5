#include "mieeg/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mieeg {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::UnknownChannel: return "UnknownChannel";
    case ErrorCode::TooFewEpochs: return "TooFewEpochs";
    case ErrorCode::InvalidBand: return "InvalidBand";
    case ErrorCode::UnstableDesign: return "UnstableDesign";
    case ErrorCode::NonFiniteOutput: return "NonFiniteOutput";
    case ErrorCode::SingleChannel: return "SingleChannel";
    case ErrorCode::EmptySignal: return "EmptySignal";
    case ErrorCode::AllZeroSpectrum: return "AllZeroSpectrum";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::ZeroPowerFrame: return "ZeroPowerFrame";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::ClassAbsent: return "ClassAbsent";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::ZeroNormVector: return "ZeroNormVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::AllSubjectsFailed: return "AllSubjectsFailed";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

std::optional<ClassLabel> label_from_code(int code) {
  if (code < 0 || code >= static_cast<int>(kNumClasses)) return std::nullopt;
  return static_cast<ClassLabel>(code);
}

std::string_view label_name(ClassLabel label) {
  switch (label) {
    case ClassLabel::Left: return "left";
    case ClassLabel::Right: return "right";
    case ClassLabel::Rest: return "rest";
  }
  return "?";
}

// ---------------------------------------------------------------------------

Epoch::Epoch(int subject_id, ClassLabel label, std::vector<std::string> channel_names, std::size_t n_samples,
             std::vector<double> data, double sample_rate_hz)
    : subject_id_(subject_id),
      label_(label),
      channel_names_(std::move(channel_names)),
      n_samples_(n_samples),
      data_(std::move(data)),
      sample_rate_hz_(sample_rate_hz) {
  if (subject_id_ <= 0) throw Error(ErrorCode::InvalidArgument, "subject id must be positive");
  if (!label_from_code(label_code(label_))) throw Error(ErrorCode::LabelOutOfRange, "bad class label");
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_))
    throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
  if (channel_names_.empty() || n_samples_ == 0)
    throw Error(ErrorCode::ShapeMismatch, "epoch needs at least one channel and one sample");
  if (data_.size() != channel_names_.size() * n_samples_)
    throw Error(ErrorCode::ShapeMismatch, "sample count " + std::to_string(data_.size()) + " != " +
                                              std::to_string(channel_names_.size()) + " x " +
                                              std::to_string(n_samples_));
  for (double v : data_)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteSample, "epoch contains NaN or Inf");
}

Epoch Epoch::from_rows(int subject_id, ClassLabel label, std::vector<std::string> channel_names,
                       const std::vector<std::vector<double>>& rows, double sample_rate_hz) {
  if (rows.size() != channel_names.size())
    throw Error(ErrorCode::ShapeMismatch, "row count differs from channel name count");
  const std::size_t n = rows.empty() ? 0 : rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw Error(ErrorCode::ShapeMismatch, "ragged epoch rows");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return Epoch(subject_id, label, std::move(channel_names), n, std::move(flat), sample_rate_hz);
}

Epoch Epoch::with_data(std::vector<double> data) const {
  return Epoch(subject_id_, label_, channel_names_, n_samples_, std::move(data), sample_rate_hz_);
}

Epoch Epoch::with_data(std::vector<std::string> channel_names, std::vector<double> data) const {
  return Epoch(subject_id_, label_, std::move(channel_names), n_samples_, std::move(data), sample_rate_hz_);
}

// ---------------------------------------------------------------------------

SubjectDataset::SubjectDataset(int subject_id, std::vector<Epoch> epochs, Provenance provenance)
    : subject_id_(subject_id), epochs_(std::move(epochs)), provenance_(provenance) {
  if (subject_id_ <= 0) throw Error(ErrorCode::InvalidArgument, "subject id must be positive");
  if (epochs_.empty()) return;
  const Epoch& first = epochs_.front();
  for (const Epoch& e : epochs_) {
    if (e.subject_id() != subject_id_)
      throw Error(ErrorCode::ShapeMismatch, "epoch subject id differs from dataset subject id");
    if (e.n_samples() != first.n_samples() || e.sample_rate_hz() != first.sample_rate_hz() ||
        e.channel_names() != first.channel_names())
      throw Error(ErrorCode::ShapeMismatch, "epochs disagree on channels, length or sample rate");
  }
}

std::size_t SubjectDataset::n_channels() const { return empty() ? 0 : epochs_.front().n_channels(); }
std::size_t SubjectDataset::n_samples() const { return empty() ? 0 : epochs_.front().n_samples(); }
double SubjectDataset::sample_rate_hz() const { return empty() ? 0.0 : epochs_.front().sample_rate_hz(); }
std::vector<std::string> SubjectDataset::channel_names() const {
  return empty() ? std::vector<std::string>{} : epochs_.front().channel_names();
}

std::vector<ClassLabel> SubjectDataset::labels() const {
  std::vector<ClassLabel> out;
  out.reserve(epochs_.size());
  for (const Epoch& e : epochs_) out.push_back(e.label());
  return out;
}

std::array<std::size_t, kNumClasses> SubjectDataset::class_counts() const {
  std::array<std::size_t, kNumClasses> counts{};
  for (const Epoch& e : epochs_) ++counts[label_code(e.label())];
  return counts;
}

void SubjectDataset::validate_for_training() const {
  if (empty()) throw Error(ErrorCode::EmptyDataset, "subject " + std::to_string(subject_id_) + " has no epochs");
  const auto counts = class_counts();
  const auto present = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; });
  if (present < 2)
    throw Error(ErrorCode::ClassAbsent, "subject " + std::to_string(subject_id_) + " has fewer than two classes");
}

// ---------------------------------------------------------------------------

SplitIndices stratified_split(std::span<const ClassLabel> labels, double train_fraction, std::uint64_t seed) {
  if (labels.empty()) throw Error(ErrorCode::EmptyDataset, "cannot split an empty dataset");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");

  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[label_code(labels[i])].push_back(i);
  for (std::size_t c = 0; c < kNumClasses; ++c)
    if (by_class[c].size() < 2)
      throw Error(ErrorCode::ClassTooSmall, "class '" + std::string(label_name(static_cast<ClassLabel>(c))) +
                                                "' has " + std::to_string(by_class[c].size()) +
                                                " epochs, need at least 2");

  // Largest-remainder apportionment of ceil(f * n) training slots.
  const double n = static_cast<double>(labels.size());
  auto total_train = static_cast<std::size_t>(std::ceil(train_fraction * n - 1e-9));
  std::array<std::size_t, kNumClasses> quota{};
  std::array<double, kNumClasses> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double exact = train_fraction * static_cast<double>(by_class[c].size());
    quota[c] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  std::array<std::size_t, kNumClasses> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total_train && i < kNumClasses; ++i, ++assigned) ++quota[order[i]];
  for (std::size_t c = 0; c < kNumClasses; ++c) quota[c] = std::clamp<std::size_t>(quota[c], 1, by_class[c].size() - 1);

  SplitIndices split;
  split.seed = seed;
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto idx = by_class[c];
    std::shuffle(idx.begin(), idx.end(), rng);
    split.train.insert(split.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    split.test.insert(split.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]), idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

SplitIndices stratified_split(const SubjectDataset& dataset, double train_fraction, std::uint64_t seed) {
  const auto labels = dataset.labels();
  return stratified_split(std::span<const ClassLabel>(labels), train_fraction, seed);
}

}  // namespace mieeg
