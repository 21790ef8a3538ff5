#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mieeg/error.hpp"

namespace mieeg {

// Integer codes are part of every file format and confusion matrix layout.
enum class ClassLabel : std::uint8_t { Left = 0, Right = 1, Rest = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<ClassLabel, kNumClasses> kAllLabels{ClassLabel::Left, ClassLabel::Right,
                                                                 ClassLabel::Rest};

constexpr int label_code(ClassLabel label) { return static_cast<int>(label); }
std::optional<ClassLabel> label_from_code(int code);
std::string_view label_name(ClassLabel label);

/// One fixed-length multichannel trial. Samples are stored channel-major
/// (row c holds channel c) and are immutable after construction.
class Epoch {
 public:
  /// Throws ShapeMismatch if data.size() != channel_names.size() * n_samples,
  /// NonFiniteSample on NaN/Inf, InvalidArgument on bad rate or ids.
  Epoch(int subject_id, ClassLabel label, std::vector<std::string> channel_names, std::size_t n_samples,
        std::vector<double> data, double sample_rate_hz);

  /// Convenience for row-per-channel input; rejects ragged rows.
  static Epoch from_rows(int subject_id, ClassLabel label, std::vector<std::string> channel_names,
                         const std::vector<std::vector<double>>& rows, double sample_rate_hz);

  int subject_id() const { return subject_id_; }
  ClassLabel label() const { return label_; }
  double sample_rate_hz() const { return sample_rate_hz_; }
  std::size_t n_channels() const { return channel_names_.size(); }
  std::size_t n_samples() const { return n_samples_; }
  const std::vector<std::string>& channel_names() const { return channel_names_; }

  std::span<const double> channel(std::size_t c) const {
    return {data_.data() + c * n_samples_, n_samples_};
  }
  std::span<const double> data() const { return data_; }

  /// Same metadata, new samples (validated again).
  Epoch with_data(std::vector<double> data) const;
  Epoch with_data(std::vector<std::string> channel_names, std::vector<double> data) const;

  friend bool operator==(const Epoch&, const Epoch&) = default;

 private:
  int subject_id_;
  ClassLabel label_;
  std::vector<std::string> channel_names_;
  std::size_t n_samples_;
  std::vector<double> data_;
  double sample_rate_hz_;
};

enum class Provenance : std::uint8_t { Real = 0, Synthetic = 1 };

/// All epochs of one subject, sharing geometry and sample rate.
class SubjectDataset {
 public:
  SubjectDataset(int subject_id, std::vector<Epoch> epochs, Provenance provenance);

  int subject_id() const { return subject_id_; }
  Provenance provenance() const { return provenance_; }
  const std::vector<Epoch>& epochs() const { return epochs_; }
  std::size_t size() const { return epochs_.size(); }
  bool empty() const { return epochs_.empty(); }

  // Geometry is undefined for an empty dataset; these return 0 / empty then.
  std::size_t n_channels() const;
  std::size_t n_samples() const;
  double sample_rate_hz() const;
  std::vector<std::string> channel_names() const;

  std::vector<ClassLabel> labels() const;
  std::array<std::size_t, kNumClasses> class_counts() const;

  /// Requires epochs from at least two classes; throws EmptyDataset / ClassAbsent.
  void validate_for_training() const;

  friend bool operator==(const SubjectDataset&, const SubjectDataset&) = default;

 private:
  int subject_id_;
  std::vector<Epoch> epochs_;
  Provenance provenance_;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::uint64_t seed{0};
};

/// Per-class shuffled split. Train gets ceil(fraction * n) epochs overall,
/// apportioned to classes by largest remainder so each class lands within one
/// epoch of its exact share. Index lists are returned sorted.
SplitIndices stratified_split(std::span<const ClassLabel> labels, double train_fraction, std::uint64_t seed);
SplitIndices stratified_split(const SubjectDataset& dataset, double train_fraction, std::uint64_t seed);

}  // namespace mieeg
