#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mieeg/core.hpp"

namespace mieeg {

// ---------------------------------------------------------------------------
// EPB1 epoch file
//
//   "EPB1" | u16 version=1 | u16 subject_id | u32 n_epochs | u16 n_channels
//   | u32 n_samples | f64 sample_rate | u16 name_count
//   | name_count x (u16 byte length, UTF-8 bytes) | n_epochs x u8 label
//   | n_epochs x n_channels x n_samples f64
//
// All fields little-endian. The payload is epoch-major, then channel-major.
// ---------------------------------------------------------------------------

inline constexpr std::string_view kEpochFileMagic = "EPB1";
inline constexpr std::uint16_t kEpochFileVersion = 1;

struct EpochFileHeader {
  std::uint16_t version{kEpochFileVersion};
  std::uint16_t subject_id{0};
  std::uint32_t n_epochs{0};
  std::uint16_t n_channels{0};
  std::uint32_t n_samples{0};
  double sample_rate_hz{0.0};
  std::vector<std::string> channel_names;
  std::vector<std::uint8_t> labels;

  /// Bytes occupied by everything before the sample payload.
  std::size_t encoded_size() const;
};

/// Parses and validates the header only. Throws BadMagic, UnsupportedVersion,
/// TruncatedPayload, LabelOutOfRange, ShapeMismatch.
EpochFileHeader read_epoch_header(const std::filesystem::path& path);

SubjectDataset read_epoch_file(const std::filesystem::path& path,
                               Provenance provenance = Provenance::Real);
void write_epoch_file(const SubjectDataset& dataset, const std::filesystem::path& path);

// In-memory variants, used by the file functions and by tests.
std::vector<char> encode_epoch_file(const SubjectDataset& dataset);
SubjectDataset decode_epoch_file(std::vector<char> bytes, Provenance provenance = Provenance::Real);

// ---------------------------------------------------------------------------
// Channel selection
// ---------------------------------------------------------------------------

inline constexpr std::size_t kSelectionSize = 10;

/// FC3 FC4 C1 C2 C3 C4 Cz CP3 CP4 CPz: the sensorimotor strip over the
/// primary motor cortex.
const std::vector<std::string>& default_motor_channels();

/// Biosemi 64-channel 10-10 montage labels, in recording order.
const std::vector<std::string>& biosemi64_channels();

enum class Hemisphere { Left, Midline, Right };

/// 10-10 convention: odd trailing digit = left, even = right, 'z' = midline.
Hemisphere hemisphere_of(std::string_view channel_name);

class ChannelSelection {
 public:
  /// Exactly kSelectionSize distinct, non-empty names.
  explicit ChannelSelection(std::vector<std::string> names);
  static ChannelSelection motor_default() { return ChannelSelection(default_motor_channels()); }

  const std::vector<std::string>& names() const { return names_; }

  /// Indices into `channel_table` in selection order. Matching ignores ASCII
  /// case. Throws UnknownChannel naming the first missing label.
  std::vector<std::size_t> resolve(const std::vector<std::string>& channel_table) const;

 private:
  std::vector<std::string> names_;
};

/// Keeps only the selected rows, in selection order; samples are copied
/// untouched and the dataset's own channel spelling is kept.
SubjectDataset select_channels(const SubjectDataset& dataset, const ChannelSelection& selection);

// ---------------------------------------------------------------------------
// Synthetic subjects
// ---------------------------------------------------------------------------

struct SyntheticSpec {
  int n_subjects{1};
  int n_epochs_per_subject{100};
  int n_channels{10};
  int n_samples{1536};
  double sample_rate_hz{512.0};
  double lateralization_strength{4.0};  // oscillation amplitude, same units as noise_std
  double noise_std{1.0};
  std::uint64_t seed{0};

  void validate() const;
};

/// Channel names used for an n-channel synthetic recording: the motor set for
/// 10, the Biosemi montage for 64, otherwise Ch1..ChN.
std::vector<std::string> synthetic_channel_names(int n_channels);

/// One dataset per subject (ids 1..n). Left epochs carry 10 Hz + 22 Hz
/// oscillations on right-hemisphere channels, Right epochs on left-hemisphere
/// channels, Rest epochs none. Every epoch also gets white noise and a common
/// 50 Hz line component. Labels cycle Left, Right, Rest. Subject i draws from
/// seed + i, so subjects can be generated independently.
std::vector<SubjectDataset> generate_synthetic(const SyntheticSpec& spec);
SubjectDataset generate_synthetic_subject(const SyntheticSpec& spec, int subject_index);

}  // namespace mieeg
