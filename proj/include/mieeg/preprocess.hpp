#pragma once

#include <array>
#include <complex>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mieeg/core.hpp"
#include "mieeg/ingestion.hpp"

namespace mieeg {

// ---------------------------------------------------------------------------
// Outlier rejection (3-sigma rule on epoch means)
// ---------------------------------------------------------------------------

enum class OutlierMode {
  EpochMean,   // one scalar mean per epoch over all channels and samples
  PerChannel,  // per-channel means; an epoch goes if any channel is out of bounds
};

struct OutlierReport {
  OutlierMode mode{OutlierMode::EpochMean};
  std::vector<double> epoch_means;  // scalar mean of every input epoch
  double mean{0.0};                 // over epoch_means
  double stddev{0.0};               // population std over epoch_means
  std::vector<std::size_t> kept;
  std::vector<std::size_t> removed;
};

/// Single pass: bounds come from the input epochs and are not re-estimated.
/// Inclusive bounds keep. Throws TooFewEpochs below two epochs.
std::pair<SubjectDataset, OutlierReport> reject_outliers(const SubjectDataset& dataset,
                                                         OutlierMode mode = OutlierMode::EpochMean,
                                                         double n_sigma = 3.0);

void write_outlier_csv(const OutlierReport& report, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Butterworth bandpass
// ---------------------------------------------------------------------------

enum class OrderConvention {
  Prototype,  // order = low-pass prototype order; bandpass has 2*order poles
  Bandpass,   // order = final bandpass order (must be even)
};

struct FilterSpec {
  double low_hz{8.0};
  double high_hz{30.0};
  int order{30};
  double sample_rate_hz{512.0};
  OrderConvention convention{OrderConvention::Prototype};

  /// Throws InvalidBand unless 0 < low < high < fs/2 and the order is usable.
  void validate() const;
  int prototype_order() const;
};

/// One second-order section, y = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2) x.
struct Biquad {
  double b0{1}, b1{0}, b2{0};
  double a1{0}, a2{0};

  std::complex<double> response(std::complex<double> z_inv) const;
  std::array<std::complex<double>, 2> poles() const;
};

struct BiquadCascade {
  std::vector<Biquad> sections;
  /// Overall passband normalization. It is already spread evenly over the
  /// section numerators; kept for inspection only.
  double gain{1.0};

  std::complex<double> response_at(double freq_hz, double sample_rate_hz) const;
  std::vector<std::complex<double>> poles() const;
};

inline constexpr double kPoleMargin = 1e-9;

/// Analog Butterworth prototype -> lowpass-to-bandpass transform -> bilinear
/// transform with pre-warped edges, so |H| = 1/sqrt(2) exactly at low_hz and
/// high_hz. One biquad per conjugate pole pair, each with zeros at z = +1 and
/// z = -1. Throws InvalidBand or UnstableDesign.
BiquadCascade design_bandpass(const FilterSpec& spec);

/// Causal, zero initial state, direct form II transposed per section.
void filter_in_place(const BiquadCascade& cascade, std::span<double> signal);
std::vector<double> filter_signal(const BiquadCascade& cascade, std::span<const double> signal);

/// Filters every channel of the epoch independently. Throws NonFiniteOutput.
Epoch apply_filter(const BiquadCascade& cascade, const Epoch& epoch);

/// Writes frequency_hz,magnitude,phase_rad on a uniform grid from 0 to Nyquist.
void write_frequency_response_csv(const BiquadCascade& cascade, double sample_rate_hz,
                                  const std::filesystem::path& path, std::size_t n_points = 1025);

// ---------------------------------------------------------------------------
// Common average reference
// ---------------------------------------------------------------------------

/// Subtracts the instantaneous mean over channels from every channel.
/// Throws SingleChannel for one-channel epochs.
Epoch apply_car(const Epoch& epoch);

// ---------------------------------------------------------------------------
// Full chain: channel selection -> outlier rejection -> bandpass -> CAR
// ---------------------------------------------------------------------------

struct PreprocessConfig {
  std::optional<ChannelSelection> selection = ChannelSelection::motor_default();
  bool reject_outliers{true};
  OutlierMode outlier_mode{OutlierMode::EpochMean};
  FilterSpec filter{};
  bool bandpass{true};
  bool car{true};
};

struct PreprocessResult {
  SubjectDataset dataset;
  std::optional<OutlierReport> outliers;
};

/// The filter's sample rate is taken from the dataset, not the config.
PreprocessResult preprocess(const SubjectDataset& dataset, const PreprocessConfig& config);

}  // namespace mieeg
