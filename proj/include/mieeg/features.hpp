#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "mieeg/core.hpp"

namespace mieeg {

/// Sum of squared samples. Throws EmptySignal.
double energy(std::span<const double> signal);

/// One-sided |DFT|^2, bins 0..n/2 (n/2 + 1 values). Throws EmptySignal.
std::vector<double> power_spectrum(std::span<const double> signal);

/// Time-domain energy implied by a one-sided spectrum of an n-sample signal:
/// (S[0] + 2*sum(S[1..]) [+ S[n/2] once for even n]) / n.
double parseval_energy(std::span<const double> one_sided, std::size_t n);

/// S / sum(S). Throws AllZeroSpectrum if the sum is not positive.
std::vector<double> spectral_probabilities(std::span<const double> spectrum);

/// Shannon entropy in bits of the normalized spectrum, with 0 log 0 = 0.
/// The result lies in [0, log2(spectrum.size())]. Throws AllZeroSpectrum.
double spectral_entropy(std::span<const double> spectrum);

struct Spectrogram {
  std::size_t n_frames{0};
  std::size_t n_bins{0};
  std::vector<double> power;  // row-major [frame][bin]
  std::vector<double> frame_times_s;
  std::vector<double> bin_freqs_hz;
  std::size_t window{0};
  std::size_t hop{0};

  std::span<const double> frame(std::size_t t) const { return {power.data() + t * n_bins, n_bins}; }
};

/// Hamming-windowed one-sided power frames; frame t starts at t * hop and is
/// time-stamped at its centre. floor((len - window) / hop) + 1 frames.
/// Throws WindowTooLong, InvalidArgument (window < 2 or hop < 1).
Spectrogram spectrogram(std::span<const double> signal, std::size_t window, std::size_t hop,
                        double sample_rate_hz = 1.0);

/// Entropy of every frame, each normalized by its own total power.
/// Throws ZeroPowerFrame.
std::vector<double> instantaneous_spectral_entropy(const Spectrogram& spec);

struct FeatureParams {
  std::size_t window{256};
  std::size_t hop{128};
};

/// Layout: [energy(ch 0..N-1), mean ISE(ch 0..N-1), std ISE(ch 0..N-1)].
struct FeatureVector {
  std::vector<double> values;
  ClassLabel label{ClassLabel::Left};
  int subject_id{0};

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// A silent channel surfaces as AllZeroSpectrum.
FeatureVector extract_features(const Epoch& epoch, const FeatureParams& params = {});
std::vector<FeatureVector> extract_features(const SubjectDataset& dataset, const FeatureParams& params = {});

/// Column-wise z-scoring fitted on one set and applied to others. Columns with
/// zero spread are centred only.
class Standardizer {
 public:
  static Standardizer fit(std::span<const FeatureVector> features);
  FeatureVector apply(const FeatureVector& f) const;
  std::vector<FeatureVector> apply(std::span<const FeatureVector> fs) const;

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

/// Header: subject,label,f0..f{d-1}.
void write_feature_csv(std::span<const FeatureVector> features, const std::filesystem::path& path);

}  // namespace mieeg
