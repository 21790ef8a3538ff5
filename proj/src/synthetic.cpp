#include <cmath>
#include <numbers>
#include <random>

#include "mieeg/ingestion.hpp"

namespace mieeg {

namespace {

constexpr double kMuHz = 10.0;
constexpr double kBetaHz = 22.0;
constexpr double kLineHz = 50.0;

}  // namespace

void SyntheticSpec::validate() const {
  if (n_subjects <= 0 || n_subjects > 65535) throw Error(ErrorCode::InvalidArgument, "n_subjects must be in 1..65535");
  if (n_epochs_per_subject <= 0) throw Error(ErrorCode::InvalidArgument, "n_epochs_per_subject must be positive");
  if (n_channels <= 0 || n_channels > 65535) throw Error(ErrorCode::InvalidArgument, "n_channels must be positive");
  if (n_samples <= 0) throw Error(ErrorCode::InvalidArgument, "n_samples must be positive");
  if (!(sample_rate_hz > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample_rate_hz must be positive");
  if (!(lateralization_strength >= 0.0) || !std::isfinite(lateralization_strength))
    throw Error(ErrorCode::InvalidArgument, "lateralization_strength must be >= 0");
  if (!(noise_std > 0.0) || !std::isfinite(noise_std))
    throw Error(ErrorCode::InvalidArgument, "noise_std must be > 0");
}

std::vector<std::string> synthetic_channel_names(int n_channels) {
  if (n_channels == static_cast<int>(kSelectionSize)) return default_motor_channels();
  if (n_channels == 64) return biosemi64_channels();
  std::vector<std::string> names;
  for (int i = 1; i <= n_channels; ++i) names.push_back("Ch" + std::to_string(i));
  return names;
}

SubjectDataset generate_synthetic_subject(const SyntheticSpec& spec, int subject_index) {
  spec.validate();
  const int subject_id = subject_index + 1;
  std::mt19937_64 rng(spec.seed + static_cast<std::uint64_t>(subject_index));
  std::normal_distribution<double> noise(0.0, spec.noise_std);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> jitter(0.8, 1.2);

  const auto names = synthetic_channel_names(spec.n_channels);
  std::vector<Hemisphere> side;
  for (const auto& n : names) side.push_back(hemisphere_of(n));

  const auto n_ch = static_cast<std::size_t>(spec.n_channels);
  const auto n_s = static_cast<std::size_t>(spec.n_samples);
  const double dt = 1.0 / spec.sample_rate_hz;
  constexpr double two_pi = 2.0 * std::numbers::pi;

  std::vector<Epoch> epochs;
  epochs.reserve(static_cast<std::size_t>(spec.n_epochs_per_subject));
  for (int e = 0; e < spec.n_epochs_per_subject; ++e) {
    const auto label = static_cast<ClassLabel>(e % static_cast<int>(kNumClasses));
    // Motor imagery shows up over the hemisphere opposite the imagined hand.
    const bool has_active = label != ClassLabel::Rest;
    const Hemisphere active = label == ClassLabel::Left ? Hemisphere::Right : Hemisphere::Left;

    const double line_phase = phase(rng);
    const double mu_phase = phase(rng);
    const double beta_phase = phase(rng);
    const double amp = spec.lateralization_strength * jitter(rng);

    std::vector<double> data(n_ch * n_s);
    for (std::size_t c = 0; c < n_ch; ++c) {
      const bool gated = has_active && side[c] == active;
      for (std::size_t t = 0; t < n_s; ++t) {
        const double time = static_cast<double>(t) * dt;
        double v = noise(rng) + spec.noise_std * std::sin(two_pi * kLineHz * time + line_phase);
        if (gated)
          v += amp * (std::sin(two_pi * kMuHz * time + mu_phase) + std::sin(two_pi * kBetaHz * time + beta_phase));
        data[c * n_s + t] = v;
      }
    }
    epochs.emplace_back(subject_id, label, names, n_s, std::move(data), spec.sample_rate_hz);
  }
  return SubjectDataset(subject_id, std::move(epochs), Provenance::Synthetic);
}

std::vector<SubjectDataset> generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<SubjectDataset> out;
  out.reserve(static_cast<std::size_t>(spec.n_subjects));
  for (int i = 0; i < spec.n_subjects; ++i) out.push_back(generate_synthetic_subject(spec, i));
  return out;
}

}  // namespace mieeg
