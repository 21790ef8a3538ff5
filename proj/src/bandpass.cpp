#include <cmath>
#include <fstream>
#include <numbers>

#include "mieeg/preprocess.hpp"

namespace mieeg {

using cd = std::complex<double>;

namespace {

constexpr int kMaxPrototypeOrder = 100;

// Second-order section with poles {z, conj(z)} or the two given real/complex
// poles, and zeros at +1 and -1.
Biquad section_from_poles(cd z1, cd z2) {
  Biquad s;
  s.b0 = 1.0;
  s.b1 = 0.0;
  s.b2 = -1.0;
  s.a1 = -(z1 + z2).real();
  s.a2 = (z1 * z2).real();
  return s;
}

cd bilinear(cd s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

}  // namespace

void FilterSpec::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
    throw Error(ErrorCode::InvalidBand, "sample rate must be positive");
  if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < sample_rate_hz / 2.0))
    throw Error(ErrorCode::InvalidBand, "need 0 < low (" + std::to_string(low_hz) + ") < high (" +
                                            std::to_string(high_hz) + ") < fs/2 (" +
                                            std::to_string(sample_rate_hz / 2.0) + ")");
  if (convention == OrderConvention::Bandpass && order % 2 != 0)
    throw Error(ErrorCode::InvalidBand, "bandpass order must be even");
  const int proto = prototype_order();
  if (proto < 1 || proto > kMaxPrototypeOrder)
    throw Error(ErrorCode::InvalidBand, "prototype order must be in 1.." + std::to_string(kMaxPrototypeOrder));
}

int FilterSpec::prototype_order() const { return convention == OrderConvention::Prototype ? order : order / 2; }

cd Biquad::response(cd z_inv) const {
  return (b0 + z_inv * (b1 + z_inv * b2)) / (1.0 + z_inv * (a1 + z_inv * a2));
}

std::array<cd, 2> Biquad::poles() const {
  // z^2 + a1 z + a2 = 0
  const cd disc = std::sqrt(cd(a1 * a1 - 4.0 * a2, 0.0));
  return {(-a1 + disc) / 2.0, (-a1 - disc) / 2.0};
}

cd BiquadCascade::response_at(double freq_hz, double sample_rate_hz) const {
  const cd z_inv = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_rate_hz);
  cd h(1.0, 0.0);
  for (const Biquad& s : sections) h *= s.response(z_inv);
  return h;
}

std::vector<cd> BiquadCascade::poles() const {
  std::vector<cd> out;
  for (const Biquad& s : sections) {
    const auto p = s.poles();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

BiquadCascade design_bandpass(const FilterSpec& spec) {
  spec.validate();
  const int n = spec.prototype_order();
  const double fs = spec.sample_rate_hz;

  // Pre-warped analog band edges.
  const double w_lo = 2.0 * fs * std::tan(std::numbers::pi * spec.low_hz / fs);
  const double w_hi = 2.0 * fs * std::tan(std::numbers::pi * spec.high_hz / fs);
  const double bw = w_hi - w_lo;
  const double w0_sq = w_lo * w_hi;

  BiquadCascade cascade;
  auto add_pair = [&](cd s1, cd s2) { cascade.sections.push_back(section_from_poles(bilinear(s1, fs), bilinear(s2, fs))); };

  // Prototype poles exp(i*pi*(2k + n - 1) / (2n)), k = 1..n, all in the left
  // half plane. Each maps to two bandpass poles s = p*bw/2 +- sqrt((p*bw/2)^2 - w0^2).
  for (int k = 1; k <= n; ++k) {
    const cd p = std::polar(1.0, std::numbers::pi * (2.0 * k + n - 1.0) / (2.0 * n));
    const cd half = p * (bw / 2.0);
    const cd root = std::sqrt(half * half - w0_sq);
    if (2 * k - 1 == n) {
      // Real prototype pole (odd n): its two bandpass poles form one section.
      add_pair(half + root, half - root);
    } else if (p.imag() > 0.0) {
      // The conjugate prototype pole contributes the conjugates.
      add_pair(half + root, std::conj(half + root));
      add_pair(half - root, std::conj(half - root));
    }
  }

  // Unit magnitude at the digital image of the analog centre frequency,
  // balanced so every section has unit gain there.
  const double f0 = fs / std::numbers::pi * std::atan(std::sqrt(w0_sq) / (2.0 * fs));
  const cd z_inv = std::polar(1.0, -2.0 * std::numbers::pi * f0 / fs);
  double log_gain = 0.0;
  for (Biquad& s : cascade.sections) {
    const double g = 1.0 / std::abs(s.response(z_inv));
    s.b0 *= g;
    s.b1 *= g;
    s.b2 *= g;
    log_gain += std::log(g);
  }
  cascade.gain = std::exp(log_gain);

  for (const cd& z : cascade.poles())
    if (!(std::abs(z) < 1.0 - kPoleMargin))
      throw Error(ErrorCode::UnstableDesign, "pole at |z| = " + std::to_string(std::abs(z)));
  return cascade;
}

void filter_in_place(const BiquadCascade& cascade, std::span<double> signal) {
  for (const Biquad& s : cascade.sections) {
    double z1 = 0.0;
    double z2 = 0.0;
    for (double& x : signal) {
      const double y = s.b0 * x + z1;
      z1 = s.b1 * x - s.a1 * y + z2;
      z2 = s.b2 * x - s.a2 * y;
      x = y;
    }
  }
}

std::vector<double> filter_signal(const BiquadCascade& cascade, std::span<const double> signal) {
  std::vector<double> out(signal.begin(), signal.end());
  filter_in_place(cascade, out);
  return out;
}

Epoch apply_filter(const BiquadCascade& cascade, const Epoch& epoch) {
  std::vector<double> data(epoch.data().begin(), epoch.data().end());
  const std::size_t n = epoch.n_samples();
  for (std::size_t c = 0; c < epoch.n_channels(); ++c) filter_in_place(cascade, std::span<double>(data).subspan(c * n, n));
  for (double v : data)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteOutput, "filter output is not finite");
  return epoch.with_data(std::move(data));
}

void write_frequency_response_csv(const BiquadCascade& cascade, double sample_rate_hz,
                                  const std::filesystem::path& path, std::size_t n_points) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  out.precision(17);
  out << "frequency_hz,magnitude,phase_rad\n";
  const double nyquist = sample_rate_hz / 2.0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double f = n_points > 1 ? nyquist * static_cast<double>(i) / static_cast<double>(n_points - 1) : 0.0;
    const cd h = cascade.response_at(f, sample_rate_hz);
    out << f << ',' << std::abs(h) << ',' << std::arg(h) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write error on " + path.string());
}

}  // namespace mieeg
