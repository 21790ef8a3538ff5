#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>

#include "mieeg/features.hpp"

namespace mieeg {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class RealDft {
 public:
  explicit RealDft(std::size_t n) : n_(n) {
    in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n_));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n_ / 2 + 1)));
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), in_, out_, FFTW_ESTIMATE);
  }
  ~RealDft() {
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealDft(const RealDft&) = delete;
  RealDft& operator=(const RealDft&) = delete;

  std::span<double> input() { return {in_, n_}; }

  /// |X[k]|^2 for k = 0..n/2 of whatever is currently in input().
  void power(std::span<double> out) {
    fftw_execute(plan_);
    for (std::size_t k = 0; k < n_ / 2 + 1; ++k) out[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
  }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

std::vector<double> hamming(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
  return w;
}

}  // namespace

double energy(std::span<const double> signal) {
  if (signal.empty()) throw Error(ErrorCode::EmptySignal, "energy of an empty signal");
  double e = 0.0;
  for (double x : signal) e += x * x;
  return e;
}

std::vector<double> power_spectrum(std::span<const double> signal) {
  if (signal.empty()) throw Error(ErrorCode::EmptySignal, "power spectrum of an empty signal");
  RealDft dft(signal.size());
  std::copy(signal.begin(), signal.end(), dft.input().begin());
  std::vector<double> out(signal.size() / 2 + 1);
  dft.power(out);
  return out;
}

double parseval_energy(std::span<const double> one_sided, std::size_t n) {
  if (n == 0 || one_sided.size() != n / 2 + 1)
    throw Error(ErrorCode::DimensionMismatch, "spectrum length does not match n / 2 + 1");
  double sum = one_sided[0];
  const std::size_t last = n / 2;
  for (std::size_t k = 1; k < one_sided.size(); ++k) sum += (n % 2 == 0 && k == last) ? one_sided[k] : 2.0 * one_sided[k];
  return sum / static_cast<double>(n);
}

std::vector<double> spectral_probabilities(std::span<const double> spectrum) {
  const double total = std::accumulate(spectrum.begin(), spectrum.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::AllZeroSpectrum, "spectrum has no power");
  std::vector<double> p(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) p[k] = spectrum[k] / total;
  return p;
}

double spectral_entropy(std::span<const double> spectrum) {
  if (spectrum.empty()) throw Error(ErrorCode::AllZeroSpectrum, "empty spectrum");
  // -sum P log2 P with P = S / T, evaluated as sum S (log2 T - log2 S) / T.
  // A lone bin then gives exactly 0, and a spectrum of ones exactly log2 M
  // (the extended-precision sum of M equal terms is exact).
  double total = 0.0;
  for (double s : spectrum) {
    if (s < 0.0 || !std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "spectrum must be finite and >= 0");
    total += s;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::AllZeroSpectrum, "spectrum has no power");
  const double log_total = std::log2(total);
  long double weighted = 0.0L;
  for (double s : spectrum)
    if (s > 0.0) weighted += static_cast<long double>(s) * (log_total - std::log2(s));
  const double h = static_cast<double>(weighted / total);
  return std::clamp(h, 0.0, std::log2(static_cast<double>(spectrum.size())));
}

Spectrogram spectrogram(std::span<const double> signal, std::size_t window, std::size_t hop, double sample_rate_hz) {
  if (window < 2) throw Error(ErrorCode::InvalidArgument, "spectrogram window must be at least 2 samples");
  if (hop < 1) throw Error(ErrorCode::InvalidArgument, "spectrogram hop must be at least 1 sample");
  if (window > signal.size())
    throw Error(ErrorCode::WindowTooLong, "window " + std::to_string(window) + " exceeds signal length " +
                                              std::to_string(signal.size()));
  Spectrogram s;
  s.window = window;
  s.hop = hop;
  s.n_frames = (signal.size() - window) / hop + 1;
  s.n_bins = window / 2 + 1;
  s.power.resize(s.n_frames * s.n_bins);
  for (std::size_t k = 0; k < s.n_bins; ++k)
    s.bin_freqs_hz.push_back(static_cast<double>(k) * sample_rate_hz / static_cast<double>(window));

  const auto w = hamming(window);
  RealDft dft(window);
  auto in = dft.input();
  for (std::size_t t = 0; t < s.n_frames; ++t) {
    const std::size_t start = t * hop;
    for (std::size_t i = 0; i < window; ++i) in[i] = signal[start + i] * w[i];
    dft.power(std::span<double>(s.power).subspan(t * s.n_bins, s.n_bins));
    s.frame_times_s.push_back((static_cast<double>(start) + static_cast<double>(window) / 2.0) / sample_rate_hz);
  }
  return s;
}

std::vector<double> instantaneous_spectral_entropy(const Spectrogram& spec) {
  std::vector<double> h;
  h.reserve(spec.n_frames);
  for (std::size_t t = 0; t < spec.n_frames; ++t) {
    const auto frame = spec.frame(t);
    if (!(std::accumulate(frame.begin(), frame.end(), 0.0) > 0.0))
      throw Error(ErrorCode::ZeroPowerFrame, "frame " + std::to_string(t) + " has no power");
    h.push_back(spectral_entropy(frame));
  }
  return h;
}

}  // namespace mieeg
