#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "mieeg/features.hpp"
#include "oracles.hpp"

using namespace mieeg;
using testing::code_of;

namespace {

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST_CASE("energy") {
  CHECK(energy(std::vector<double>(10, 0.0)) == 0.0);
  CHECK(energy(std::vector<double>{1, -1, 2}) == 6.0);
  std::mt19937_64 rng(1);
  const auto x = testing::gaussian(rng, 100);
  auto x2 = x;
  for (auto& v : x2) v *= 2.0;
  CHECK(energy(x2) == doctest::Approx(4.0 * energy(x)).epsilon(1e-14));
  CHECK(code_of([] { energy(std::vector<double>{}); }) == ErrorCode::EmptySignal);
}

TEST_CASE("power spectrum of a bin-centred sinusoid") {
  const std::size_t n = 256;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(2.0 * std::numbers::pi * 10.0 * static_cast<double>(i) / n);
  const auto s = power_spectrum(x);
  REQUIRE(s.size() == n / 2 + 1);
  CHECK(argmax(s) == 10);
  for (std::size_t k = 0; k < s.size(); ++k)
    if (k != 10) CHECK(s[k] < 1e-10 * s[10]);
}

TEST_CASE("unit impulse has a flat spectrum") {
  std::vector<double> x(64, 0.0);
  x[0] = 1.0;
  for (double v : power_spectrum(x)) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("spectrum matches a direct DFT and Parseval holds") {
  std::mt19937_64 rng(9);
  for (std::size_t n : {1u, 2u, 7u, 64u, 255u, 256u, 1000u}) {
    const auto x = testing::gaussian(rng, n);
    const auto s = power_spectrum(x);
    const auto ref = oracle::dft_power(x);
    REQUIRE(s.size() == ref.size());
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(s[k] == doctest::Approx(ref[k]).epsilon(1e-9).scale(1e-9));
    double time_energy = 0.0;
    for (double v : x) time_energy += v * v;
    CHECK(testing::rel_err(parseval_energy(s, n), time_energy) < 1e-9);
  }
}

TEST_CASE("entropy reference values") {
  std::vector<double> single(64, 0.0);
  single[17] = 3.0;
  CHECK(spectral_entropy(single) == 0.0);
  CHECK(spectral_entropy(std::vector<double>(64, 1.0)) == 6.0);
  std::vector<double> half(8, 0.0);
  half[0] = half[1] = 0.5;
  CHECK(spectral_entropy(half) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(code_of([] { spectral_entropy(std::vector<double>(4, 0.0)); }) == ErrorCode::AllZeroSpectrum);
  CHECK(code_of([] { spectral_probabilities(std::vector<double>(4, 0.0)); }) == ErrorCode::AllZeroSpectrum);
}

TEST_CASE("entropy properties on random spectra") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 300)(rng);
    std::vector<double> s(m);
    std::exponential_distribution<double> ex(1.0);
    for (auto& v : s) v = std::bernoulli_distribution(0.2)(rng) ? 0.0 : ex(rng);
    s[std::uniform_int_distribution<std::size_t>(0, m - 1)(rng)] += 1.0;

    const auto p = spectral_probabilities(s);
    double sum = 0.0;
    for (double v : p) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-12);

    const double h = spectral_entropy(s);
    CHECK(h >= 0.0);
    CHECK(h <= std::log2(static_cast<double>(m)));

    // Direct evaluation of -sum p log2 p as the oracle.
    double ref = 0.0;
    for (double v : p)
      if (v > 0) ref -= v * std::log2(v);
    CHECK(h == doctest::Approx(ref).epsilon(1e-12).scale(1e-12));

    auto scaled = s;
    const double c = std::pow(10.0, std::uniform_real_distribution<double>(-6, 6)(rng));
    for (auto& v : scaled) v *= c;
    CHECK(std::abs(spectral_entropy(scaled) - h) < 1e-12 * std::max(1.0, h));
  }
}

TEST_CASE("spectrogram frame arithmetic") {
  const std::vector<double> x(256, 1.0);
  const Spectrogram one = spectrogram(x, 256, 128, 512.0);
  CHECK(one.n_frames == 1);
  CHECK(one.n_bins == 129);
  const Spectrogram full = spectrogram(std::vector<double>(1536, 1.0), 256, 128, 512.0);
  CHECK(full.n_frames == 11);
  CHECK(full.bin_freqs_hz[1] == doctest::Approx(2.0));
  CHECK(full.frame_times_s[0] == doctest::Approx(0.25));
  CHECK(code_of([] { spectrogram(std::vector<double>(100, 1.0), 256, 128); }) == ErrorCode::WindowTooLong);
  CHECK(code_of([] { spectrogram(std::vector<double>(100, 1.0), 1, 1); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { spectrogram(std::vector<double>(100, 1.0), 10, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("stationary sinusoid keeps its peak bin") {
  std::vector<double> x(1536);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * std::numbers::pi * 20.0 * static_cast<double>(i) / 512.0);
  const Spectrogram s = spectrogram(x, 256, 128, 512.0);
  for (std::size_t t = 0; t < s.n_frames; ++t) CHECK(argmax(s.frame(t)) == 10);
}

TEST_CASE("chirp peak moves up over frames") {
  const double fs = 512.0, dur = 3.0;
  std::vector<double> x(static_cast<std::size_t>(fs * dur));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / fs;
    // Instantaneous frequency 10 + (20 / dur) t.
    x[i] = std::sin(2.0 * std::numbers::pi * (10.0 * t + 10.0 / dur * t * t));
  }
  const Spectrogram s = spectrogram(x, 256, 128, fs);
  std::size_t prev = 0;
  for (std::size_t t = 0; t < s.n_frames; ++t) {
    const std::size_t peak = argmax(s.frame(t));
    CHECK(peak >= prev);
    prev = peak;
  }
  CHECK(argmax(s.frame(0)) < argmax(s.frame(s.n_frames - 1)));
}

TEST_CASE("instantaneous entropy") {
  // Identical frames give a constant sequence.
  std::vector<double> periodic(1536);
  for (std::size_t i = 0; i < periodic.size(); ++i)
    periodic[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 128.0) + 0.3 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / 32.0);
  const auto h = instantaneous_spectral_entropy(spectrogram(periodic, 256, 128));
  for (double v : h) CHECK(v == doctest::Approx(h[0]).epsilon(1e-9));

  Spectrogram handmade;
  handmade.n_frames = 2;
  handmade.n_bins = 4;
  handmade.power = {0, 5, 0, 0, 1, 1, 1, 1};
  const auto hh = instantaneous_spectral_entropy(handmade);
  CHECK(hh[0] == 0.0);
  CHECK(hh[1] == 2.0);
  handmade.power = {0, 0, 0, 0, 1, 1, 1, 1};
  CHECK(code_of([&] { instantaneous_spectral_entropy(handmade); }) == ErrorCode::ZeroPowerFrame);

  // Broadband noise sits near the maximum.
  std::mt19937_64 rng(12);
  double mean = 0.0;
  int frames = 0;
  for (int rep = 0; rep < 20; ++rep) {
    for (double v : instantaneous_spectral_entropy(spectrogram(testing::gaussian(rng, 1536), 256, 128))) {
      mean += v;
      ++frames;
    }
  }
  mean /= frames;
  CHECK(std::abs(mean - std::log2(129.0)) < 0.1 * std::log2(129.0));
}

TEST_CASE("feature vector layout and scaling") {
  std::mt19937_64 rng(13);
  const Epoch e = testing::random_epoch(rng, 10, 1536, ClassLabel::Right);
  const FeatureVector f = extract_features(e);
  REQUIRE(f.values.size() == 30);
  CHECK(f.label == ClassLabel::Right);
  CHECK(f.values[3] == doctest::Approx(energy(e.channel(3))));

  const auto ise = instantaneous_spectral_entropy(spectrogram(e.channel(3), 256, 128, 512.0));
  double m = 0.0;
  for (double v : ise) m += v / static_cast<double>(ise.size());
  double var = 0.0;
  for (double v : ise) var += (v - m) * (v - m) / static_cast<double>(ise.size());
  CHECK(f.values[13] == doctest::Approx(m).epsilon(1e-12));
  CHECK(f.values[23] == doctest::Approx(std::sqrt(var)).epsilon(1e-9));

  std::vector<double> doubled(e.data().begin(), e.data().end());
  for (auto& v : doubled) v *= 2.0;
  const FeatureVector g = extract_features(e.with_data(doubled));
  for (std::size_t c = 0; c < 10; ++c) {
    CHECK(g.values[c] == doctest::Approx(4.0 * f.values[c]).epsilon(1e-12));
    CHECK(g.values[10 + c] == doctest::Approx(f.values[10 + c]).epsilon(1e-12));
    CHECK(g.values[20 + c] == doctest::Approx(f.values[20 + c]).epsilon(1e-6).scale(1e-12));
  }

  const Epoch zero(1, ClassLabel::Left, testing::names(10), 1536, std::vector<double>(15360, 0.0), 512.0);
  CHECK(code_of([&] { extract_features(zero); }) == ErrorCode::AllZeroSpectrum);
}

TEST_CASE("standardizer fitted on one set") {
  const std::vector<FeatureVector> train{testing::fv({1, 10, 5}, ClassLabel::Left),
                                         testing::fv({3, 30, 5}, ClassLabel::Right)};
  const Standardizer z = Standardizer::fit(train);
  const auto out = z.apply(std::span<const FeatureVector>(train));
  CHECK(out[0].values[0] == doctest::Approx(-1.0));
  CHECK(out[1].values[1] == doctest::Approx(1.0));
  CHECK(out[0].values[2] == 0.0);
  CHECK(out[1].label == ClassLabel::Right);
}
