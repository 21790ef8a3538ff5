#include <doctest.h>

#include <chrono>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "mieeg/preprocess.hpp"
#include "oracles.hpp"

using namespace mieeg;
using testing::code_of;

namespace {

// One single-channel epoch per mean value, each constant at that value.
SubjectDataset constant_epochs(const std::vector<double>& means) {
  std::vector<Epoch> epochs;
  for (std::size_t i = 0; i < means.size(); ++i)
    epochs.emplace_back(1, static_cast<ClassLabel>(i % 3), std::vector<std::string>{"C3"}, 4,
                        std::vector<double>(4, means[i]), 512.0);
  return SubjectDataset(1, std::move(epochs), Provenance::Synthetic);
}

std::vector<double> sine(double hz, double fs, std::size_t n, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / fs + phase);
  return x;
}

double rms(std::span<const double> x, std::size_t from) {
  double s = 0.0;
  for (std::size_t i = from; i < x.size(); ++i) s += x[i] * x[i];
  return std::sqrt(s / static_cast<double>(x.size() - from));
}

}  // namespace

// ---------------------------------------------------------------------------
// Outliers

TEST_CASE("identical epochs are all kept") {
  const auto [kept, report] = reject_outliers(constant_epochs(std::vector<double>(20, 0.0)), OutlierMode::EpochMean);
  CHECK(report.stddev == 0.0);
  CHECK(kept.size() == 20);
  CHECK(report.removed.empty());
}

TEST_CASE("a single far epoch is the only one removed") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 0.1);
  std::vector<double> means;
  for (int i = 0; i < 99; ++i) means.push_back(g(rng));
  means.push_back(10.0);

  // Oracle: the bound computed directly over the 100 means.
  double mu = 0.0;
  for (double m : means) mu += m / 100.0;
  double var = 0.0;
  for (double m : means) var += (m - mu) * (m - mu) / 100.0;
  REQUIRE(10.0 > mu + 3.0 * std::sqrt(var));

  const auto [kept, report] = reject_outliers(constant_epochs(means), OutlierMode::EpochMean);
  CHECK(report.removed == std::vector<std::size_t>{99});
  CHECK(kept.size() == 99);
  CHECK(report.mean == doctest::Approx(mu).epsilon(1e-12));
  CHECK(report.stddev == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
}

TEST_CASE("3-sigma removal rate on Gaussian means matches a Monte-Carlo count") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  std::size_t removed = 0, total = 0, oracle_removed = 0;
  for (int rep = 0; rep < 60; ++rep) {
    std::vector<double> means(1000);
    for (auto& m : means) m = g(rng);
    const auto [kept, report] = reject_outliers(constant_epochs(means), OutlierMode::EpochMean);
    removed += report.removed.size();
    total += means.size();

    double mu = 0.0;
    for (double m : means) mu += m / 1000.0;
    double var = 0.0;
    for (double m : means) var += (m - mu) * (m - mu) / 1000.0;
    for (double m : means) oracle_removed += std::abs(m - mu) > 3.0 * std::sqrt(var) ? 1 : 0;
  }
  CHECK(removed == oracle_removed);
  const double rate = static_cast<double>(removed) / static_cast<double>(total);
  // Two-sided normal tail beyond 3 sigma is 0.27%.
  CHECK(rate == doctest::Approx(0.0027).epsilon(0.3));
}

TEST_CASE("per-channel outlier mode drops an epoch with one wild channel") {
  std::vector<Epoch> epochs;
  for (int i = 0; i < 30; ++i) {
    std::vector<double> data(8, 0.01 * (i % 5));
    if (i == 12)
      for (std::size_t s = 4; s < 8; ++s) data[s] = 50.0;
    epochs.emplace_back(1, static_cast<ClassLabel>(i % 3), std::vector<std::string>{"C3", "C4"}, 4, data, 512.0);
  }
  const SubjectDataset d(1, epochs, Provenance::Synthetic);
  const auto [kept, report] = reject_outliers(d, OutlierMode::PerChannel);
  CHECK(report.removed == std::vector<std::size_t>{12});
  CHECK(code_of([] { reject_outliers(constant_epochs({1.0}), OutlierMode::EpochMean); }) == ErrorCode::TooFewEpochs);
}

// ---------------------------------------------------------------------------
// Bandpass

TEST_CASE("8-30 Hz cascade response") {
  const BiquadCascade c = design_bandpass(FilterSpec{});
  CHECK(c.sections.size() == 30);
  CHECK(std::abs(c.response_at(0.0, 512.0)) < 1e-6);
  CHECK(std::abs(c.response_at(256.0, 512.0)) < 1e-6);
  CHECK(std::abs(c.response_at(std::sqrt(240.0), 512.0)) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::abs(c.response_at(8.0, 512.0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));
  CHECK(std::abs(c.response_at(30.0, 512.0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));
  for (const auto& p : c.poles()) CHECK(std::abs(p) < 1.0);
}

TEST_CASE("cascade matches the closed-form Butterworth magnitude") {
  for (const auto& [lo, hi, order] : {std::tuple{8.0, 30.0, 30}, {8.0, 30.0, 4}, {1.0, 40.0, 6}, {20.0, 24.0, 8}}) {
    FilterSpec spec;
    spec.low_hz = lo;
    spec.high_hz = hi;
    spec.order = order;
    const BiquadCascade c = design_bandpass(spec);
    for (double f = 0.5; f < 256.0; f += 0.75) {
      const double got = std::abs(c.response_at(f, 512.0));
      const double want = oracle::butterworth_bandpass_gain(f, lo, hi, order, 512.0);
      CHECK(got == doctest::Approx(want).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("bandpass order convention halves the prototype order") {
  FilterSpec spec;
  spec.order = 30;
  spec.convention = OrderConvention::Bandpass;
  CHECK(spec.prototype_order() == 15);
  CHECK(design_bandpass(spec).sections.size() == 15);
}

TEST_CASE("invalid bands are rejected") {
  for (const auto& [lo, hi] : {std::pair{30.0, 8.0}, {0.0, 30.0}, {8.0, 256.0}, {8.0, 8.0}}) {
    FilterSpec spec;
    spec.low_hz = lo;
    spec.high_hz = hi;
    CHECK(code_of([&] { design_bandpass(spec); }) == ErrorCode::InvalidBand);
  }
  FilterSpec zero;
  zero.order = 0;
  CHECK(code_of([&] { design_bandpass(zero); }) == ErrorCode::InvalidBand);
}

TEST_CASE("filter is linear") {
  const BiquadCascade c = design_bandpass(FilterSpec{});
  const std::vector<double> zeros(1536, 0.0);
  for (double v : filter_signal(c, zeros)) CHECK(v == 0.0);

  std::mt19937_64 rng(4);
  const auto x = testing::gaussian(rng, 1536);
  auto ax = x;
  for (auto& v : ax) v *= -3.5;
  const auto y = filter_signal(c, x);
  const auto ay = filter_signal(c, ax);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(ay[i] == doctest::Approx(-3.5 * y[i]).epsilon(1e-9).scale(1e-12));
}

TEST_CASE("steady-state 50 Hz attenuation equals the evaluated response") {
  const BiquadCascade c = design_bandpass(FilterSpec{});
  const double gain = std::abs(c.response_at(50.0, 512.0));
  // The slowest pole has radius ~0.997, so the onset transient needs ~15 s to
  // fall below a 2e-10 stopband; measure after 20 s.
  const auto x = sine(50.0, 512.0, 40 * 512);
  const auto y = filter_signal(c, x);
  CHECK(rms(y, 20 * 512) / rms(x, 20 * 512) == doctest::Approx(gain).epsilon(0.05));
}

TEST_CASE("passband sinusoid keeps its amplitude") {
  const BiquadCascade c = design_bandpass(FilterSpec{});
  const double f = std::sqrt(240.0);
  const auto x = sine(f, 512.0, 30 * 512);
  const auto y = filter_signal(c, x);
  CHECK(rms(y, 10 * 512) / rms(x, 10 * 512) == doctest::Approx(std::abs(c.response_at(f, 512.0))).epsilon(0.05));
}

TEST_CASE("design runs well under a second") {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 10; ++i) design_bandpass(FilterSpec{});
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 1.0);
}

TEST_CASE("apply_filter keeps metadata and filters each channel") {
  std::mt19937_64 rng(8);
  const Epoch e = testing::random_epoch(rng, 3, 512);
  const BiquadCascade c = design_bandpass(FilterSpec{});
  const Epoch f = apply_filter(c, e);
  CHECK(f.channel_names() == e.channel_names());
  const auto direct = filter_signal(c, e.channel(2));
  const auto got = f.channel(2);
  CHECK(std::equal(direct.begin(), direct.end(), got.begin(), got.end()));
}

// ---------------------------------------------------------------------------
// Common average reference

TEST_CASE("CAR by hand") {
  const Epoch e = Epoch::from_rows(1, ClassLabel::Left, {"a", "b"}, {{1, 1, 1}, {3, 3, 3}}, 512.0);
  const Epoch r = apply_car(e);
  for (double v : r.channel(0)) CHECK(v == -1.0);
  for (double v : r.channel(1)) CHECK(v == 1.0);

  const Epoch same = Epoch::from_rows(1, ClassLabel::Left, {"a", "b", "c"}, {{1, 2}, {1, 2}, {1, 2}}, 512.0);
  const Epoch same_car = apply_car(same);
  for (double v : same_car.data()) CHECK(v == 0.0);

  const Epoch single = Epoch::from_rows(1, ClassLabel::Left, {"a"}, {{1, 2}}, 512.0);
  CHECK(code_of([&] { apply_car(single); }) == ErrorCode::SingleChannel);
}

TEST_CASE("CAR property: zero channel sum and idempotence") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t ch = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 300)(rng);
    const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-3, 3)(rng));
    auto data = testing::gaussian(rng, ch * n, scale);
    for (std::size_t i = 0; i < n; ++i) data[i] += 5.0 * scale;  // common offset on channel 0
    const Epoch e(1, ClassLabel::Rest, testing::names(ch), n, data, 512.0);
    const Epoch r = apply_car(e);
    for (std::size_t s = 0; s < n; ++s) {
      double sum = 0.0, mag = 0.0;
      for (std::size_t c = 0; c < ch; ++c) {
        sum += r.channel(c)[s];
        mag += std::abs(e.channel(c)[s]);
      }
      CHECK(std::abs(sum) <= 1e-12 * mag);
    }
    const Epoch rr = apply_car(r);
    for (std::size_t s = 0; s < n; ++s) {
      double mag = 0.0;
      for (std::size_t c = 0; c < ch; ++c) mag += std::abs(e.channel(c)[s]);
      for (std::size_t c = 0; c < ch; ++c) CHECK(std::abs(rr.channel(c)[s] - r.channel(c)[s]) <= 1e-12 * mag);
    }
  }
}

// ---------------------------------------------------------------------------
// Full preprocessing chain

TEST_CASE("preprocess selects, rejects, filters and references") {
  SyntheticSpec spec;
  spec.n_channels = 64;
  spec.n_epochs_per_subject = 12;
  const SubjectDataset d = generate_synthetic_subject(spec, 0);
  const PreprocessResult r = preprocess(d, PreprocessConfig{});
  CHECK(r.dataset.n_channels() == 10);
  REQUIRE(r.outliers.has_value());
  CHECK(r.dataset.size() == r.outliers->kept.size());
  for (std::size_t s = 0; s < r.dataset.n_samples(); s += 97) {
    double sum = 0.0;
    for (std::size_t c = 0; c < 10; ++c) sum += r.dataset.epochs()[0].channel(c)[s];
    CHECK(std::abs(sum) < 1e-9);
  }

  PreprocessConfig off;
  off.selection.reset();
  off.reject_outliers = false;
  off.bandpass = false;
  off.car = false;
  CHECK(preprocess(d, off).dataset == d);
}
