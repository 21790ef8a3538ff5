#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "mieeg/core.hpp"
#include "mieeg/error.hpp"
#include "mieeg/features.hpp"
#include "mieeg/ingestion.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("mieeg_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

template <typename F>
mieeg::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const mieeg::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected a mieeg::Error");
}

inline std::vector<char> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<double> gaussian(std::mt19937_64& rng, std::size_t n, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

inline std::vector<std::string> names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("Ch" + std::to_string(i + 1));
  return out;
}

inline mieeg::Epoch random_epoch(std::mt19937_64& rng, std::size_t channels, std::size_t samples,
                                 mieeg::ClassLabel label = mieeg::ClassLabel::Left, double rate = 512.0) {
  return mieeg::Epoch(1, label, names(channels), samples, gaussian(rng, channels * samples), rate);
}

// Small random dataset with round-robin labels.
inline mieeg::SubjectDataset random_dataset(std::mt19937_64& rng, std::size_t n_epochs, std::size_t channels,
                                            std::size_t samples, int subject_id = 1) {
  std::vector<mieeg::Epoch> epochs;
  for (std::size_t e = 0; e < n_epochs; ++e)
    epochs.emplace_back(subject_id, static_cast<mieeg::ClassLabel>(e % 3), names(channels), samples,
                        gaussian(rng, channels * samples), 512.0);
  return mieeg::SubjectDataset(subject_id, std::move(epochs), mieeg::Provenance::Synthetic);
}

inline mieeg::FeatureVector fv(std::vector<double> values, mieeg::ClassLabel label) {
  return mieeg::FeatureVector{std::move(values), label, 1};
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace testing
