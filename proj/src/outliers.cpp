#include <cmath>
#include <fstream>
#include <numeric>

#include "mieeg/preprocess.hpp"

namespace mieeg {

namespace {

struct Moments {
  double mean;
  double stddev;
};

Moments population_moments(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

bool within(double v, const Moments& m, double n_sigma) {
  return v >= m.mean - n_sigma * m.stddev && v <= m.mean + n_sigma * m.stddev;
}

double mean_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

}  // namespace

std::pair<SubjectDataset, OutlierReport> reject_outliers(const SubjectDataset& dataset, OutlierMode mode,
                                                         double n_sigma) {
  if (dataset.size() < 2)
    throw Error(ErrorCode::TooFewEpochs, "outlier rejection needs at least 2 epochs, subject " +
                                             std::to_string(dataset.subject_id()) + " has " +
                                             std::to_string(dataset.size()));
  OutlierReport report;
  report.mode = mode;
  for (const Epoch& e : dataset.epochs()) report.epoch_means.push_back(mean_of(e.data()));
  const Moments global = population_moments(report.epoch_means);
  report.mean = global.mean;
  report.stddev = global.stddev;

  std::vector<bool> keep(dataset.size(), true);
  if (mode == OutlierMode::EpochMean) {
    for (std::size_t i = 0; i < dataset.size(); ++i) keep[i] = within(report.epoch_means[i], global, n_sigma);
  } else {
    const std::size_t n_ch = dataset.n_channels();
    std::vector<double> means(dataset.size());
    for (std::size_t c = 0; c < n_ch; ++c) {
      for (std::size_t i = 0; i < dataset.size(); ++i) means[i] = mean_of(dataset.epochs()[i].channel(c));
      const Moments m = population_moments(means);
      for (std::size_t i = 0; i < dataset.size(); ++i)
        if (!within(means[i], m, n_sigma)) keep[i] = false;
    }
  }

  std::vector<Epoch> survivors;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (keep[i]) {
      report.kept.push_back(i);
      survivors.push_back(dataset.epochs()[i]);
    } else {
      report.removed.push_back(i);
    }
  }
  return {SubjectDataset(dataset.subject_id(), std::move(survivors), dataset.provenance()), std::move(report)};
}

void write_outlier_csv(const OutlierReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  out.precision(17);
  out << "epoch_index,mean,kept\n";
  std::vector<bool> kept(report.epoch_means.size(), false);
  for (std::size_t i : report.kept) kept[i] = true;
  for (std::size_t i = 0; i < report.epoch_means.size(); ++i)
    out << i << ',' << report.epoch_means[i] << ',' << (kept[i] ? 1 : 0) << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "write error on " + path.string());
}

}  // namespace mieeg
