#include "mieeg/preprocess.hpp"

namespace mieeg {

PreprocessResult preprocess(const SubjectDataset& dataset, const PreprocessConfig& config) {
  SubjectDataset current = config.selection ? select_channels(dataset, *config.selection) : dataset;

  std::optional<OutlierReport> report;
  if (config.reject_outliers) {
    auto [kept, r] = reject_outliers(current, config.outlier_mode);
    current = std::move(kept);
    report = std::move(r);
  }

  if (!config.bandpass && !config.car) return {std::move(current), std::move(report)};

  std::optional<BiquadCascade> cascade;
  if (config.bandpass && !current.empty()) {
    FilterSpec spec = config.filter;
    spec.sample_rate_hz = current.sample_rate_hz();
    cascade = design_bandpass(spec);
  }

  std::vector<Epoch> out;
  out.reserve(current.size());
  for (const Epoch& e : current.epochs()) {
    Epoch x = cascade ? apply_filter(*cascade, e) : e;
    out.push_back(config.car ? apply_car(x) : std::move(x));
  }
  return {SubjectDataset(current.subject_id(), std::move(out), current.provenance()), std::move(report)};
}

}  // namespace mieeg
