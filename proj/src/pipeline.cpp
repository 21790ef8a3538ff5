#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "mieeg/evaluation.hpp"
#include "mieeg/ingestion.hpp"

namespace mieeg {

namespace {

template <typename F>
auto stage(int subject_id, const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), "subject " + std::to_string(subject_id) + ", stage " + name + ": " + e.message());
  }
}

template <typename T>
std::vector<T> gather(std::span<const T> items, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(items[i]);
  return out;
}

MetricSummary summary_of(std::span<const SubjectResult> results, double MetricSet::*field) {
  MetricSummary s;
  const double n = static_cast<double>(results.size());
  for (const auto& r : results) s.mean += r.metrics.*field;
  s.mean /= n;
  double ss = 0.0;
  for (const auto& r : results) ss += (r.metrics.*field - s.mean) * (r.metrics.*field - s.mean);
  s.stddev = std::sqrt(ss / n);
  return s;
}

}  // namespace

std::optional<double> cross_validate(std::span<const FeatureVector> features, const ModelConfig& model, int folds,
                                     std::uint64_t seed) {
  if (folds < 2 || features.size() < static_cast<std::size_t>(folds)) return std::nullopt;

  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < features.size(); ++i) by_class[label_code(features[i].label)].push_back(i);
  std::vector<int> fold_of(features.size(), 0);
  std::mt19937_64 rng(seed);
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t j = 0; j < members.size(); ++j) fold_of[members[j]] = static_cast<int>(j % static_cast<std::size_t>(folds));
  }

  std::size_t correct = 0;
  std::size_t seen = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<FeatureVector> train;
    std::vector<const FeatureVector*> held_out;
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (fold_of[i] == f)
        held_out.push_back(&features[i]);
      else
        train.push_back(features[i]);
    }
    if (held_out.empty()) continue;
    try {
      const TrainedModel m = fit_model(train, model);
      for (const auto* x : held_out) {
        if (predict(m, x->values).label == x->label) ++correct;
        ++seen;
      }
    } catch (const Error&) {
      return std::nullopt;
    }
  }
  if (seen == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(seen);
}

SubjectResult run_subject(const SubjectDataset& dataset, const PipelineConfig& config) {
  const int sid = dataset.subject_id();
  stage(sid, "validate", [&] { dataset.validate_for_training(); });

  SubjectResult r;
  r.subject_id = sid;
  r.model = config.model.kind;

  const PreprocessResult pre = stage(sid, "preprocess", [&] { return preprocess(dataset, config.preprocess); });
  r.outliers = pre.outliers;
  r.n_removed = pre.outliers ? pre.outliers->removed.size() : 0;

  r.features = stage(sid, "features", [&] { return extract_features(pre.dataset, config.features); });
  const std::span<const FeatureVector> all(r.features);

  std::vector<ClassLabel> labels;
  for (const auto& f : r.features) labels.push_back(f.label);
  const SplitIndices split = stage(sid, "split", [&] { return stratified_split(labels, config.train_fraction, config.seed); });
  r.n_train = split.train.size();
  r.n_test = split.test.size();

  std::vector<FeatureVector> train = gather(all, split.train);
  std::vector<FeatureVector> test = gather(all, split.test);
  if (config.standardize_features) {
    const Standardizer z = Standardizer::fit(train);
    train = z.apply(train);
    test = z.apply(test);
  }

  if (config.cv_folds > 0) r.validation_accuracy = cross_validate(train, config.model, config.cv_folds, config.seed + 1);

  const auto t0 = std::chrono::steady_clock::now();
  const TrainedModel model = stage(sid, "fit", [&] { return fit_model(train, config.model); });
  const auto t1 = std::chrono::steady_clock::now();
  r.fit_seconds = config.measure_time ? std::chrono::duration<double>(t1 - t0).count() : 0.0;

  r.model_blob = serialize_model(model);
  r.model_bytes = r.model_blob.size();

  std::vector<ClassLabel> truth;
  std::vector<ClassLabel> predicted;
  stage(sid, "predict", [&] {
    for (std::size_t i = 0; i < test.size(); ++i) {
      const Prediction p = predict(model, test[i].values);
      r.predictions.push_back({split.test[i], test[i].label, p});
      truth.push_back(test[i].label);
      predicted.push_back(p.label);
    }
  });
  r.confusion = confusion(truth, predicted);
  r.metrics = metrics_from_confusion(r.confusion);
  return r;
}

CorpusSummary summarize(std::span<const SubjectResult> results) {
  CorpusSummary s;
  s.n_subjects = results.size();
  if (results.empty()) return s;
  s.accuracy = summary_of(results, &MetricSet::accuracy);
  s.recall = summary_of(results, &MetricSet::recall);
  s.specificity = summary_of(results, &MetricSet::specificity);
  s.f1 = summary_of(results, &MetricSet::f1);
  return s;
}

CorpusResult run_corpus(const std::vector<SubjectSource>& sources, const PipelineConfig& config, int jobs) {
  if (sources.empty()) throw Error(ErrorCode::EmptyDataset, "no subjects to evaluate");
  std::vector<std::optional<SubjectResult>> done(sources.size());
  std::vector<std::optional<SubjectFailure>> failed(sources.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < sources.size(); i = next++) {
      try {
        done[i] = run_subject(sources[i].load(), config);
      } catch (const std::exception& e) {
        failed[i] = SubjectFailure{sources[i].name, e.what()};
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(sources.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  CorpusResult out;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (done[i]) out.results.push_back(std::move(*done[i]));
    if (failed[i]) out.failures.push_back(std::move(*failed[i]));
  }
  if (out.results.empty()) {
    std::string detail;
    for (const auto& f : out.failures) detail += "\n  " + f.source + ": " + f.message;
    throw Error(ErrorCode::AllSubjectsFailed, std::to_string(out.failures.size()) + " subject(s) failed" + detail);
  }
  out.summary = summarize(out.results);
  return out;
}

CorpusResult run_corpus(const std::vector<SubjectDataset>& datasets, const PipelineConfig& config, int jobs) {
  std::vector<SubjectSource> sources;
  for (const auto& d : datasets) sources.push_back({"subject " + std::to_string(d.subject_id()), [&d] { return d; }});
  return run_corpus(sources, config, jobs);
}

CorpusResult run_corpus_files(const std::vector<std::filesystem::path>& paths, const PipelineConfig& config, int jobs) {
  std::vector<SubjectSource> sources;
  for (const auto& p : paths) sources.push_back({p.string(), [p] { return read_epoch_file(p); }});
  return run_corpus(sources, config, jobs);
}

}  // namespace mieeg
