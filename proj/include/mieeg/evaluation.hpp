#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mieeg/classifiers.hpp"
#include "mieeg/core.hpp"
#include "mieeg/features.hpp"
#include "mieeg/preprocess.hpp"

namespace mieeg {

// ---------------------------------------------------------------------------
// Confusion matrix and metrics
// ---------------------------------------------------------------------------

/// K x K counts, rows = true class, columns = predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes = kNumClasses);
  /// 2 x 2 layout with class 0 as the positive class: [[tp, fn], [fp, tn]].
  static ConfusionMatrix binary(std::uint64_t tp, std::uint64_t tn, std::uint64_t fp, std::uint64_t fn);

  std::size_t n_classes() const { return k_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * k_ + predicted]; }
  std::uint64_t& at(std::size_t truth, std::size_t predicted) { return counts_[truth * k_ + predicted]; }
  std::uint64_t total() const;
  std::uint64_t trace() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_;
  std::vector<std::uint64_t> counts_;
};

/// Throws LengthMismatch or EmptyDataset.
ConfusionMatrix confusion(std::span<const ClassLabel> truth, std::span<const ClassLabel> predicted);

struct ClassMetrics {
  std::uint64_t tp{0}, tn{0}, fp{0}, fn{0};
  double accuracy{0}, recall{0}, specificity{0}, f1{0};
  bool has_support{false};   // at least one true instance
  bool undefined{false};     // some ratio was 0/0 and was set to 0
};

/// Accuracy is always trace / total. For a 2 x 2 matrix recall, specificity
/// and F1 are those of the positive class (index 0). Otherwise they are
/// one-vs-rest per class, macro-averaged over classes that have at least one
/// true instance. 0/0 ratios are 0 and the class is flagged.
struct MetricSet {
  double accuracy{0}, recall{0}, specificity{0}, f1{0};
  std::vector<ClassMetrics> per_class;

  /// Classes with a 0/0 ratio or no true instances.
  std::vector<std::size_t> flagged_classes() const;
};

MetricSet metrics_from_confusion(const ConfusionMatrix& cm);

// ---------------------------------------------------------------------------
// Per-subject protocol
// ---------------------------------------------------------------------------

struct PipelineConfig {
  PreprocessConfig preprocess{};
  FeatureParams features{};
  bool standardize_features{false};
  ModelConfig model{};
  double train_fraction{0.8};
  std::uint64_t seed{42};
  int cv_folds{5};  // 0 disables validation
  bool measure_time{true};
};

struct PredictionRecord {
  std::size_t epoch_index;  // index among the preprocessed epochs
  ClassLabel truth;
  Prediction prediction;
};

struct SubjectResult {
  int subject_id{0};
  ModelKind model{ModelKind::FineKnn};
  ConfusionMatrix confusion{};
  MetricSet metrics{};
  std::size_t n_train{0};
  std::size_t n_test{0};
  std::size_t n_removed{0};  // outliers
  std::optional<double> validation_accuracy;
  double fit_seconds{0.0};
  std::size_t model_bytes{0};

  // Artifacts for the output directory.
  std::vector<char> model_blob;
  std::vector<PredictionRecord> predictions;
  std::vector<FeatureVector> features;
  std::optional<OutlierReport> outliers;
};

/// preprocess -> features -> stratified split -> (k-fold validation on the
/// training part) -> fit (timed) -> predict test -> metrics. Stage errors are
/// rethrown with the subject id and stage name.
SubjectResult run_subject(const SubjectDataset& dataset, const PipelineConfig& config);

/// Accuracy of k-fold stratified cross-validation; nullopt if any fold cannot
/// be fitted (e.g. a class too small for the fold count).
std::optional<double> cross_validate(std::span<const FeatureVector> features, const ModelConfig& model, int folds,
                                     std::uint64_t seed);

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

struct SubjectSource {
  std::string name;
  std::function<SubjectDataset()> load;
};

struct SubjectFailure {
  std::string source;
  std::string message;
};

struct MetricSummary {
  double mean{0.0};
  double stddev{0.0};  // population
};

struct CorpusSummary {
  std::size_t n_subjects{0};
  MetricSummary accuracy, recall, specificity, f1;
};

struct CorpusResult {
  std::vector<SubjectResult> results;  // in source order
  std::vector<SubjectFailure> failures;
  CorpusSummary summary;
};

CorpusSummary summarize(std::span<const SubjectResult> results);

/// Failures are isolated per subject. Results keep input order regardless of
/// `jobs`. Throws AllSubjectsFailed when nothing succeeds.
CorpusResult run_corpus(const std::vector<SubjectSource>& sources, const PipelineConfig& config, int jobs = 1);
CorpusResult run_corpus(const std::vector<SubjectDataset>& datasets, const PipelineConfig& config, int jobs = 1);
CorpusResult run_corpus_files(const std::vector<std::filesystem::path>& paths, const PipelineConfig& config,
                              int jobs = 1);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct BaselineRow {
  std::string label;
  double accuracy;
  std::optional<double> recall, specificity, f1;
};

struct BaselineTable {
  std::vector<BaselineRow> rows;
};

/// Published within-subject results on the 52-subject motor imagery corpus.
BaselineTable default_baselines();

/// One line of results.csv plus the classes flagged by its confusion matrix.
struct ReportRow {
  int subject_id{0};
  std::string model;
  double accuracy{0}, recall{0}, specificity{0}, f1{0};
  double fit_seconds{0};
  std::size_t model_bytes{0};
  std::vector<std::size_t> flagged_classes;
};

ReportRow report_row(const SubjectResult& result);

/// subject,model,accuracy,recall,specificity,f1,fit_seconds,model_bytes.
/// With include_timing = false the fit_seconds column is written as 0.
void write_results_csv(std::span<const ReportRow> rows, const std::filesystem::path& path, bool include_timing = true);
std::vector<ReportRow> read_results_csv(const std::filesystem::path& path);

void write_confusion_csv(const ConfusionMatrix& cm, const std::filesystem::path& path);
ConfusionMatrix read_confusion_csv(const std::filesystem::path& path);

void write_predictions_csv(std::span<const PredictionRecord> predictions, const std::filesystem::path& path);

/// Writes comparison.md, comparison.csv and per_subject_accuracy.csv into
/// `out_dir`. Output depends only on `rows` and `baselines`.
void emit_comparison_report(std::span<const ReportRow> rows, const BaselineTable& baselines,
                            const std::filesystem::path& out_dir);

/// Shortest of %.4f with trailing zeros trimmed ("0.9950" -> "0.995").
std::string format_metric(double v);

}  // namespace mieeg
