#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mieeg/evaluation.hpp"
#include "mieeg/ingestion.hpp"

namespace mieeg {

/// Everything a `run` needs, stored as flat key=value text. Keys:
///
///   input            comma-separated EPB1 paths
///   input_dir        directory scanned for *.epb
///   synthetic        true|false, evaluate generated subjects instead of files
///   synthetic.*      subjects, epochs, channels, samples, rate, strength,
///                    noise, seed
///   channels         10 comma-separated labels, or "none" to keep all
///   outliers         true|false       outlier_mode   epoch|channel
///   bandpass         true|false       car            true|false
///   filter.low, filter.high, filter.order, filter.order_kind (prototype|bandpass)
///   window, hop      spectrogram frame and step in samples
///   standardize      z-score features (fitted on the training split)
///   model            qda|fine-knn|cos-knn|wide-nn
///   qda.regularize, qda.lambda, knn.fine_k, knn.cosine_k,
///   nn.hidden, nn.learning_rate, nn.epochs, nn.batch, nn.standardize
///   train_fraction, seed, cv_folds, jobs, output
///   timing           write measured fit times (false writes 0)
///   export_features  write per-subject feature CSVs
///   diagnostics      write filter response and outlier CSVs
struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path input_dir;
  SyntheticSpec synthetic{};
  bool use_synthetic{false};
  PipelineConfig pipeline{};
  int jobs{1};
  std::filesystem::path output{"mieeg_out"};
  bool timing{true};
  bool export_features{false};
  bool diagnostics{false};

  /// Applies one key. Throws Config for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  /// Parses `key = value` lines; '#' starts a comment.
  void load_text(std::string_view text);
  void load_file(const std::filesystem::path& path);

  /// Every key, sorted, one per line. load_text(to_text()) reproduces the config.
  std::string to_text() const;
  /// Throws Config if the run cannot start (no inputs, bad fractions, ...).
  void validate() const;
};

}  // namespace mieeg
