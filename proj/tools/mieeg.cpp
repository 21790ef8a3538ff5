// mieeg: synth | run | inspect | report
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "mieeg/evaluation.hpp"
#include "mieeg/ingestion.hpp"
#include "mieeg/run_config.hpp"

namespace fs = std::filesystem;
using namespace mieeg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void log(const std::string& msg) { std::cerr << "mieeg: " << msg << '\n'; }

fs::path default_output(const char* fallback) {
  if (const char* env = std::getenv("MIEEG_OUTPUT_DIR"); env && *env) return env;
  return fallback;
}

std::string subject_stem(int subject_id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "subject_%02d", subject_id);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

void write_bytes(const fs::path& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  SyntheticSpec spec{};
  fs::path out;
};

int cmd_synth(const SynthArgs& args) {
  try {
    args.spec.validate();
  } catch (const Error& e) {
    throw UsageError(e.message());
  }
  fs::create_directories(args.out);
  nlohmann::ordered_json manifest;
  manifest["format"] = "EPB1";
  manifest["synthetic"] = {
      {"subjects", args.spec.n_subjects},
      {"epochs_per_subject", args.spec.n_epochs_per_subject},
      {"channels", args.spec.n_channels},
      {"samples", args.spec.n_samples},
      {"sample_rate_hz", args.spec.sample_rate_hz},
      {"lateralization_strength", args.spec.lateralization_strength},
      {"noise_std", args.spec.noise_std},
      {"seed", args.spec.seed},
  };
  manifest["subjects"] = nlohmann::ordered_json::array();
  for (int i = 0; i < args.spec.n_subjects; ++i) {
    const SubjectDataset d = generate_synthetic_subject(args.spec, i);
    const std::string name = subject_stem(d.subject_id()) + ".epb";
    const std::vector<char> bytes = encode_epoch_file(d);
    write_bytes(args.out / name, bytes);
    const auto counts = d.class_counts();
    manifest["subjects"].push_back({
        {"subject_id", d.subject_id()},
        {"file", name},
        {"bytes", bytes.size()},
        {"epochs", d.epochs().size()},
        {"class_counts", {{"left", counts[0]}, {"right", counts[1]}, {"rest", counts[2]}}},
    });
  }
  write_text(args.out / "manifest.json", manifest.dump(2) + "\n");
  log("wrote " + std::to_string(args.spec.n_subjects) + " subject file(s) to " + args.out.string());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run

std::vector<SubjectSource> gather_sources(const RunConfig& cfg) {
  std::vector<SubjectSource> sources;
  if (cfg.use_synthetic) {
    for (int i = 0; i < cfg.synthetic.n_subjects; ++i)
      sources.push_back({"synthetic subject " + std::to_string(i + 1),
                         [spec = cfg.synthetic, i] { return generate_synthetic_subject(spec, i); }});
    return sources;
  }
  std::vector<fs::path> paths = cfg.inputs;
  if (!cfg.input_dir.empty()) {
    if (!fs::is_directory(cfg.input_dir))
      throw Error(ErrorCode::IoFailure, "input directory " + cfg.input_dir.string() + " does not exist");
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(cfg.input_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".epb") found.push_back(entry.path());
    std::sort(found.begin(), found.end());
    paths.insert(paths.end(), found.begin(), found.end());
  }
  for (const auto& p : paths) sources.push_back({p.string(), [p] { return read_epoch_file(p); }});
  return sources;
}

double response_rate(const RunConfig& cfg) {
  if (cfg.use_synthetic) return cfg.synthetic.sample_rate_hz;
  std::vector<fs::path> paths = cfg.inputs;
  for (const auto& p : paths) {
    try {
      return read_epoch_header(p).sample_rate_hz;
    } catch (const Error&) {
    }
  }
  return cfg.pipeline.preprocess.filter.sample_rate_hz;
}

void write_failures(const std::vector<SubjectFailure>& failures, const fs::path& path) {
  std::string text = "source,message\n";
  for (const auto& f : failures) {
    std::string msg = f.message;
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::replace(msg.begin(), msg.end(), ',', ';');
    text += f.source + ',' + msg + '\n';
  }
  write_text(path, text);
}

int cmd_run(RunConfig cfg) {
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.message());
  }
  const std::vector<SubjectSource> sources = gather_sources(cfg);
  if (sources.empty()) throw Error(ErrorCode::EmptyDataset, "no .epb files found");

  fs::create_directories(cfg.output);
  write_text(cfg.output / "config.txt", cfg.to_text());
  const std::string model = std::string(model_kind_name(cfg.pipeline.model.kind));
  log("running " + model + " on " + std::to_string(sources.size()) + " subject(s), jobs " + std::to_string(cfg.jobs));

  CorpusResult corpus;
  try {
    corpus = run_corpus(sources, cfg.pipeline, cfg.jobs);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AllSubjectsFailed) write_text(cfg.output / "failures.csv", "source,message\n");
    throw;
  }
  for (const auto& f : corpus.failures) log("skipped " + f.source + ": " + f.message);

  for (const char* sub : {"confusion", "predictions", "models"}) fs::create_directories(cfg.output / sub);
  if (cfg.export_features) fs::create_directories(cfg.output / "features");
  if (cfg.diagnostics) fs::create_directories(cfg.output / "diagnostics");

  std::vector<ReportRow> rows;
  for (const auto& r : corpus.results) {
    const std::string stem = subject_stem(r.subject_id) + "_" + model;
    rows.push_back(report_row(r));
    write_confusion_csv(r.confusion, cfg.output / "confusion" / (stem + ".csv"));
    write_predictions_csv(r.predictions, cfg.output / "predictions" / (stem + ".csv"));
    write_bytes(cfg.output / "models" / (stem + ".mdl"), r.model_blob);
    if (cfg.export_features) write_feature_csv(r.features, cfg.output / "features" / (subject_stem(r.subject_id) + ".csv"));
    if (cfg.diagnostics && r.outliers)
      write_outlier_csv(*r.outliers, cfg.output / "diagnostics" / (subject_stem(r.subject_id) + "_outliers.csv"));
    std::string line = subject_stem(r.subject_id) + ": accuracy " + format_metric(r.metrics.accuracy);
    if (r.validation_accuracy) line += ", validation " + format_metric(*r.validation_accuracy);
    line += ", removed " + std::to_string(r.n_removed);
    log(line);
  }
  if (cfg.diagnostics && cfg.pipeline.preprocess.bandpass) {
    FilterSpec spec = cfg.pipeline.preprocess.filter;
    spec.sample_rate_hz = response_rate(cfg);
    write_frequency_response_csv(design_bandpass(spec), spec.sample_rate_hz, cfg.output / "diagnostics" / "filter_response.csv");
  }
  write_results_csv(rows, cfg.output / "results.csv", cfg.timing);
  write_failures(corpus.failures, cfg.output / "failures.csv");
  emit_comparison_report(rows, default_baselines(), cfg.output);

  const auto& s = corpus.summary;
  log("mean accuracy " + format_metric(s.accuracy.mean) + " (sd " + format_metric(s.accuracy.stddev) + ") over " +
      std::to_string(s.n_subjects) + " subject(s), " + std::to_string(corpus.failures.size()) + " failed");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// inspect

int cmd_inspect(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  const std::string_view m(magic, static_cast<std::size_t>(in.gcount()));
  in.close();

  if (m == kModelFileMagic) {
    std::cout << describe_model(load_model(path)) << '\n';
    return kExitOk;
  }
  // Anything else is treated as EPB1; the decoder reports BadMagic.
  const SubjectDataset d = read_epoch_file(path);
  const auto counts = d.class_counts();
  std::cout << "epochs: " << d.epochs().size() << ", channels: " << d.n_channels() << ", samples: " << d.n_samples()
            << '\n';
  std::cout << "subject: " << d.subject_id() << ", sample rate: " << d.sample_rate_hz() << " Hz\n";
  std::cout << "classes: left " << counts[0] << ", right " << counts[1] << ", rest " << counts[2] << '\n';
  std::cout << "channels:";
  for (const auto& n : d.channel_names()) std::cout << ' ' << n;
  std::cout << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const fs::path& results_dir, const fs::path& out_dir) {
  std::vector<ReportRow> rows = read_results_csv(results_dir / "results.csv");
  for (auto& r : rows) {
    const fs::path cm = results_dir / "confusion" / (subject_stem(r.subject_id) + "_" + r.model + ".csv");
    if (fs::exists(cm)) r.flagged_classes = metrics_from_confusion(read_confusion_csv(cm)).flagged_classes();
  }
  emit_comparison_report(rows, default_baselines(), out_dir);
  log("report for " + std::to_string(rows.size()) + " row(s) written to " + out_dir.string());
  return kExitOk;
}

// Flags of `run`, each mapped onto a RunConfig key.
struct RunFlag {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr RunFlag kRunFlags[] = {
    {"--input-dir", "input_dir", "Directory of .epb files"},
    {"--subjects", "synthetic.subjects", "Synthetic subjects"},
    {"--epochs", "synthetic.epochs", "Synthetic epochs per subject"},
    {"--synthetic-channels", "synthetic.channels", "Synthetic channel count"},
    {"--samples", "synthetic.samples", "Synthetic samples per epoch"},
    {"--rate", "synthetic.rate", "Synthetic sample rate (Hz)"},
    {"--strength", "synthetic.strength", "Synthetic lateralization strength"},
    {"--noise", "synthetic.noise", "Synthetic noise std"},
    {"--synthetic-seed", "synthetic.seed", "Synthetic generator seed"},
    {"--channels", "channels", "10 comma-separated channel labels, or none"},
    {"--outliers", "outliers", "Reject 3-sigma outlier epochs (true|false)"},
    {"--outlier-mode", "outlier_mode", "epoch|channel"},
    {"--bandpass", "bandpass", "Apply the bandpass filter (true|false)"},
    {"--car", "car", "Apply common average reference (true|false)"},
    {"--low", "filter.low", "Lower band edge (Hz)"},
    {"--high", "filter.high", "Upper band edge (Hz)"},
    {"--order", "filter.order", "Filter order"},
    {"--order-kind", "filter.order_kind", "prototype|bandpass"},
    {"--window", "window", "Spectrogram window (samples)"},
    {"--hop", "hop", "Spectrogram hop (samples)"},
    {"--standardize", "standardize", "Z-score features (true|false)"},
    {"--model", "model", "qda|fine-knn|cos-knn|wide-nn"},
    {"--qda-regularize", "qda.regularize", "Ridge on QDA covariances (true|false)"},
    {"--qda-lambda", "qda.lambda", "Relative QDA ridge"},
    {"--fine-k", "knn.fine_k", "Neighbors for fine-knn"},
    {"--cosine-k", "knn.cosine_k", "Neighbors for cos-knn"},
    {"--nn-hidden", "nn.hidden", "Hidden units of wide-nn"},
    {"--nn-lr", "nn.learning_rate", "Learning rate of wide-nn"},
    {"--nn-epochs", "nn.epochs", "Training epochs of wide-nn"},
    {"--nn-batch", "nn.batch", "Mini-batch size of wide-nn (0 = full batch)"},
    {"--nn-standardize", "nn.standardize", "Standardize wide-nn inputs (true|false)"},
    {"--train-fraction", "train_fraction", "Training share of each subject"},
    {"--seed", "seed", "Split and training seed"},
    {"--cv-folds", "cv_folds", "Validation folds on the training part (0 = off)"},
    {"--jobs", "jobs", "Subjects evaluated in parallel"},
    {"--out", "output", "Output directory"},
    {"--timing", "timing", "Record fit times (true|false)"},
    {"--export-features", "export_features", "Write feature CSVs (true|false)"},
    {"--diagnostics", "diagnostics", "Write filter response and outlier CSVs (true|false)"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motor imagery EEG classification pipeline"};
  app.require_subcommand(1);

  SynthArgs synth;
  std::string synth_out = default_output("synthetic").string();
  auto* synth_cmd = app.add_subcommand("synth", "Write synthetic subjects as EPB1 files");
  synth_cmd->add_option("--subjects", synth.spec.n_subjects, "Number of subjects")->capture_default_str();
  synth_cmd->add_option("--epochs", synth.spec.n_epochs_per_subject, "Epochs per subject")->capture_default_str();
  synth_cmd->add_option("--channels", synth.spec.n_channels, "Channels (10 motor, 64 full montage)")->capture_default_str();
  synth_cmd->add_option("--samples", synth.spec.n_samples, "Samples per epoch")->capture_default_str();
  synth_cmd->add_option("--rate", synth.spec.sample_rate_hz, "Sample rate (Hz)")->capture_default_str();
  synth_cmd->add_option("--strength", synth.spec.lateralization_strength, "Lateralized rhythm amplitude")
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth.spec.noise_std, "Noise std")->capture_default_str();
  synth_cmd->add_option("--seed", synth.spec.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "Output directory")->capture_default_str();

  std::string config_file;
  std::vector<std::string> inputs;
  std::vector<std::string> overrides;
  bool synthetic = false;
  std::map<std::string, std::string> run_values;
  std::map<std::string, CLI::Option*> run_options;
  auto* run_cmd = app.add_subcommand("run", "Evaluate subjects and write results");
  run_cmd->add_option("inputs", inputs, "EPB1 files");
  run_cmd->add_option("--config", config_file, "key = value config file")->check(CLI::ExistingFile);
  run_cmd->add_flag("--synthetic", synthetic, "Evaluate generated subjects instead of files");
  for (const auto& f : kRunFlags) run_options[f.key] = run_cmd->add_option(f.flag, run_values[f.key], f.help);
  run_cmd->add_option("--set", overrides, "Extra key=value settings");

  std::string inspect_path;
  auto* inspect_cmd = app.add_subcommand("inspect", "Summarize an EPB1 or MDL1 file");
  inspect_cmd->add_option("file", inspect_path, "File to inspect")->required();

  std::string report_dir;
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "Rebuild comparison tables from a run directory");
  report_cmd->add_option("dir", report_dir, "Directory holding results.csv")->required();
  report_cmd->add_option("--out", report_out, "Where to write (default: the run directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth_cmd) {
      synth.out = synth_out;
      return cmd_synth(synth);
    }
    if (*run_cmd) {
      RunConfig cfg;
      try {
        cfg.output = default_output("mieeg_out");
        if (!config_file.empty()) cfg.load_file(config_file);
        if (!inputs.empty()) {
          std::string joined;
          for (const auto& i : inputs) joined += (joined.empty() ? "" : ",") + i;
          cfg.set("input", joined);
        }
        if (synthetic) cfg.set("synthetic", "true");
        for (const auto& f : kRunFlags)
          if (run_options[f.key]->count() > 0) cfg.set(f.key, run_values[f.key]);
        for (const auto& o : overrides) {
          const auto eq = o.find('=');
          if (eq == std::string::npos) throw Error(ErrorCode::Config, "--set expects key=value, got '" + o + "'");
          cfg.set(o.substr(0, eq), o.substr(eq + 1));
        }
      } catch (const Error& e) {
        throw UsageError(e.message());
      }
      return cmd_run(std::move(cfg));
    }
    if (*inspect_cmd) return cmd_inspect(inspect_path);
    if (*report_cmd) return cmd_report(report_dir, report_out.empty() ? fs::path(report_dir) : fs::path(report_out));
  } catch (const UsageError& e) {
    log(std::string("usage: ") + e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
