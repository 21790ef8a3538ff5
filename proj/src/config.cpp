#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mieeg/run_config.hpp"

namespace mieeg {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void bad(std::string_view key, std::string_view value, const char* expected) {
  throw Error(ErrorCode::Config, std::string(key) + ": expected " + expected + ", got '" + std::string(value) + "'");
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, v, "true or false");
}

template <typename T>
T to_int(std::string_view key, std::string_view v) {
  T out{};
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || end != v.data() + v.size()) bad(key, v, "an integer");
  return out;
}

double to_double(std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    const std::string s(v);
    const double out = std::stod(s, &used);
    if (used != s.size()) bad(key, v, "a number");
    return out;
  } catch (const std::logic_error&) {
    bad(key, v, "a number");
  }
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* yes(bool b) { return b ? "true" : "false"; }

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& i : items) {
    if (!s.empty()) s += ',';
    s += i;
  }
  return s;
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string v = trim(raw);
  auto& pre = pipeline.preprocess;
  auto& model = pipeline.model;

  if (key == "input") {
    inputs.clear();
    for (const auto& p : split_list(v)) inputs.emplace_back(p);
  } else if (key == "input_dir") {
    input_dir = v;
  } else if (key == "synthetic") {
    use_synthetic = to_bool(key, v);
  } else if (key == "synthetic.subjects") {
    synthetic.n_subjects = to_int<int>(key, v);
  } else if (key == "synthetic.epochs") {
    synthetic.n_epochs_per_subject = to_int<int>(key, v);
  } else if (key == "synthetic.channels") {
    synthetic.n_channels = to_int<int>(key, v);
  } else if (key == "synthetic.samples") {
    synthetic.n_samples = to_int<int>(key, v);
  } else if (key == "synthetic.rate") {
    synthetic.sample_rate_hz = to_double(key, v);
  } else if (key == "synthetic.strength") {
    synthetic.lateralization_strength = to_double(key, v);
  } else if (key == "synthetic.noise") {
    synthetic.noise_std = to_double(key, v);
  } else if (key == "synthetic.seed") {
    synthetic.seed = to_int<std::uint64_t>(key, v);
  } else if (key == "channels") {
    if (v == "none") {
      pre.selection.reset();
    } else {
      try {
        pre.selection = ChannelSelection(split_list(v));
      } catch (const Error& e) {
        throw Error(ErrorCode::Config, "channels: " + e.message());
      }
    }
  } else if (key == "outliers") {
    pre.reject_outliers = to_bool(key, v);
  } else if (key == "outlier_mode") {
    if (v == "epoch")
      pre.outlier_mode = OutlierMode::EpochMean;
    else if (v == "channel")
      pre.outlier_mode = OutlierMode::PerChannel;
    else
      bad(key, v, "epoch or channel");
  } else if (key == "bandpass") {
    pre.bandpass = to_bool(key, v);
  } else if (key == "car") {
    pre.car = to_bool(key, v);
  } else if (key == "filter.low") {
    pre.filter.low_hz = to_double(key, v);
  } else if (key == "filter.high") {
    pre.filter.high_hz = to_double(key, v);
  } else if (key == "filter.order") {
    pre.filter.order = to_int<int>(key, v);
  } else if (key == "filter.order_kind") {
    if (v == "prototype")
      pre.filter.convention = OrderConvention::Prototype;
    else if (v == "bandpass")
      pre.filter.convention = OrderConvention::Bandpass;
    else
      bad(key, v, "prototype or bandpass");
  } else if (key == "window") {
    pipeline.features.window = to_int<std::size_t>(key, v);
  } else if (key == "hop") {
    pipeline.features.hop = to_int<std::size_t>(key, v);
  } else if (key == "standardize") {
    pipeline.standardize_features = to_bool(key, v);
  } else if (key == "model") {
    const auto kind = parse_model_kind(v);
    if (!kind) bad(key, v, "qda, fine-knn, cos-knn or wide-nn");
    model.kind = *kind;
  } else if (key == "qda.regularize") {
    model.qda.regularize = to_bool(key, v);
  } else if (key == "qda.lambda") {
    model.qda.lambda = to_double(key, v);
  } else if (key == "knn.fine_k") {
    model.fine_k = to_int<std::size_t>(key, v);
  } else if (key == "knn.cosine_k") {
    model.cosine_k = to_int<std::size_t>(key, v);
  } else if (key == "nn.hidden") {
    model.nn.hidden = to_int<int>(key, v);
  } else if (key == "nn.learning_rate") {
    model.nn.learning_rate = to_double(key, v);
  } else if (key == "nn.epochs") {
    model.nn.max_epochs = to_int<int>(key, v);
  } else if (key == "nn.batch") {
    model.nn.batch_size = to_int<std::size_t>(key, v);
  } else if (key == "nn.standardize") {
    model.nn.standardize_inputs = to_bool(key, v);
  } else if (key == "train_fraction") {
    pipeline.train_fraction = to_double(key, v);
  } else if (key == "seed") {
    pipeline.seed = to_int<std::uint64_t>(key, v);
    model.nn.seed = pipeline.seed;
  } else if (key == "cv_folds") {
    pipeline.cv_folds = to_int<int>(key, v);
  } else if (key == "jobs") {
    jobs = to_int<int>(key, v);
  } else if (key == "output") {
    output = v;
  } else if (key == "timing") {
    timing = to_bool(key, v);
    pipeline.measure_time = timing;
  } else if (key == "export_features") {
    export_features = to_bool(key, v);
  } else if (key == "diagnostics") {
    diagnostics = to_bool(key, v);
  } else {
    throw Error(ErrorCode::Config, "unknown key '" + std::string(key) + "'");
  }
}

void RunConfig::load_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Config, "line " + std::to_string(line_no) + ": expected key = value");
    set(trim(std::string_view(t).substr(0, eq)), std::string_view(t).substr(eq + 1));
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    load_text(ss.str());
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, path.string() + ": " + e.message());
  }
}

std::string RunConfig::to_text() const {
  const auto& pre = pipeline.preprocess;
  const auto& model = pipeline.model;
  std::vector<std::string> paths;
  for (const auto& p : inputs) paths.push_back(p.string());

  std::ostringstream out;
  out << "bandpass = " << yes(pre.bandpass) << '\n';
  out << "car = " << yes(pre.car) << '\n';
  out << "channels = " << (pre.selection ? join(pre.selection->names()) : "none") << '\n';
  out << "cv_folds = " << pipeline.cv_folds << '\n';
  out << "diagnostics = " << yes(diagnostics) << '\n';
  out << "export_features = " << yes(export_features) << '\n';
  out << "filter.high = " << num(pre.filter.high_hz) << '\n';
  out << "filter.low = " << num(pre.filter.low_hz) << '\n';
  out << "filter.order = " << pre.filter.order << '\n';
  out << "filter.order_kind = " << (pre.filter.convention == OrderConvention::Prototype ? "prototype" : "bandpass")
      << '\n';
  out << "hop = " << pipeline.features.hop << '\n';
  out << "input = " << join(paths) << '\n';
  out << "input_dir = " << input_dir.string() << '\n';
  out << "jobs = " << jobs << '\n';
  out << "knn.cosine_k = " << model.cosine_k << '\n';
  out << "knn.fine_k = " << model.fine_k << '\n';
  out << "model = " << model_kind_name(model.kind) << '\n';
  out << "nn.batch = " << model.nn.batch_size << '\n';
  out << "nn.epochs = " << model.nn.max_epochs << '\n';
  out << "nn.hidden = " << model.nn.hidden << '\n';
  out << "nn.learning_rate = " << num(model.nn.learning_rate) << '\n';
  out << "nn.standardize = " << yes(model.nn.standardize_inputs) << '\n';
  out << "outlier_mode = " << (pre.outlier_mode == OutlierMode::EpochMean ? "epoch" : "channel") << '\n';
  out << "outliers = " << yes(pre.reject_outliers) << '\n';
  out << "output = " << output.string() << '\n';
  out << "qda.lambda = " << num(model.qda.lambda) << '\n';
  out << "qda.regularize = " << yes(model.qda.regularize) << '\n';
  out << "seed = " << pipeline.seed << '\n';
  out << "standardize = " << yes(pipeline.standardize_features) << '\n';
  out << "synthetic = " << yes(use_synthetic) << '\n';
  out << "synthetic.channels = " << synthetic.n_channels << '\n';
  out << "synthetic.epochs = " << synthetic.n_epochs_per_subject << '\n';
  out << "synthetic.noise = " << num(synthetic.noise_std) << '\n';
  out << "synthetic.rate = " << num(synthetic.sample_rate_hz) << '\n';
  out << "synthetic.samples = " << synthetic.n_samples << '\n';
  out << "synthetic.seed = " << synthetic.seed << '\n';
  out << "synthetic.strength = " << num(synthetic.lateralization_strength) << '\n';
  out << "synthetic.subjects = " << synthetic.n_subjects << '\n';
  out << "timing = " << yes(timing) << '\n';
  out << "train_fraction = " << num(pipeline.train_fraction) << '\n';
  out << "window = " << pipeline.features.window << '\n';
  return out.str();
}

void RunConfig::validate() const {
  if (!use_synthetic && inputs.empty() && input_dir.empty())
    throw Error(ErrorCode::Config, "no input: give input files, an input directory or synthetic = true");
  if (!(pipeline.train_fraction > 0.0 && pipeline.train_fraction < 1.0))
    throw Error(ErrorCode::Config, "train_fraction must be in (0, 1)");
  if (jobs < 1) throw Error(ErrorCode::Config, "jobs must be at least 1");
  if (pipeline.cv_folds < 0 || pipeline.cv_folds == 1) throw Error(ErrorCode::Config, "cv_folds must be 0 or >= 2");
  if (pipeline.features.window < 2 || pipeline.features.hop < 1)
    throw Error(ErrorCode::Config, "window must be >= 2 and hop >= 1");
  if (pipeline.model.fine_k == 0 || pipeline.model.cosine_k == 0) throw Error(ErrorCode::Config, "k must be >= 1");
  if (pipeline.model.nn.hidden < 1 || pipeline.model.nn.max_epochs < 1 || !(pipeline.model.nn.learning_rate > 0))
    throw Error(ErrorCode::Config, "wide-nn needs hidden >= 1, epochs >= 1 and a positive learning rate");
  if (!(pipeline.model.qda.lambda >= 0)) throw Error(ErrorCode::Config, "qda.lambda must be >= 0");
  try {
    pipeline.preprocess.filter.validate();
    if (use_synthetic) synthetic.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.message());
  }
}

}  // namespace mieeg
