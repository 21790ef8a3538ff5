#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mieeg/evaluation.hpp"

namespace mieeg {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write error on " + path.string());
}

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ShapeMismatch, path.string() + ": bad number '" + s + "'");
  }
}

std::string optional_metric(const std::optional<double>& v) { return v ? format_metric(*v) : ""; }

struct Average {
  double accuracy{0}, recall{0}, specificity{0}, f1{0};
  std::size_t n{0};
};

std::string flags_text(const std::vector<std::size_t>& flagged) {
  std::string s;
  for (std::size_t c : flagged) {
    if (!s.empty()) s += ' ';
    s += c < kNumClasses ? std::string(label_name(static_cast<ClassLabel>(c))) : std::to_string(c);
  }
  return s;
}

}  // namespace

std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

BaselineTable default_baselines() {
  return BaselineTable{{
      {"Cho et al.", 0.6746, std::nullopt, std::nullopt, std::nullopt},
      {"Kumar et al.", 0.6724, std::nullopt, std::nullopt, std::nullopt},
      {"Sadiq et al. (2021)", 0.8502, std::nullopt, std::nullopt, std::nullopt},
      {"Sadiq et al. (2022)", 0.8769, 0.8762, 0.8775, 0.8770},
      {"Published energy + ISE pipeline (real data)", 0.995, 0.9986, 0.9983, 0.9984},
  }};
}

ReportRow report_row(const SubjectResult& result) {
  ReportRow row;
  row.subject_id = result.subject_id;
  row.model = std::string(model_kind_name(result.model));
  row.accuracy = result.metrics.accuracy;
  row.recall = result.metrics.recall;
  row.specificity = result.metrics.specificity;
  row.f1 = result.metrics.f1;
  row.fit_seconds = result.fit_seconds;
  row.model_bytes = result.model_bytes;
  row.flagged_classes = result.metrics.flagged_classes();
  return row;
}

void write_results_csv(std::span<const ReportRow> rows, const std::filesystem::path& path, bool include_timing) {
  auto out = open_out(path);
  out << "subject,model,accuracy,recall,specificity,f1,fit_seconds,model_bytes\n";
  for (const auto& r : rows)
    out << r.subject_id << ',' << r.model << ',' << exact(r.accuracy) << ',' << exact(r.recall) << ','
        << exact(r.specificity) << ',' << exact(r.f1) << ',' << (include_timing ? exact(r.fit_seconds) : "0") << ','
        << r.model_bytes << '\n';
  finish(out, path);
}

std::vector<ReportRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("subject,model,accuracy", 0) != 0)
    throw Error(ErrorCode::ShapeMismatch, path.string() + ": not a results file");
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 8) throw Error(ErrorCode::ShapeMismatch, path.string() + ": expected 8 columns in '" + line + "'");
    ReportRow r;
    r.subject_id = static_cast<int>(parse_double(cells[0], path));
    r.model = cells[1];
    r.accuracy = parse_double(cells[2], path);
    r.recall = parse_double(cells[3], path);
    r.specificity = parse_double(cells[4], path);
    r.f1 = parse_double(cells[5], path);
    r.fit_seconds = parse_double(cells[6], path);
    r.model_bytes = static_cast<std::size_t>(parse_double(cells[7], path));
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_confusion_csv(const ConfusionMatrix& cm, const std::filesystem::path& path) {
  auto out = open_out(path);
  const auto name = [&](std::size_t c) {
    return cm.n_classes() == kNumClasses ? std::string(label_name(static_cast<ClassLabel>(c))) : std::to_string(c);
  };
  out << "true\\predicted";
  for (std::size_t j = 0; j < cm.n_classes(); ++j) out << ',' << name(j);
  out << '\n';
  for (std::size_t i = 0; i < cm.n_classes(); ++i) {
    out << name(i);
    for (std::size_t j = 0; j < cm.n_classes(); ++j) out << ',' << cm.at(i, j);
    out << '\n';
  }
  finish(out, path);
}

ConfusionMatrix read_confusion_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  const std::size_t k = split_csv(line).size() - 1;
  ConfusionMatrix cm(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!std::getline(in, line)) throw Error(ErrorCode::TruncatedPayload, path.string() + ": missing rows");
    const auto cells = split_csv(line);
    if (cells.size() != k + 1) throw Error(ErrorCode::ShapeMismatch, path.string() + ": ragged confusion row");
    for (std::size_t j = 0; j < k; ++j) cm.at(i, j) = static_cast<std::uint64_t>(parse_double(cells[j + 1], path));
  }
  return cm;
}

void write_predictions_csv(std::span<const PredictionRecord> predictions, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "epoch_index,true_label,predicted_label";
  for (std::size_t c = 0; c < kNumClasses; ++c) out << ",score_" << c;
  out << '\n';
  for (const auto& p : predictions) {
    out << p.epoch_index << ',' << label_code(p.truth) << ',' << label_code(p.prediction.label);
    for (double s : p.prediction.scores) out << ',' << exact(s);
    out << '\n';
  }
  finish(out, path);
}

void emit_comparison_report(std::span<const ReportRow> rows, const BaselineTable& baselines,
                            const std::filesystem::path& out_dir) {
  if (rows.empty()) throw Error(ErrorCode::EmptyDataset, "no results to report");
  std::filesystem::create_directories(out_dir);

  std::map<std::string, Average> by_model;
  for (const auto& r : rows) {
    auto& a = by_model[r.model];
    a.accuracy += r.accuracy;
    a.recall += r.recall;
    a.specificity += r.specificity;
    a.f1 += r.f1;
    ++a.n;
  }
  for (auto& [_, a] : by_model) {
    const double n = static_cast<double>(a.n);
    a.accuracy /= n;
    a.recall /= n;
    a.specificity /= n;
    a.f1 /= n;
  }
  const auto ours_label = [&](const std::string& model) {
    return by_model.size() == 1 ? std::string("Ours") : "Ours (" + model + ")";
  };

  {
    const auto path = out_dir / "comparison.csv";
    auto out = open_out(path);
    out << "approach,accuracy,recall,specificity,f1\n";
    for (const auto& b : baselines.rows)
      out << b.label << ',' << format_metric(b.accuracy) << ',' << optional_metric(b.recall) << ','
          << optional_metric(b.specificity) << ',' << optional_metric(b.f1) << '\n';
    for (const auto& [model, a] : by_model)
      out << ours_label(model) << ',' << format_metric(a.accuracy) << ',' << format_metric(a.recall) << ','
          << format_metric(a.specificity) << ',' << format_metric(a.f1) << '\n';
    finish(out, path);
  }
  {
    const auto path = out_dir / "per_subject_accuracy.csv";
    auto out = open_out(path);
    out << "subject,model,accuracy\n";
    for (const auto& r : rows) out << r.subject_id << ',' << r.model << ',' << exact(r.accuracy) << '\n';
    finish(out, path);
  }
  {
    const auto path = out_dir / "comparison.md";
    auto out = open_out(path);
    out << "# Motor imagery classification results\n\n";
    out << "Subjects evaluated: " << rows.size() << ".\n\n";
    out << "## Average performance\n\n";
    out << "| Approach | Accuracy | Recall | Specificity | F1 |\n";
    out << "|---|---|---|---|---|\n";
    for (const auto& b : baselines.rows)
      out << "| " << b.label << " | " << format_metric(b.accuracy) << " | " << optional_metric(b.recall) << " | "
          << optional_metric(b.specificity) << " | " << optional_metric(b.f1) << " |\n";
    for (const auto& [model, a] : by_model)
      out << "| " << ours_label(model) << " | " << format_metric(a.accuracy) << " | " << format_metric(a.recall)
          << " | " << format_metric(a.specificity) << " | " << format_metric(a.f1) << " |\n";
    out << "\n## Per-subject results\n\n";
    out << "| Subject | Model | Accuracy | Recall | Specificity | F1 | Flagged classes |\n";
    out << "|---|---|---|---|---|---|---|\n";
    for (const auto& r : rows)
      out << "| " << r.subject_id << " | " << r.model << " | " << format_metric(r.accuracy) << " | "
          << format_metric(r.recall) << " | " << format_metric(r.specificity) << " | " << format_metric(r.f1) << " | "
          << flags_text(r.flagged_classes) << " |\n";
    finish(out, path);
  }
}

}  // namespace mieeg
