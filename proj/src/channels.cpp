#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "mieeg/ingestion.hpp"

namespace mieeg {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

const std::vector<std::string>& default_motor_channels() {
  static const std::vector<std::string> names{"FC3", "FC4", "C1", "C2", "C3", "C4", "Cz", "CP3", "CP4", "CPz"};
  return names;
}

const std::vector<std::string>& biosemi64_channels() {
  static const std::vector<std::string> names{
      "Fp1", "AF7", "AF3", "F1",  "F3",  "F5",  "F7",  "FT7", "FC5", "FC3", "FC1", "C1",  "C3",
      "C5",  "T7",  "TP7", "CP5", "CP3", "CP1", "P1",  "P3",  "P5",  "P7",  "P9",  "PO7", "PO3",
      "O1",  "Iz",  "Oz",  "POz", "Pz",  "CPz", "Fpz", "Fp2", "AF8", "AF4", "AFz", "Fz",  "F2",
      "F4",  "F6",  "F8",  "FT8", "FC6", "FC4", "FC2", "FCz", "Cz",  "C2",  "C4",  "C6",  "T8",
      "TP8", "CP6", "CP4", "CP2", "P2",  "P4",  "P6",  "P8",  "P10", "PO8", "PO4", "O2"};
  return names;
}

Hemisphere hemisphere_of(std::string_view name) {
  if (name.empty()) return Hemisphere::Midline;
  const char last = static_cast<char>(std::tolower(static_cast<unsigned char>(name.back())));
  if (last == 'z') return Hemisphere::Midline;
  if (!std::isdigit(static_cast<unsigned char>(last))) return Hemisphere::Midline;
  return ((last - '0') % 2 == 1) ? Hemisphere::Left : Hemisphere::Right;
}

ChannelSelection::ChannelSelection(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() != kSelectionSize)
    throw Error(ErrorCode::InvalidArgument, "channel selection needs exactly " + std::to_string(kSelectionSize) +
                                                " names, got " + std::to_string(names_.size()));
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw Error(ErrorCode::InvalidArgument, "empty channel name in selection");
    if (!seen.insert(lowercase(n)).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate channel '" + n + "' in selection");
  }
}

std::vector<std::size_t> ChannelSelection::resolve(const std::vector<std::string>& channel_table) const {
  std::vector<std::size_t> idx;
  idx.reserve(names_.size());
  for (const auto& want : names_) {
    const std::string key = lowercase(want);
    auto it = std::find_if(channel_table.begin(), channel_table.end(),
                           [&](const std::string& have) { return lowercase(have) == key; });
    if (it == channel_table.end()) throw Error(ErrorCode::UnknownChannel, want);
    idx.push_back(static_cast<std::size_t>(it - channel_table.begin()));
  }
  return idx;
}

SubjectDataset select_channels(const SubjectDataset& dataset, const ChannelSelection& selection) {
  const auto table = dataset.channel_names();
  if (dataset.empty()) return dataset;
  const auto idx = selection.resolve(table);

  std::vector<std::string> names;
  names.reserve(idx.size());
  for (std::size_t i : idx) names.push_back(table[i]);

  std::vector<Epoch> out;
  out.reserve(dataset.size());
  for (const Epoch& e : dataset.epochs()) {
    std::vector<double> data;
    data.reserve(idx.size() * e.n_samples());
    for (std::size_t i : idx) {
      auto row = e.channel(i);
      data.insert(data.end(), row.begin(), row.end());
    }
    out.push_back(e.with_data(names, std::move(data)));
  }
  return SubjectDataset(dataset.subject_id(), std::move(out), dataset.provenance());
}

}  // namespace mieeg
