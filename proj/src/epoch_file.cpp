#include <limits>

#include "binary_io.hpp"
#include "mieeg/ingestion.hpp"

namespace mieeg {

namespace {

template <typename T>
T checked_narrow(std::size_t v, const char* what) {
  if (v > std::numeric_limits<T>::max())
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " too large for the EPB1 header");
  return static_cast<T>(v);
}

EpochFileHeader parse_header(detail::ByteReader& in) {
  const std::string magic = in.bytes(kEpochFileMagic.size());
  if (magic != kEpochFileMagic) throw Error(ErrorCode::BadMagic, "expected \"EPB1\" file signature");

  EpochFileHeader h;
  h.version = in.u16();
  if (h.version != kEpochFileVersion)
    throw Error(ErrorCode::UnsupportedVersion, "EPB1 version " + std::to_string(h.version));
  h.subject_id = in.u16();
  h.n_epochs = in.u32();
  h.n_channels = in.u16();
  h.n_samples = in.u32();
  h.sample_rate_hz = in.f64();

  const std::uint16_t name_count = in.u16();
  if (name_count != h.n_channels)
    throw Error(ErrorCode::ShapeMismatch, "name table has " + std::to_string(name_count) + " entries for " +
                                              std::to_string(h.n_channels) + " channels");
  h.channel_names.reserve(name_count);
  for (std::uint16_t i = 0; i < name_count; ++i) h.channel_names.push_back(in.str16());

  in.require(h.n_epochs, "label array");
  h.labels.reserve(h.n_epochs);
  for (std::uint32_t i = 0; i < h.n_epochs; ++i) {
    const std::uint8_t code = in.u8();
    if (code >= kNumClasses)
      throw Error(ErrorCode::LabelOutOfRange, "epoch " + std::to_string(i) + " has label " + std::to_string(code));
    h.labels.push_back(code);
  }
  return h;
}

std::size_t payload_bytes(const EpochFileHeader& h) {
  return static_cast<std::size_t>(h.n_epochs) * h.n_channels * h.n_samples * sizeof(double);
}

}  // namespace

std::size_t EpochFileHeader::encoded_size() const {
  std::size_t n = kEpochFileMagic.size() + 2 + 2 + 4 + 2 + 4 + 8 + 2;
  for (const auto& name : channel_names) n += 2 + name.size();
  return n + labels.size();
}

std::vector<char> encode_epoch_file(const SubjectDataset& dataset) {
  if (dataset.empty())
    throw Error(ErrorCode::EmptyDataset, "refusing to write subject " + std::to_string(dataset.subject_id()) +
                                             " with no epochs");
  detail::ByteWriter out;
  const auto names = dataset.channel_names();
  out.bytes(kEpochFileMagic);
  out.u16(kEpochFileVersion);
  out.u16(checked_narrow<std::uint16_t>(static_cast<std::size_t>(dataset.subject_id()), "subject id"));
  out.u32(checked_narrow<std::uint32_t>(dataset.size(), "epoch count"));
  out.u16(checked_narrow<std::uint16_t>(names.size(), "channel count"));
  out.u32(checked_narrow<std::uint32_t>(dataset.n_samples(), "sample count"));
  out.f64(dataset.sample_rate_hz());
  out.u16(static_cast<std::uint16_t>(names.size()));
  for (const auto& name : names) out.str16(name);
  for (const Epoch& e : dataset.epochs()) out.u8(static_cast<std::uint8_t>(label_code(e.label())));
  for (const Epoch& e : dataset.epochs())
    for (double v : e.data()) out.f64(v);
  return out.buffer();
}

SubjectDataset decode_epoch_file(std::vector<char> bytes, Provenance provenance) {
  detail::ByteReader in(std::move(bytes));
  const EpochFileHeader h = parse_header(in);
  if (h.n_epochs == 0) throw Error(ErrorCode::EmptyDataset, "EPB1 file declares zero epochs");
  if (h.subject_id == 0) throw Error(ErrorCode::InvalidArgument, "EPB1 subject id 0");

  const std::size_t expected = payload_bytes(h);
  if (in.remaining() < expected)
    throw Error(ErrorCode::TruncatedPayload, "payload holds " + std::to_string(in.remaining()) +
                                                 " bytes, header declares " + std::to_string(expected));
  if (in.remaining() > expected)
    throw Error(ErrorCode::ShapeMismatch, std::to_string(in.remaining() - expected) +
                                              " trailing bytes after declared payload");

  const std::size_t per_epoch = static_cast<std::size_t>(h.n_channels) * h.n_samples;
  std::vector<Epoch> epochs;
  epochs.reserve(h.n_epochs);
  for (std::uint32_t i = 0; i < h.n_epochs; ++i) {
    std::vector<double> data(per_epoch);
    for (double& v : data) v = in.f64();
    epochs.emplace_back(h.subject_id, static_cast<ClassLabel>(h.labels[i]), h.channel_names, h.n_samples,
                        std::move(data), h.sample_rate_hz);
  }
  return SubjectDataset(h.subject_id, std::move(epochs), provenance);
}

EpochFileHeader read_epoch_header(const std::filesystem::path& path) {
  detail::ByteReader in(detail::read_file(path));
  EpochFileHeader h = parse_header(in);
  if (in.remaining() < payload_bytes(h))
    throw Error(ErrorCode::TruncatedPayload, "payload shorter than declared in header");
  return h;
}

SubjectDataset read_epoch_file(const std::filesystem::path& path, Provenance provenance) {
  try {
    return decode_epoch_file(detail::read_file(path), provenance);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

void write_epoch_file(const SubjectDataset& dataset, const std::filesystem::path& path) {
  detail::write_file(path, encode_epoch_file(dataset));
}

}  // namespace mieeg
