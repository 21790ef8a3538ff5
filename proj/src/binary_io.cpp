#include "binary_io.hpp"

#include <fstream>
#include <iterator>
#include <limits>

namespace mieeg::detail {

void ByteWriter::str16(std::string_view s) {
  if (s.size() > std::numeric_limits<std::uint16_t>::max())
    throw Error(ErrorCode::InvalidArgument, "string longer than 65535 bytes");
  u16(static_cast<std::uint16_t>(s.size()));
  bytes(s);
}

void ByteReader::require(std::size_t n, const char* what) const {
  if (remaining() < n)
    throw Error(ErrorCode::TruncatedPayload, std::string("file ends inside ") + what + " at byte " +
                                                 std::to_string(pos_) + " (need " + std::to_string(n) +
                                                 ", have " + std::to_string(remaining()) + ")");
}

std::string ByteReader::bytes(std::size_t n) {
  require(n, "byte string");
  std::string s(buf_.begin() + static_cast<std::ptrdiff_t>(pos_),
                buf_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
  pos_ += n;
  return s;
}

std::string ByteReader::str16() {
  const std::uint16_t n = u16();
  return bytes(n);
}

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read error on " + path.string());
  return data;
}

void write_file(const std::filesystem::path& path, const std::vector<char>& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write error on " + path.string());
}

}  // namespace mieeg::detail
