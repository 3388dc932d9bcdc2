#include "pelflow/image_io.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include <fmt/format.h>

namespace pelflow {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

std::vector<unsigned char> read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(fmt::format("read failure on '{}'", path.string()));
  return bytes;
}

void write_all(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError(fmt::format("write failure on '{}'", path.string()));
}

class HeaderReader {
public:
  HeaderReader(const std::vector<unsigned char>& bytes, const fs::path& path) : bytes_(bytes), path_(path) {}

  // Skips whitespace and '#' comments up to the next token.
  void skip_space() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint(const char* field) {
    skip_space();
    if (pos_ >= bytes_.size()) throw ParseError(fmt::format("{}: missing {} in PGM header", path_.string(), field));
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      ++pos_;
      if (++digits > 9) throw ParseError(fmt::format("{}: {} out of range in PGM header", path_.string(), field));
    }
    if (digits == 0 || (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]))) {
      throw ParseError(fmt::format("{}: malformed {} in PGM header", path_.string(), field));
    }
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

private:
  const std::vector<unsigned char>& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_f32_le(std::string& out, double v) { put_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

}  // namespace

Frame load_pgm(const fs::path& path) {
  const auto bytes = read_all(path);
  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw ParseError(fmt::format("{}: missing PGM magic number", path.string()));
  }
  if (bytes[1] != '5') {
    throw ParseError(fmt::format("{}: unsupported format 'P{}' (only binary grayscale P5 is accepted)", path.string(),
                                 static_cast<char>(bytes[1])));
  }
  HeaderReader reader(bytes, path);
  reader.advance(2);
  if (reader.pos() < bytes.size() && !std::isspace(bytes[reader.pos()]) && bytes[reader.pos()] != '#') {
    throw ParseError(fmt::format("{}: malformed PGM magic number", path.string()));
  }
  const long width = reader.read_uint("width");
  const long height = reader.read_uint("height");
  const long maxval = reader.read_uint("maxval");
  if (width <= 0) throw ParseError(fmt::format("{}: width must be positive", path.string()));
  if (height <= 0) throw ParseError(fmt::format("{}: height must be positive", path.string()));
  if (maxval != 255) throw ParseError(fmt::format("{}: maxval {} unsupported, expected 255", path.string(), maxval));
  // exactly one whitespace byte separates the header from the raster
  reader.advance(1);
  const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() < reader.pos() + expected) {
    throw ParseError(fmt::format("{}: truncated payload, expected {} bytes, found {}", path.string(), expected,
                                 bytes.size() > reader.pos() ? bytes.size() - reader.pos() : 0));
  }
  const auto first = bytes.begin() + static_cast<std::ptrdiff_t>(reader.pos());
  return Frame(static_cast<int>(width), static_cast<int>(height),
               std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(expected)));
}

void save_pgm(const Frame& frame, const fs::path& path) {
  std::string out = fmt::format("P5\n{} {}\n255\n", frame.width(), frame.height());
  const auto s = frame.samples();
  out.append(reinterpret_cast<const char*>(s.data()), s.size());
  write_all(path, out);
}

Sequence load_sequence(const std::vector<fs::path>& paths) {
  std::vector<Frame> frames;
  frames.reserve(paths.size());
  for (const auto& p : paths) frames.push_back(load_pgm(p));
  return Sequence(std::move(frames));
}

void save_flo(const FlowField& flow, const fs::path& path) {
  if (!flow.finite()) throw ParameterError(fmt::format("refusing to write non-finite flow to '{}'", path.string()));
  std::string out = "PIEH";
  out.reserve(12 + flow.size() * 8);
  put_u32_le(out, static_cast<std::uint32_t>(flow.width()));
  put_u32_le(out, static_cast<std::uint32_t>(flow.height()));
  const auto dx = flow.dx();
  const auto dy = flow.dy();
  for (std::size_t i = 0; i < flow.size(); ++i) {
    put_f32_le(out, dx[i]);
    put_f32_le(out, dy[i]);
  }
  write_all(path, out);
}

FlowField load_flo(const fs::path& path) {
  const auto bytes = read_all(path);
  if (bytes.size() < 12) throw ParseError(fmt::format("{}: .flo header truncated", path.string()));
  if (std::memcmp(bytes.data(), "PIEH", 4) != 0) {
    throw ParseError(fmt::format("{}: bad .flo magic tag", path.string()));
  }
  const auto width = static_cast<std::int32_t>(get_u32_le(bytes.data() + 4));
  const auto height = static_cast<std::int32_t>(get_u32_le(bytes.data() + 8));
  if (width <= 0 || height <= 0 || width > (1 << 16) || height > (1 << 16)) {
    throw ParseError(fmt::format("{}: implausible .flo size {}x{}", path.string(), width, height));
  }
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() != 12 + n * 8) {
    throw ParseError(fmt::format("{}: .flo size mismatch, header says {}x{} ({} bytes) but payload is {} bytes",
                                 path.string(), width, height, n * 8, bytes.size() - 12));
  }
  FlowField flow(width, height);
  auto dx = flow.dx();
  auto dy = flow.dy();
  const unsigned char* p = bytes.data() + 12;
  for (std::size_t i = 0; i < n; ++i, p += 8) {
    dx[i] = std::bit_cast<float>(get_u32_le(p));
    dy[i] = std::bit_cast<float>(get_u32_le(p + 4));
  }
  return flow;
}

void save_flow_csv(const FlowField& flow, const fs::path& path) {
  std::string out = "x,y,dx,dy\n";
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      const auto d = flow.at(x, y);
      out += fmt::format("{},{},{:.6f},{:.6f}\n", x, y, d.x, d.y);
    }
  }
  write_all(path, out);
}

}  // namespace pelflow
