#include "dnorm/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "dnorm/kvtext.hpp"

namespace dnorm {

namespace {

constexpr std::string_view kDepthMagic = "DNRAW64D";
constexpr std::string_view kNormalsMagic = "DNRAW64N";
constexpr std::string_view kMaskMagic = "DNRAW64M";
constexpr std::uint64_t kMaxDim = static_cast<std::uint64_t>(std::numeric_limits<int>::max());
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

void put_f64(std::string& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }
  char peek() const { return bytes_[pos_]; }

  void require(std::uint64_t n, const char* what) const {
    if (n > remaining()) {
      throw ParseError(std::string("truncated ") + what + ": need " + std::to_string(n) +
                           " bytes, have " + std::to_string(remaining()),
                       pos_);
    }
  }

  void expect_magic(std::string_view magic, const char* what) {
    require(magic.size(), what);
    if (bytes_.substr(pos_, magic.size()) != magic) {
      throw ParseError(std::string("bad magic for ") + what, pos_);
    }
    pos_ += magic.size();
  }

  std::uint64_t u64(const char* what) {
    require(8, what);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    }
    pos_ += 8;
    return v;
  }

  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }

  std::uint8_t u8() { return static_cast<std::uint8_t>(bytes_[pos_++]); }

  std::uint16_t u16_be() {
    const auto hi = static_cast<unsigned char>(bytes_[pos_]);
    const auto lo = static_cast<unsigned char>(bytes_[pos_ + 1]);
    pos_ += 2;
    return static_cast<std::uint16_t>((hi << 8) | lo);
  }

  void skip(std::size_t n) { pos_ += n; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

struct Dims {
  int rows = 0;
  int cols = 0;
  std::size_t cells = 0;
};

// rows and cols header fields followed by a payload of cells * bytes_per_cell.
Dims read_dims(ByteReader& in, std::uint64_t bytes_per_cell, std::uint64_t extra_header = 0) {
  const std::size_t rows_at = in.offset();
  const std::uint64_t rows = in.u64("rows field");
  const std::size_t cols_at = in.offset();
  const std::uint64_t cols = in.u64("cols field");
  if (rows > kMaxDim) throw ParseError("row count overflows", rows_at);
  if (cols > kMaxDim) throw ParseError("column count overflows", cols_at);
  const std::uint64_t cells = rows * cols;  // < 2^62, no wrap
  if (cells != 0 && bytes_per_cell > std::numeric_limits<std::uint64_t>::max() / cells) {
    throw ParseError("payload size overflows", rows_at);
  }
  in.require(extra_header + cells * bytes_per_cell, "payload");
  return {static_cast<int>(rows), static_cast<int>(cols), static_cast<std::size_t>(cells)};
}

// --- netpbm ---------------------------------------------------------------

struct PnmHeader {
  int width = 0;
  int height = 0;
  unsigned maxval = 1;
};

void skip_pnm_space(ByteReader& in) {
  while (!in.at_end()) {
    const char c = in.peek();
    if (c == '#') {
      while (!in.at_end() && in.peek() != '\n') in.skip(1);
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      in.skip(1);
    } else {
      break;
    }
  }
}

std::uint64_t read_pnm_number(ByteReader& in, const char* what) {
  skip_pnm_space(in);
  const std::size_t start = in.offset();
  std::uint64_t value = 0;
  std::size_t digits = 0;
  while (!in.at_end() && std::isdigit(static_cast<unsigned char>(in.peek()))) {
    value = value * 10 + static_cast<std::uint64_t>(in.u8() - '0');
    if (++digits > 12) throw ParseError(std::string(what) + " overflows", start);
  }
  if (digits == 0) throw ParseError(std::string("expected ") + what, start);
  return value;
}

PnmHeader read_pnm_header(ByteReader& in, std::string_view magic, bool has_maxval) {
  in.expect_magic(magic, "netpbm header");
  PnmHeader h;
  const std::size_t width_at = in.offset();
  const std::uint64_t w = read_pnm_number(in, "width");
  const std::uint64_t ht = read_pnm_number(in, "height");
  if (w > kMaxDim || ht > kMaxDim) throw ParseError("image dimensions overflow", width_at);
  h.width = static_cast<int>(w);
  h.height = static_cast<int>(ht);
  if (has_maxval) {
    const std::size_t maxval_at = in.offset();
    const std::uint64_t m = read_pnm_number(in, "maxval");
    if (m == 0 || m > 65535) throw ParseError("maxval must lie in [1, 65535]", maxval_at);
    h.maxval = static_cast<unsigned>(m);
  }
  in.require(1, "netpbm header");
  if (!std::isspace(static_cast<unsigned char>(in.peek()))) {
    throw ParseError("expected whitespace after netpbm header", in.offset());
  }
  in.skip(1);
  return h;
}

std::string pnm_header(std::string_view magic, int width, int height, int maxval) {
  std::string out(magic);
  out += "\n" + std::to_string(width) + " " + std::to_string(height) + "\n";
  if (maxval > 0) out += std::to_string(maxval) + "\n";
  return out;
}

// --- depth codecs ----------------------------------------------------------

void check_scale(double scale) {
  if (!std::isfinite(scale) || scale <= 0.0) {
    throw InvalidInputError("depth scale must be finite and positive");
  }
}

std::string encode_depth_raw64(const DepthMap& depth) {
  std::string out(kDepthMagic);
  out.reserve(24 + depth.size() * 8);
  put_u64(out, static_cast<std::uint64_t>(depth.rows()));
  put_u64(out, static_cast<std::uint64_t>(depth.cols()));
  for (double d : depth.data()) put_f64(out, d);
  return out;
}

DepthMap decode_depth_raw64(std::string_view bytes) {
  ByteReader in(bytes);
  in.expect_magic(kDepthMagic, "raw64 depth");
  const Dims dims = read_dims(in, 8);
  std::vector<double> data(dims.cells);
  for (double& d : data) d = in.f64("depth sample");
  return DepthMap(dims.rows, dims.cols, std::move(data));
}

std::string encode_depth_pgm16(const DepthMap& depth, double scale) {
  check_scale(scale);
  std::string out = pnm_header("P5", depth.cols(), depth.rows(), 65535);
  out.reserve(out.size() + depth.size() * 2);
  for (double d : depth.data()) {
    const double units = std::round(d / scale);
    if (units > 65535.0) {
      throw InvalidInputError("depth " + std::to_string(d) + " m exceeds the 16-bit range at scale " +
                              std::to_string(scale));
    }
    const auto v = static_cast<std::uint16_t>(units);
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xffu));
  }
  return out;
}

DepthMap decode_depth_pgm16(std::string_view bytes, double scale) {
  check_scale(scale);
  ByteReader in(bytes);
  const PnmHeader h = read_pnm_header(in, "P5", true);
  const std::size_t cells = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
  const std::size_t bytes_per = h.maxval > 255 ? 2 : 1;
  in.require(cells * bytes_per, "pgm payload");
  std::vector<double> data(cells);
  for (double& d : data) {
    const unsigned v = bytes_per == 2 ? in.u16_be() : in.u8();
    d = static_cast<double>(v) * scale;
  }
  return DepthMap(h.height, h.width, std::move(data));
}

std::string encode_depth_csv(const DepthMap& depth) {
  std::string out;
  for (int r = 0; r < depth.rows(); ++r) {
    for (int c = 0; c < depth.cols(); ++c) {
      if (c > 0) out.push_back(',');
      out += format_double(depth.at(r, c));
    }
    out.push_back('\n');
  }
  return out;
}

DepthMap decode_depth_csv(std::string_view bytes) {
  std::vector<double> data;
  int rows = 0;
  int cols = -1;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      pos = end + 1;
      continue;
    }
    int count = 0;
    std::size_t cell_start = 0;
    while (true) {
      const std::size_t comma = line.find(',', cell_start);
      const std::string_view cell =
          line.substr(cell_start, comma == std::string_view::npos ? std::string_view::npos
                                                                   : comma - cell_start);
      const std::size_t first = cell.find_first_not_of(" \t");
      if (first == std::string_view::npos) {
        data.push_back(0.0);
      } else {
        const std::string_view text = cell.substr(first, cell.find_last_not_of(" \t") - first + 1);
        if (text == "nan" || text == "NaN") {
          data.push_back(0.0);
        } else if (const auto v = parse_double(text)) {
          data.push_back(*v);
        } else {
          throw ParseError("bad csv depth value '" + std::string(text) + "'",
                           pos + cell_start + first);
        }
      }
      ++count;
      if (comma == std::string_view::npos) break;
      cell_start = comma + 1;
    }
    if (cols < 0) {
      cols = count;
    } else if (count != cols) {
      throw ParseError("csv row " + std::to_string(rows) + " has " + std::to_string(count) +
                           " values, expected " + std::to_string(cols),
                       pos);
    }
    if (rows == std::numeric_limits<int>::max()) throw ParseError("too many csv rows", pos);
    ++rows;
    pos = end + 1;
  }
  if (rows == 0) throw ParseError("empty csv depth file", 0);
  return DepthMap(rows, cols, std::move(data));
}

}  // namespace

const char* depth_format_name(DepthFormat f) noexcept {
  switch (f) {
    case DepthFormat::kPgm16:
      return "pgm16";
    case DepthFormat::kRaw64:
      return "raw64";
    case DepthFormat::kCsv:
      return "csv";
  }
  return "unknown";
}

DepthFormat parse_depth_format(std::string_view name) {
  for (DepthFormat f : {DepthFormat::kPgm16, DepthFormat::kRaw64, DepthFormat::kCsv}) {
    if (name == depth_format_name(f)) return f;
  }
  throw InvalidInputError("unknown depth format '" + std::string(name) + "'");
}

DepthFormat infer_depth_format(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".pgm") return DepthFormat::kPgm16;
  if (ext == ".csv") return DepthFormat::kCsv;
  return DepthFormat::kRaw64;
}

std::string encode_depth(const DepthMap& depth, DepthFormat format, double scale) {
  switch (format) {
    case DepthFormat::kPgm16:
      return encode_depth_pgm16(depth, scale);
    case DepthFormat::kRaw64:
      return encode_depth_raw64(depth);
    case DepthFormat::kCsv:
      return encode_depth_csv(depth);
  }
  throw InvalidInputError("unhandled depth format");
}

DepthMap decode_depth(std::string_view bytes, DepthFormat format, double scale) {
  switch (format) {
    case DepthFormat::kPgm16:
      return decode_depth_pgm16(bytes, scale);
    case DepthFormat::kRaw64:
      return decode_depth_raw64(bytes);
    case DepthFormat::kCsv:
      return decode_depth_csv(bytes);
  }
  throw InvalidInputError("unhandled depth format");
}

std::string encode_normals_raw(const NormalMap& normals) {
  std::string out(kNormalsMagic);
  out.reserve(32 + normals.size() * 25);
  put_u64(out, static_cast<std::uint64_t>(normals.rows()));
  put_u64(out, static_cast<std::uint64_t>(normals.cols()));
  put_u64(out, (normals.normalized ? 1u : 0u) | (normals.oriented ? 2u : 0u));
  for (const Vec3& n : normals.vectors()) {
    put_f64(out, n.x());
    put_f64(out, n.y());
    put_f64(out, n.z());
  }
  for (std::uint8_t v : normals.valid_flags()) out.push_back(static_cast<char>(v));
  return out;
}

NormalMap decode_normals_raw(std::string_view bytes) {
  ByteReader in(bytes);
  in.expect_magic(kNormalsMagic, "raw64 normals");
  const Dims dims = read_dims(in, 25, 8);
  const std::size_t flags_at = in.offset();
  const std::uint64_t flags = in.u64("flags field");
  if (flags > 3) throw ParseError("unknown normal-map flags", flags_at);
  NormalMap out(dims.rows, dims.cols);
  out.normalized = (flags & 1u) != 0;
  out.oriented = (flags & 2u) != 0;
  for (Vec3& n : out.vectors()) {
    const double x = in.f64("normal");
    const double y = in.f64("normal");
    const double z = in.f64("normal");
    n = Vec3(x, y, z);
  }
  for (std::uint8_t& v : out.valid_flags()) {
    const std::size_t at = in.offset();
    v = in.u8();
    if (v > 1) throw ParseError("validity byte must be 0 or 1", at);
  }
  return out;
}

std::array<std::uint8_t, 3> normal_to_rgb(const Vec3& n) {
  std::array<std::uint8_t, 3> rgb{};
  for (int k = 0; k < 3; ++k) {
    const double v = std::round(255.0 * (n[k] + 1.0) / 2.0);
    rgb[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return rgb;
}

std::string encode_normals_color(const NormalMap& normals) {
  std::string out = pnm_header("P6", normals.cols(), normals.rows(), 255);
  out.reserve(out.size() + normals.size() * 3);
  for (std::size_t i = 0; i < normals.size(); ++i) {
    const auto rgb = normals.valid(i) ? normal_to_rgb(normals[i]) : std::array<std::uint8_t, 3>{};
    for (std::uint8_t c : rgb) out.push_back(static_cast<char>(c));
  }
  return out;
}

std::string encode_mask_raw(const PixelMask& mask) {
  std::string out(kMaskMagic);
  put_u64(out, static_cast<std::uint64_t>(mask.rows()));
  put_u64(out, static_cast<std::uint64_t>(mask.cols()));
  for (std::uint8_t b : mask.bytes()) out.push_back(static_cast<char>(b));
  return out;
}

PixelMask decode_mask_raw(std::string_view bytes) {
  ByteReader in(bytes);
  in.expect_magic(kMaskMagic, "raw64 mask");
  const Dims dims = read_dims(in, 1);
  PixelMask out(dims.rows, dims.cols);
  for (std::size_t i = 0; i < dims.cells; ++i) {
    const std::size_t at = in.offset();
    const std::uint8_t v = in.u8();
    if (v > 1) throw ParseError("mask byte must be 0 or 1", at);
    out.set(i, v == 1);
  }
  return out;
}

std::string encode_mask_pbm(const PixelMask& mask) {
  std::string out = pnm_header("P4", mask.cols(), mask.rows(), 0);
  for (int r = 0; r < mask.rows(); ++r) {
    unsigned char byte = 0;
    int bit = 0;
    for (int c = 0; c < mask.cols(); ++c) {
      if (!mask.at(r, c)) byte |= static_cast<unsigned char>(0x80u >> bit);
      if (++bit == 8) {
        out.push_back(static_cast<char>(byte));
        byte = 0;
        bit = 0;
      }
    }
    if (bit != 0) out.push_back(static_cast<char>(byte));
  }
  return out;
}

PixelMask decode_mask_pbm(std::string_view bytes) {
  ByteReader in(bytes);
  const PnmHeader h = read_pnm_header(in, "P4", false);
  const std::size_t row_bytes = (static_cast<std::size_t>(h.width) + 7) / 8;
  in.require(row_bytes * static_cast<std::size_t>(h.height), "pbm payload");
  PixelMask out(h.height, h.width);
  for (int r = 0; r < h.height; ++r) {
    unsigned char byte = 0;
    for (int c = 0; c < h.width; ++c) {
      if (c % 8 == 0) byte = in.u8();
      const bool black = (byte & (0x80u >> (c % 8))) != 0;
      out.set(r, c, !black);
    }
  }
  return out;
}

std::uint8_t quantize_angle(double radians) {
  const double v = std::round(255.0 * radians / kTwoPi);
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

std::string encode_angle_image(const AngleImage& image) {
  std::string out = pnm_header("P5", image.cols, image.rows, 255);
  out.reserve(out.size() + image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    out.push_back(static_cast<char>(image.valid[i] ? quantize_angle(image.values[i]) : 0));
  }
  return out;
}

AngleImage decode_angle_image(std::string_view bytes) {
  ByteReader in(bytes);
  const PnmHeader h = read_pnm_header(in, "P5", true);
  if (h.maxval > 255) throw ParseError("angle images are 8-bit", 0);
  const std::size_t cells = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
  in.require(cells, "pgm payload");
  AngleImage img;
  img.rows = h.height;
  img.cols = h.width;
  img.values.resize(cells);
  img.valid.assign(cells, 1);
  for (double& v : img.values) v = static_cast<double>(in.u8()) * kTwoPi / 255.0;
  return img;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

DepthMap read_depth(const std::filesystem::path& path, DepthFormat format, double scale) {
  return decode_depth(read_file(path), format, scale);
}

void write_depth(const DepthMap& depth, const std::filesystem::path& path, DepthFormat format,
                 double scale) {
  write_file(path, encode_depth(depth, format, scale));
}

void write_normals(const NormalMap& normals, const std::filesystem::path& path, NormalsMode mode) {
  if (mode == NormalsMode::kColor) {
    if (!normals.normalized) throw InvalidInputError("color export needs a normalized normal map");
    write_file(path, encode_normals_color(normals));
  } else {
    write_file(path, encode_normals_raw(normals));
  }
}

NormalMap read_normals_raw(const std::filesystem::path& path) {
  return decode_normals_raw(read_file(path));
}

void write_angle_image(const AngleImage& image, const std::filesystem::path& path) {
  write_file(path, encode_angle_image(image));
}

AngleImage read_angle_image(const std::filesystem::path& path) {
  return decode_angle_image(read_file(path));
}

void write_mask_pbm(const PixelMask& mask, const std::filesystem::path& path) {
  write_file(path, encode_mask_pbm(mask));
}

PixelMask read_mask_pbm(const std::filesystem::path& path) {
  return decode_mask_pbm(read_file(path));
}

void write_mask_raw(const PixelMask& mask, const std::filesystem::path& path) {
  write_file(path, encode_mask_raw(mask));
}

PixelMask read_mask_raw(const std::filesystem::path& path) {
  return decode_mask_raw(read_file(path));
}

IntrinsicsFile parse_intrinsics(std::string_view text) {
  const KeyValues kv = parse_key_value_text(text);
  IntrinsicsFile f;
  f.intrinsics.fx = kv.get_double("fx");
  f.intrinsics.fy = kv.get_double("fy");
  f.intrinsics.ox = kv.get_double("ox");
  f.intrinsics.oy = kv.get_double("oy");
  if (const auto s = kv.find_double("depth_scale")) f.depth_scale = *s;
  f.intrinsics.validate();
  check_scale(f.depth_scale);
  return f;
}

std::string format_intrinsics(const IntrinsicsFile& file) {
  return "fx = " + format_double(file.intrinsics.fx) + "\n" +
         "fy = " + format_double(file.intrinsics.fy) + "\n" +
         "ox = " + format_double(file.intrinsics.ox) + "\n" +
         "oy = " + format_double(file.intrinsics.oy) + "\n" +
         "depth_scale = " + format_double(file.depth_scale) + "\n";
}

IntrinsicsFile read_intrinsics(const std::filesystem::path& path) {
  return parse_intrinsics(read_file(path));
}

void write_intrinsics(const IntrinsicsFile& file, const std::filesystem::path& path) {
  write_file(path, format_intrinsics(file));
}

}  // namespace dnorm
