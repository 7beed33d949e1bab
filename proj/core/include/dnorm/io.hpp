#pragma once

// File formats.
//
//  depth  pgm16  binary PGM (P5), big-endian 16-bit samples (8-bit when
//                maxval < 256), depth = sample * scale meters, 0 = invalid
//         raw64  "DNRAW64D", u64 rows, u64 cols, rows*cols f64 meters
//         csv    one image row per line, comma-separated decimal meters;
//                empty cells, 0 and nan are invalid
//  normals       color: binary PPM (P6), channel = round(255 (c + 1) / 2),
//                invalid pixels black
//                raw: "DNRAW64N", u64 rows, u64 cols, u64 flags
//                (bit 0 normalized, bit 1 oriented), rows*cols*3 f64, then
//                rows*cols validity bytes
//  masks         binary PBM (P4), set pixels white (bit 0), cleared black
//                raw: "DNRAW64M", u64 rows, u64 cols, rows*cols bytes (0/1)
//  angle images  binary PGM (P5, maxval 255), value = round(255 angle / 2pi),
//                invalid pixels 0
//
// Every raw64 integer and float is little-endian. Readers report malformed
// input as ParseError with the failing byte offset; they never read past the
// end of a truncated buffer.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "dnorm/core.hpp"
#include "dnorm/metrics.hpp"

namespace dnorm {

inline constexpr double kDefaultDepthScale = 0.001;

enum class DepthFormat { kPgm16, kRaw64, kCsv };

const char* depth_format_name(DepthFormat f) noexcept;
DepthFormat parse_depth_format(std::string_view name);
/// .pgm -> pgm16, .csv -> csv, anything else -> raw64.
DepthFormat infer_depth_format(const std::filesystem::path& path);

// In-memory codecs. Byte buffers are std::string.
std::string encode_depth(const DepthMap& depth, DepthFormat format,
                         double scale = kDefaultDepthScale);
DepthMap decode_depth(std::string_view bytes, DepthFormat format,
                      double scale = kDefaultDepthScale);

std::string encode_normals_raw(const NormalMap& normals);
NormalMap decode_normals_raw(std::string_view bytes);
std::string encode_normals_color(const NormalMap& normals);

std::string encode_mask_raw(const PixelMask& mask);
PixelMask decode_mask_raw(std::string_view bytes);
std::string encode_mask_pbm(const PixelMask& mask);
PixelMask decode_mask_pbm(std::string_view bytes);

std::string encode_angle_image(const AngleImage& image);
/// Every pixel of the result is valid; values are sample * 2pi / 255.
AngleImage decode_angle_image(std::string_view bytes);

std::array<std::uint8_t, 3> normal_to_rgb(const Vec3& n);
std::uint8_t quantize_angle(double radians);

// File wrappers. Missing or unwritable files raise IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

DepthMap read_depth(const std::filesystem::path& path, DepthFormat format,
                    double scale = kDefaultDepthScale);
void write_depth(const DepthMap& depth, const std::filesystem::path& path, DepthFormat format,
                 double scale = kDefaultDepthScale);

enum class NormalsMode { kColor, kRaw };

/// Color mode requires a normalized map (InvalidInputError otherwise).
void write_normals(const NormalMap& normals, const std::filesystem::path& path, NormalsMode mode);
NormalMap read_normals_raw(const std::filesystem::path& path);

void write_angle_image(const AngleImage& image, const std::filesystem::path& path);
AngleImage read_angle_image(const std::filesystem::path& path);

void write_mask_pbm(const PixelMask& mask, const std::filesystem::path& path);
PixelMask read_mask_pbm(const std::filesystem::path& path);
void write_mask_raw(const PixelMask& mask, const std::filesystem::path& path);
PixelMask read_mask_raw(const std::filesystem::path& path);

/// Key-value intrinsics file: fx, fy, ox, oy required; depth_scale optional.
struct IntrinsicsFile {
  CameraIntrinsics intrinsics;
  double depth_scale = kDefaultDepthScale;
};

IntrinsicsFile parse_intrinsics(std::string_view text);
std::string format_intrinsics(const IntrinsicsFile& file);
IntrinsicsFile read_intrinsics(const std::filesystem::path& path);
void write_intrinsics(const IntrinsicsFile& file, const std::filesystem::path& path);

}  // namespace dnorm
