#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace arcoord {

/// Linear depth, larger = farther; metric depth = value * scale.
/// A value of 0 in a virtual depth map means "no virtual content".
struct DepthMap {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  double scale = 0.001;  // meters per unit
  std::vector<std::uint16_t> values;  // row-major

  DepthMap() = default;
  DepthMap(std::uint32_t w, std::uint32_t h, double meters_per_unit);

  std::uint16_t& at(std::uint32_t x, std::uint32_t y) { return values[std::size_t{y} * width + x]; }
  std::uint16_t at(std::uint32_t x, std::uint32_t y) const { return values[std::size_t{y} * width + x]; }
  void validate() const;
};

/// 8-bit RGB, row-major, 3 bytes per pixel.
struct RgbImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(std::uint32_t w, std::uint32_t h);
  void validate() const;
  bool operator==(const RgbImage&) const = default;
};

/// true = virtual pixel visible.
struct OcclusionMask {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<bool> bits;

  bool at(std::uint32_t x, std::uint32_t y) const { return bits[std::size_t{y} * width + x]; }
  bool operator==(const OcclusionMask&) const = default;
};

/// Virtual content wins where it is present and no farther than the real
/// surface (ties render virtual). Throws DimensionMismatch.
OcclusionMask occlusion_mask(const DepthMap& real, const DepthMap& virtual_depth);

/// Picks virtual_color where the mask is set, background elsewhere.
/// Throws DimensionMismatch.
RgbImage composite(const RgbImage& background, const RgbImage& virtual_color, const OcclusionMask& mask);

// Files: 8-byte magic, u32 width, u32 height, f64 scale (little endian),
// then raw samples (u16 LE for depth, RGB bytes for images, whose scale
// field is written as 1.0).
inline constexpr char kDepthMagic[8] = {'A', 'R', 'C', 'D', 'E', 'P', 'T', 'H'};
inline constexpr char kImageMagic[8] = {'A', 'R', 'C', 'R', 'G', 'B', '8', '\0'};

void write_depth_map(const std::filesystem::path& path, const DepthMap& map);
DepthMap read_depth_map(const std::filesystem::path& path);
void write_rgb_image(const std::filesystem::path& path, const RgbImage& image);
RgbImage read_rgb_image(const std::filesystem::path& path);

}  // namespace arcoord
