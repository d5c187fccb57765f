#include "arcoord/occlusion.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "arcoord/error.hpp"

namespace arcoord {

namespace {

static_assert(std::endian::native == std::endian::little, "file IO assumes a little-endian host");

struct Header {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  double scale = 0.0;
};

void write_header(std::ofstream& out, const char (&magic)[8], const Header& h) {
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(&h.width), sizeof(h.width));
  out.write(reinterpret_cast<const char*>(&h.height), sizeof(h.height));
  out.write(reinterpret_cast<const char*>(&h.scale), sizeof(h.scale));
}

Header read_header(std::ifstream& in, const char (&magic)[8], const std::filesystem::path& path) {
  char got[8] = {};
  in.read(got, 8);
  if (!in || std::memcmp(got, magic, 8) != 0) throw Error(ErrorCode::Io, path.string() + ": bad magic");
  Header h;
  in.read(reinterpret_cast<char*>(&h.width), sizeof(h.width));
  in.read(reinterpret_cast<char*>(&h.height), sizeof(h.height));
  in.read(reinterpret_cast<char*>(&h.scale), sizeof(h.scale));
  if (!in) throw Error(ErrorCode::Io, path.string() + ": truncated header");
  return h;
}

void expect_eof(std::ifstream& in, const std::filesystem::path& path) {
  if (!in) throw Error(ErrorCode::Io, path.string() + ": truncated samples");
  if (in.peek() != std::char_traits<char>::eof()) throw Error(ErrorCode::Io, path.string() + ": trailing bytes");
}

}  // namespace

DepthMap::DepthMap(std::uint32_t w, std::uint32_t h, double meters_per_unit)
    : width(w), height(h), scale(meters_per_unit), values(std::size_t{w} * h, 0) {}

void DepthMap::validate() const {
  if (values.size() != std::size_t{width} * height) {
    throw Error(ErrorCode::DimensionMismatch, "depth map holds " + std::to_string(values.size()) + " samples for " +
                                                  std::to_string(width) + "x" + std::to_string(height));
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorCode::InvalidArgument, "depth scale must be positive");
}

RgbImage::RgbImage(std::uint32_t w, std::uint32_t h) : width(w), height(h), data(std::size_t{w} * h * 3, 0) {}

void RgbImage::validate() const {
  if (data.size() != std::size_t{width} * height * 3) {
    throw Error(ErrorCode::DimensionMismatch, "image buffer does not match its dimensions");
  }
}

OcclusionMask occlusion_mask(const DepthMap& real, const DepthMap& virtual_depth) {
  real.validate();
  virtual_depth.validate();
  if (real.width != virtual_depth.width || real.height != virtual_depth.height) {
    throw Error(ErrorCode::DimensionMismatch, "real and virtual depth maps differ in size");
  }
  OcclusionMask mask{real.width, real.height, std::vector<bool>(real.values.size(), false)};
  for (std::size_t i = 0; i < real.values.size(); ++i) {
    const std::uint16_t v = virtual_depth.values[i];
    mask.bits[i] = v != 0 && v * virtual_depth.scale <= real.values[i] * real.scale;
  }
  return mask;
}

RgbImage composite(const RgbImage& background, const RgbImage& virtual_color, const OcclusionMask& mask) {
  background.validate();
  virtual_color.validate();
  if (background.width != virtual_color.width || background.height != virtual_color.height ||
      background.width != mask.width || background.height != mask.height ||
      mask.bits.size() != std::size_t{mask.width} * mask.height) {
    throw Error(ErrorCode::DimensionMismatch, "composite inputs differ in size");
  }
  RgbImage out = background;
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    if (!mask.bits[i]) continue;
    std::memcpy(&out.data[3 * i], &virtual_color.data[3 * i], 3);
  }
  return out;
}

void write_depth_map(const std::filesystem::path& path, const DepthMap& map) {
  map.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_header(out, kDepthMagic, {map.width, map.height, map.scale});
  out.write(reinterpret_cast<const char*>(map.values.data()),
            static_cast<std::streamsize>(map.values.size() * sizeof(std::uint16_t)));
}

DepthMap read_depth_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  const Header h = read_header(in, kDepthMagic, path);
  DepthMap map(h.width, h.height, h.scale);
  in.read(reinterpret_cast<char*>(map.values.data()),
          static_cast<std::streamsize>(map.values.size() * sizeof(std::uint16_t)));
  expect_eof(in, path);
  map.validate();
  return map;
}

void write_rgb_image(const std::filesystem::path& path, const RgbImage& image) {
  image.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_header(out, kImageMagic, {image.width, image.height, 1.0});
  out.write(reinterpret_cast<const char*>(image.data.data()), static_cast<std::streamsize>(image.data.size()));
}

RgbImage read_rgb_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  const Header h = read_header(in, kImageMagic, path);
  RgbImage image(h.width, h.height);
  in.read(reinterpret_cast<char*>(image.data.data()), static_cast<std::streamsize>(image.data.size()));
  expect_eof(in, path);
  return image;
}

}  // namespace arcoord
