#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace rua {

/// 8-bit RGB raster image. Samples are row-major, interleaved R,G,B.
/// Images are plain values: cheap to copy for small rasters, safe to share
/// across threads once constructed.
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  Image(int width, int height);  // zero-filled
  Image(int width, int height, std::vector<std::uint8_t> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t sample_count() const { return samples_.size(); }

  std::uint8_t at(int x, int y, int c) const {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }
  std::uint8_t& at(int x, int y, int c) {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }

  std::span<const std::uint8_t> samples() const { return samples_; }
  std::span<std::uint8_t> samples() { return samples_; }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> samples_;
};

enum class Interpolation { kNearest, kBilinear };

/// Inverse-mapping affine transform: the source location sampled for
/// destination pixel (x, y) is (a*x + b*y + c, d*x + e*y + f).
/// Source taps outside the image contribute `fill`.
struct AffineMap {
  double a = 1, b = 0, c = 0;
  double d = 0, e = 1, f = 0;
  std::uint8_t fill = 128;
  Interpolation interpolation = Interpolation::kBilinear;

  static AffineMap identity() { return {}; }
  /// Positive angle rotates image content counter-clockwise about (cx, cy).
  static AffineMap rotation(double degrees, double cx, double cy);
  /// Source x' = x + coef * y.
  static AffineMap shear_x(double coef);
  /// Source y' = y + coef * x.
  static AffineMap shear_y(double coef);
  /// Moves content by (+dx, +dy) pixels.
  static AffineMap translation(double dx, double dy);
};

/// Decodes a binary PPM (P6, maxval 255). `#` comments are allowed in the
/// header. Throws BadMagic, BadHeader, or Truncated.
Image decode_ppm(std::span<const std::uint8_t> bytes);

/// Encodes as "P6\n<w> <h>\n255\n" + raw samples. decode(encode(x)) == x
/// bit-exactly.
std::vector<std::uint8_t> encode_ppm(const Image& img);

Image load_ppm(const std::filesystem::path& path);
void save_ppm(const Image& img, const std::filesystem::path& path);

/// Warps `img` through `map`. Output has the same dimensions. Bilinear
/// weights are rounded half-up to the nearest integer sample.
Image warp_affine(const Image& img, const AffineMap& map);

/// Per sample: clamp(round(degenerate + factor * (original - degenerate))).
/// factor 1 returns `original` exactly, factor 0 returns `degenerate`
/// exactly; factors outside [0, 1] extrapolate before the final clamp.
/// Throws DimensionMismatch.
Image blend_enhance(const Image& original, const Image& degenerate, double factor);

using ChannelLut = std::array<std::uint8_t, 256>;
using LutSet = std::array<ChannelLut, Image::kChannels>;

/// out sample = luts[channel][in sample].
Image apply_lut(const Image& img, const LutSet& luts);

}  // namespace rua
