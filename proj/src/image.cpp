#include "rua/image.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "rua/errors.hpp"

namespace rua {
namespace {

std::uint8_t clamp_u8(double v) {
  if (v <= 0.0) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(v);
}

double round_half_up(double v) { return std::floor(v + 0.5); }

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw DomainError("image dimensions must be positive, got " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

Image::Image(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  samples_.assign(static_cast<std::size_t>(width) * height * kChannels, 0);
}

Image::Image(int width, int height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  check_dims(width, height);
  const std::size_t expected = static_cast<std::size_t>(width) * height * kChannels;
  if (samples_.size() != expected) {
    throw DomainError("sample buffer has " + std::to_string(samples_.size()) +
                      " bytes, expected " + std::to_string(expected));
  }
}

AffineMap AffineMap::rotation(double degrees, double cx, double cy) {
  const double rad = degrees * M_PI / 180.0;
  const double cosv = std::cos(rad);
  const double sinv = std::sin(rad);
  AffineMap m;
  m.a = cosv;
  m.b = -sinv;
  m.c = cx - cosv * cx + sinv * cy;
  m.d = sinv;
  m.e = cosv;
  m.f = cy - sinv * cx - cosv * cy;
  return m;
}

AffineMap AffineMap::shear_x(double coef) {
  AffineMap m;
  m.b = coef;
  return m;
}

AffineMap AffineMap::shear_y(double coef) {
  AffineMap m;
  m.d = coef;
  return m;
}

AffineMap AffineMap::translation(double dx, double dy) {
  AffineMap m;
  m.c = -dx;
  m.f = -dy;
  return m;
}

namespace {

// Binary PPM header scanner: skips whitespace and '#' comments, then reads a
// non-negative decimal integer.
struct HeaderScanner {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  bool at_end() const { return pos >= bytes.size(); }

  void skip_space_and_comments() {
    while (!at_end()) {
      const char ch = static_cast<char>(bytes[pos]);
      if (ch == '#') {
        while (!at_end() && bytes[pos] != '\n') ++pos;
      } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n' || ch == '\f' ||
                 ch == '\v') {
        ++pos;
      } else {
        break;
      }
    }
  }

  long read_int(const char* field) {
    skip_space_and_comments();
    if (at_end() || bytes[pos] < '0' || bytes[pos] > '9') {
      throw BadHeader(std::string("expected integer for ") + field);
    }
    long value = 0;
    while (!at_end() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 1'000'000'000L) throw BadHeader(std::string(field) + " out of range");
      ++pos;
    }
    return value;
  }
};

}  // namespace

Image decode_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw BadMagic("not a binary PPM (missing P6 magic)");
  }
  HeaderScanner scan{bytes, 2};
  const long width = scan.read_int("width");
  const long height = scan.read_int("height");
  const long maxval = scan.read_int("maxval");
  if (width <= 0 || height <= 0) throw BadHeader("non-positive dimensions");
  if (maxval != 255) throw BadHeader("maxval must be 255, got " + std::to_string(maxval));
  // Exactly one whitespace byte separates the header from the payload.
  if (scan.at_end()) throw Truncated("missing payload");
  const char sep = static_cast<char>(bytes[scan.pos]);
  if (sep != ' ' && sep != '\t' && sep != '\r' && sep != '\n') {
    throw BadHeader("missing whitespace after maxval");
  }
  ++scan.pos;

  const std::size_t payload = static_cast<std::size_t>(width) * height * Image::kChannels;
  if (bytes.size() - scan.pos < payload) {
    throw Truncated("payload has " + std::to_string(bytes.size() - scan.pos) +
                    " bytes, expected " + std::to_string(payload));
  }
  std::vector<std::uint8_t> samples(bytes.begin() + scan.pos,
                                    bytes.begin() + scan.pos + payload);
  return Image(static_cast<int>(width), static_cast<int>(height), std::move(samples));
}

std::vector<std::uint8_t> encode_ppm(const Image& img) {
  const std::string header = "P6\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out;
  out.reserve(header.size() + img.sample_count());
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), img.samples().begin(), img.samples().end());
  return out;
}

Image load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed on " + path.string());
  return decode_ppm(bytes);
}

void save_ppm(const Image& img, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_ppm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed on " + path.string());
}

namespace {

// One source tap; out-of-range coordinates take the fill value.
inline double tap(const Image& img, int x, int y, int ch, std::uint8_t fill) {
  if (x < 0 || x >= img.width() || y < 0 || y >= img.height()) return fill;
  return img.at(x, y, ch);
}

}  // namespace

Image warp_affine(const Image& img, const AffineMap& map) {
  Image out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double sx = map.a * x + map.b * y + map.c;
      const double sy = map.d * x + map.e * y + map.f;
      if (map.interpolation == Interpolation::kNearest) {
        const int ix = static_cast<int>(std::floor(sx + 0.5));
        const int iy = static_cast<int>(std::floor(sy + 0.5));
        for (int ch = 0; ch < Image::kChannels; ++ch) {
          out.at(x, y, ch) = static_cast<std::uint8_t>(tap(img, ix, iy, ch, map.fill));
        }
      } else {
        const double fx = std::floor(sx);
        const double fy = std::floor(sy);
        const int x0 = static_cast<int>(fx);
        const int y0 = static_cast<int>(fy);
        const double wx = sx - fx;
        const double wy = sy - fy;
        for (int ch = 0; ch < Image::kChannels; ++ch) {
          const double v00 = tap(img, x0, y0, ch, map.fill);
          const double v10 = tap(img, x0 + 1, y0, ch, map.fill);
          const double v01 = tap(img, x0, y0 + 1, ch, map.fill);
          const double v11 = tap(img, x0 + 1, y0 + 1, ch, map.fill);
          const double v = v00 * (1 - wx) * (1 - wy) + v10 * wx * (1 - wy) +
                           v01 * (1 - wx) * wy + v11 * wx * wy;
          out.at(x, y, ch) = clamp_u8(round_half_up(v));
        }
      }
    }
  }
  return out;
}

Image blend_enhance(const Image& original, const Image& degenerate, double factor) {
  if (original.width() != degenerate.width() ||
      original.height() != degenerate.height()) {
    throw DimensionMismatch("blend inputs differ in size");
  }
  if (factor == 1.0) return original;
  if (factor == 0.0) return degenerate;
  Image out(original.width(), original.height());
  const std::size_t n = original.sample_count();
  auto src = original.samples();
  auto deg = degenerate.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = deg[i] + factor * (static_cast<double>(src[i]) - deg[i]);
    dst[i] = clamp_u8(round_half_up(v));
  }
  return out;
}

Image apply_lut(const Image& img, const LutSet& luts) {
  Image out(img.width(), img.height());
  const std::size_t n = img.sample_count();
  auto src = img.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < n; ++i) {
    dst[i] = luts[i % Image::kChannels][src[i]];
  }
  return out;
}

}  // namespace rua
