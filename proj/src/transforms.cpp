#include "rua/transforms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "rua/errors.hpp"

namespace rua {
namespace {

constexpr std::array<const char*, kTransformKindCount> kKindNames = {
    "Identity",  "AutoContrast", "Equalize",  "Rotate",     "Solarize",
    "Posterize", "Color",        "Contrast",  "Brightness", "Sharpness",
    "ShearX",    "ShearY",       "TranslateX", "TranslateY",
};

double round_half_up(double v) { return std::floor(v + 0.5); }

std::uint8_t clamp_u8(double v) {
  if (v <= 0.0) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(v);
}

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return clamp_u8(round_half_up(0.299 * r + 0.587 * g + 0.114 * b));
}

ChannelLut identity_lut() {
  ChannelLut lut;
  for (int i = 0; i < 256; ++i) lut[i] = static_cast<std::uint8_t>(i);
  return lut;
}

}  // namespace

const char* to_string(TransformKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

TransformKind transform_kind_from_string(const std::string& name) {
  for (int i = 0; i < kTransformKindCount; ++i) {
    if (name == kKindNames[i]) return static_cast<TransformKind>(i);
  }
  throw DomainError("unknown transform kind: " + name);
}

TransformParams sample_params(TransformKind kind, double r, const AugmentMode& mode,
                              RandomStream& rng, int width, int height) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw DomainError("r must be in [0, 1]");
  }
  // Fixed draw discipline: sign/position first, magnitude second, always.
  const double u_sign = rng.next_unit();
  const double u_mag = rng.next_unit();
  const double sign = u_sign < 0.5 ? -1.0 : 1.0;
  // random=0 collapses the magnitude position to the interval's far end.
  const double pos = mode.random ? u_mag : 1.0;

  // Sign-symmetric interval [-cap*r, +cap*r]: coin for the side, position
  // for the distance.
  const auto symmetric = [&](double cap) { return sign * cap * r * pos; };

  TransformParams out{kind, 0.0};
  switch (kind) {
    case TransformKind::kIdentity:
    case TransformKind::kAutoContrast:
    case TransformKind::kEqualize:
      break;
    case TransformKind::kRotate:
      out.magnitude = symmetric(mode.expanded ? 90.0 : 30.0);
      break;
    case TransformKind::kShearX:
    case TransformKind::kShearY:
      out.magnitude = symmetric(mode.expanded ? 0.5 : 0.3);
      break;
    case TransformKind::kTranslateX:
    case TransformKind::kTranslateY: {
      const double dim = kind == TransformKind::kTranslateX ? width : height;
      // Legacy cap is 100 px, clamped to the image dimension.
      const double cap = mode.expanded ? dim / 3.0 : std::min(100.0, dim);
      out.magnitude = symmetric(cap);
      break;
    }
    case TransformKind::kSolarize:
      // aligned: threshold sweeps down from 256 (no-op) as r grows;
      // legacy direction: threshold sweeps up from 0 (full inversion).
      out.magnitude = mode.aligned ? 256.0 - 256.0 * r * pos : 256.0 * r * pos;
      break;
    case TransformKind::kPosterize: {
      const double cap = mode.expanded ? 7.0 : 4.0;
      // aligned: shift grows from 0; legacy: shift shrinks from 8 toward
      // 8 - (8 - cap)*r, so r = 0 wipes every bit.
      const double shift = mode.aligned ? cap * r * pos : 8.0 - (8.0 - cap) * r * pos;
      out.magnitude = std::clamp(round_half_up(shift), 0.0, 8.0);
      break;
    }
    case TransformKind::kColor:
    case TransformKind::kContrast:
    case TransformKind::kBrightness:
    case TransformKind::kSharpness: {
      const double half_span = 0.9;
      if (mode.aligned) {
        out.magnitude = 1.0 + sign * half_span * r * pos;  // 1 +- 0.9r
      } else {
        out.magnitude = (1.0 - half_span) + 2.0 * half_span * r * pos;  // 0.1 + 1.8r
      }
      break;
    }
  }
  return out;
}

LutSet autocontrast_luts(const Image& img) {
  LutSet luts;
  for (int ch = 0; ch < Image::kChannels; ++ch) {
    int lo = 255, hi = 0;
    auto samples = img.samples();
    for (std::size_t i = ch; i < samples.size(); i += Image::kChannels) {
      lo = std::min(lo, static_cast<int>(samples[i]));
      hi = std::max(hi, static_cast<int>(samples[i]));
    }
    if (lo >= hi) {
      luts[ch] = identity_lut();
      continue;
    }
    const double scale = 255.0 / (hi - lo);
    for (int v = 0; v < 256; ++v) {
      luts[ch][v] = clamp_u8(round_half_up((v - lo) * scale));
    }
  }
  return luts;
}

LutSet equalize_luts(const Image& img) {
  LutSet luts;
  for (int ch = 0; ch < Image::kChannels; ++ch) {
    std::array<std::uint64_t, 256> hist{};
    auto samples = img.samples();
    for (std::size_t i = ch; i < samples.size(); i += Image::kChannels) {
      ++hist[samples[i]];
    }
    std::uint64_t total = 0;
    std::uint64_t last_nonzero = 0;
    int occupied = 0;
    for (int v = 0; v < 256; ++v) {
      total += hist[v];
      if (hist[v] != 0) {
        last_nonzero = hist[v];
        ++occupied;
      }
    }
    const std::uint64_t step = occupied <= 1 ? 0 : (total - last_nonzero) / 255;
    if (step == 0) {
      luts[ch] = identity_lut();
      continue;
    }
    std::uint64_t n = step / 2;
    for (int v = 0; v < 256; ++v) {
      luts[ch][v] = static_cast<std::uint8_t>(std::min<std::uint64_t>(n / step, 255));
      n += hist[v];
    }
  }
  return luts;
}

Image sharpness_degenerate(const Image& img) {
  Image out = img;
  // 3x3 smoothing kernel, weight 5 at the center, divisor 13.
  for (int y = 1; y + 1 < img.height(); ++y) {
    for (int x = 1; x + 1 < img.width(); ++x) {
      for (int ch = 0; ch < Image::kChannels; ++ch) {
        int acc = 5 * img.at(x, y, ch);
        acc += img.at(x - 1, y - 1, ch) + img.at(x, y - 1, ch) + img.at(x + 1, y - 1, ch);
        acc += img.at(x - 1, y, ch) + img.at(x + 1, y, ch);
        acc += img.at(x - 1, y + 1, ch) + img.at(x, y + 1, ch) + img.at(x + 1, y + 1, ch);
        out.at(x, y, ch) = clamp_u8(round_half_up(acc / 13.0));
      }
    }
  }
  return out;
}

namespace {

Image color_degenerate(const Image& img) {
  Image out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const std::uint8_t l = luma(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
      out.at(x, y, 0) = l;
      out.at(x, y, 1) = l;
      out.at(x, y, 2) = l;
    }
  }
  return out;
}

Image contrast_degenerate(const Image& img) {
  std::uint64_t sum = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      sum += luma(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
    }
  }
  const std::uint64_t pixels =
      static_cast<std::uint64_t>(img.width()) * img.height();
  const std::uint8_t mean =
      clamp_u8(round_half_up(static_cast<double>(sum) / pixels));
  Image out(img.width(), img.height());
  std::fill(out.samples().begin(), out.samples().end(), mean);
  return out;
}

Image apply_solarize(const Image& img, double threshold) {
  ChannelLut lut;
  for (int v = 0; v < 256; ++v) {
    lut[v] = static_cast<std::uint8_t>(v >= threshold ? 255 - v : v);
  }
  return apply_lut(img, {lut, lut, lut});
}

Image apply_posterize(const Image& img, int shift) {
  ChannelLut lut;
  for (int v = 0; v < 256; ++v) {
    lut[v] = static_cast<std::uint8_t>(shift >= 8 ? 0 : (v >> shift) << shift);
  }
  return apply_lut(img, {lut, lut, lut});
}

}  // namespace

Image apply_transform(const TransformParams& params, const Image& img) {
  const double m = params.magnitude;
  switch (params.kind) {
    case TransformKind::kIdentity:
      return img;
    case TransformKind::kAutoContrast:
      return apply_lut(img, autocontrast_luts(img));
    case TransformKind::kEqualize:
      return apply_lut(img, equalize_luts(img));
    case TransformKind::kRotate: {
      if (m == 0.0) return img;
      const double cx = (img.width() - 1) / 2.0;
      const double cy = (img.height() - 1) / 2.0;
      return warp_affine(img, AffineMap::rotation(m, cx, cy));
    }
    case TransformKind::kSolarize:
      if (m >= 256.0) return img;
      return apply_solarize(img, m);
    case TransformKind::kPosterize: {
      const int shift = static_cast<int>(m);
      if (shift == 0) return img;
      return apply_posterize(img, shift);
    }
    case TransformKind::kColor:
      if (m == 1.0) return img;
      return blend_enhance(img, color_degenerate(img), m);
    case TransformKind::kContrast:
      if (m == 1.0) return img;
      return blend_enhance(img, contrast_degenerate(img), m);
    case TransformKind::kBrightness: {
      if (m == 1.0) return img;
      return blend_enhance(img, Image(img.width(), img.height()), m);
    }
    case TransformKind::kSharpness:
      if (m == 1.0) return img;
      return blend_enhance(img, sharpness_degenerate(img), m);
    case TransformKind::kShearX:
      if (m == 0.0) return img;
      return warp_affine(img, AffineMap::shear_x(m));
    case TransformKind::kShearY:
      if (m == 0.0) return img;
      return warp_affine(img, AffineMap::shear_y(m));
    case TransformKind::kTranslateX:
      if (m == 0.0) return img;
      return warp_affine(img, AffineMap::translation(m, 0.0));
    case TransformKind::kTranslateY:
      if (m == 0.0) return img;
      return warp_affine(img, AffineMap::translation(0.0, m));
  }
  throw DomainError("invalid transform kind");
}

}  // namespace rua
