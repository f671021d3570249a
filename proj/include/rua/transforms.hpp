#pragma once

#include <string>

#include "rua/image.hpp"
#include "rua/rng.hpp"

namespace rua {

/// The 14 augmentations. The enumeration order is fixed and is part of the
/// reproducibility contract: seeded kind selection indexes into this order.
enum class TransformKind : int {
  kIdentity = 0,
  kAutoContrast,
  kEqualize,
  kRotate,
  kSolarize,
  kPosterize,
  kColor,
  kContrast,
  kBrightness,
  kSharpness,
  kShearX,
  kShearY,
  kTranslateX,
  kTranslateY,
};

inline constexpr int kTransformKindCount = 14;

const char* to_string(TransformKind kind);
TransformKind transform_kind_from_string(const std::string& name);  // DomainError

/// Ablation switches for the parameter schedule.
///   aligned:  distortion grows from zero with r (vs. the legacy direction,
///             where the starred ops are strongest at r = 0).
///   random:   draw uniformly over the reachable interval (vs. collapsing to
///             the interval endpoints).
///   expanded: use the widened intensity caps (vs. the legacy caps).
/// (1,1,1) is the full method; (0,0,0) reproduces the legacy parameterization
/// under the single-intensity reduction.
struct AugmentMode {
  bool aligned = true;
  bool random = true;
  bool expanded = true;

  static AugmentMode rua() { return {true, true, true}; }
  static AugmentMode ra() { return {false, false, false}; }

  bool operator==(const AugmentMode&) const = default;
};

/// A fully resolved transform instance. `magnitude` semantics per kind:
/// degrees (Rotate), threshold in [0, 256] (Solarize), integer bit-shift
/// count (Posterize), blend factor (Color/Contrast/Brightness/Sharpness),
/// shear coefficient (ShearX/Y), pixel offset (TranslateX/Y); unused for
/// Identity/AutoContrast/Equalize.
struct TransformParams {
  TransformKind kind = TransformKind::kIdentity;
  double magnitude = 0.0;

  bool operator==(const TransformParams&) const = default;
};

/// Draws the magnitude for `kind` at intensity r under `mode`. Every call
/// consumes exactly two draws from `rng` (sign/position draw first, then
/// magnitude draw) regardless of kind or mode, so downstream draws stay
/// aligned across modes. Translate offsets are resolved against the image
/// dimensions, which is why they are parameters here. Throws DomainError if
/// r is outside [0, 1].
TransformParams sample_params(TransformKind kind, double r, const AugmentMode& mode,
                              RandomStream& rng, int width, int height);

/// Applies a resolved transform. Exact-identity parameters (degree 0,
/// shift 0, factor 1, offset 0, threshold >= 256) return the input
/// pixel-exactly.
Image apply_transform(const TransformParams& params, const Image& img);

/// Per channel: maps [min, max] linearly onto [0, 255] (identity table when
/// the channel is constant).
LutSet autocontrast_luts(const Image& img);

/// Per channel: histogram-equalization tables. Tables are monotone
/// non-decreasing; degenerate histograms (<= 1 occupied bin, or a
/// cumulative step of zero) yield the identity table.
LutSet equalize_luts(const Image& img);

/// The zero-sharpness reference: interior pixels smoothed by the 3x3 kernel
/// [[1,1,1],[1,5,1],[1,1,1]] / 13 (rounded half-up), border pixels copied.
Image sharpness_degenerate(const Image& img);

}  // namespace rua
