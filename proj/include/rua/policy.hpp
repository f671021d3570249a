#pragma once

#include <cstdint>
#include <vector>

#include "rua/transforms.hpp"

namespace rua {

/// The whole augmentation policy: one intensity knob plus bookkeeping.
/// r plays the role of both the relative magnitude and the relative count;
/// the expected number of transforms applied per image is r * n_max.
struct PolicyConfig {
  double r = 0.0;
  int n_max = 5;
  AugmentMode mode = AugmentMode::rua();
  std::uint64_t seed = 0;
};

using AppliedTrace = std::vector<TransformParams>;

/// floor(r * n_max) plus a Bernoulli extra with p equal to the fractional
/// remainder, so the expectation is exactly r * n_max. Always consumes
/// exactly one draw. Throws DomainError on r outside [0, 1] or n_max < 1.
int sample_op_count(double r, int n_max, RandomStream& rng);

/// The per-image stream: RandomStream(derive_stream_seed(seed, image_index)).
/// Exposed so callers that partition work across processes can reproduce the
/// exact per-image draws.
RandomStream make_image_stream(std::uint64_t seed, std::uint64_t image_index);

struct AugmentResult {
  Image image;
  AppliedTrace trace;
};

/// Applies the policy to one image. Fully deterministic given
/// (cfg, image_index): draw order is the count Bernoulli first, then per
/// slot a uniform kind draw (with replacement over all 14 kinds) followed by
/// sample_params' two draws.
AugmentResult augment_image(const Image& img, const PolicyConfig& cfg,
                            std::uint64_t image_index);

/// Deterministic-count variant used for throughput measurement: applies
/// exactly `count` transforms (no count draw; kind and parameter draws as in
/// augment_image).
AugmentResult augment_image_fixed_count(const Image& img, const PolicyConfig& cfg,
                                        std::uint64_t image_index, int count);

}  // namespace rua
