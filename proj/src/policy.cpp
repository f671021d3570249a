#include "rua/policy.hpp"

#include <cmath>

#include "rua/errors.hpp"

namespace rua {

int sample_op_count(double r, int n_max, RandomStream& rng) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("r must be in [0, 1]");
  if (n_max < 1) throw DomainError("n_max must be positive");
  const double target = r * n_max;
  const double base = std::floor(target);
  const double frac = target - base;
  // One draw regardless of frac so the stream stays aligned.
  const int extra = rng.next_unit() < frac ? 1 : 0;
  return static_cast<int>(base) + extra;
}

RandomStream make_image_stream(std::uint64_t seed, std::uint64_t image_index) {
  return RandomStream(derive_stream_seed(seed, image_index));
}

namespace {

AugmentResult run_pipeline(const Image& img, const PolicyConfig& cfg,
                           RandomStream& rng, int count) {
  AugmentResult result{img, {}};
  result.trace.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto pick = rng.next_below(kTransformKindCount);
    const auto kind = static_cast<TransformKind>(pick);
    const TransformParams params = sample_params(
        kind, cfg.r, cfg.mode, rng, result.image.width(), result.image.height());
    result.image = apply_transform(params, result.image);
    result.trace.push_back(params);
  }
  return result;
}

}  // namespace

AugmentResult augment_image(const Image& img, const PolicyConfig& cfg,
                            std::uint64_t image_index) {
  RandomStream rng = make_image_stream(cfg.seed, image_index);
  const int count = sample_op_count(cfg.r, cfg.n_max, rng);
  return run_pipeline(img, cfg, rng, count);
}

AugmentResult augment_image_fixed_count(const Image& img, const PolicyConfig& cfg,
                                        std::uint64_t image_index, int count) {
  if (count < 0) throw DomainError("count must be non-negative");
  RandomStream rng = make_image_stream(cfg.seed, image_index);
  return run_pipeline(img, cfg, rng, count);
}

}  // namespace rua
