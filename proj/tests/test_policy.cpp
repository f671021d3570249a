#include <doctest.h>

#include <array>
#include <cmath>

#include "rua/errors.hpp"
#include "rua/policy.hpp"
#include "test_util.hpp"

using namespace rua;

TEST_CASE("op count is exact at integer products") {
  RandomStream rng(1);
  for (int i = 0; i < 200; ++i) {
    CHECK(sample_op_count(0.0, 5, rng) == 0);
    CHECK(sample_op_count(1.0, 5, rng) == 5);
    CHECK(sample_op_count(0.4, 5, rng) == 2);  // 2.0 exactly
  }
  CHECK_THROWS_AS(sample_op_count(-0.1, 5, rng), DomainError);
  CHECK_THROWS_AS(sample_op_count(1.1, 5, rng), DomainError);
  CHECK_THROWS_AS(sample_op_count(0.5, 0, rng), DomainError);
}

TEST_CASE("op count always consumes one draw") {
  RandomStream used(9);
  sample_op_count(1.0, 5, used);  // no fractional part, still one draw
  RandomStream fresh(9);
  fresh.next_u64();
  CHECK(used.next_u64() == fresh.next_u64());
}

TEST_CASE("fractional op count lands on the two adjacent integers") {
  // r * n_max = 3.14: three guaranteed, a fourth 14% of the time.
  RandomStream rng(2024);
  const int n = 20000;
  long sum = 0;
  for (int i = 0; i < n; ++i) {
    const int count = sample_op_count(0.628, 5, rng);
    REQUIRE(count >= 3);
    REQUIRE(count <= 4);
    sum += count;
  }
  const double mean = static_cast<double>(sum) / n;
  CHECK(mean > 3.13 - 0.01);
  CHECK(mean < 3.15 + 0.01);
}

TEST_CASE("augment_image is a pure function of config and index") {
  const Image img = testutil::random_image(24, 18, 4);
  PolicyConfig cfg;
  cfg.r = 0.8;
  cfg.seed = 99;
  const AugmentResult a = augment_image(img, cfg, 3);
  const AugmentResult b = augment_image(img, cfg, 3);
  CHECK(a.image == b.image);
  CHECK(a.trace == b.trace);

  const AugmentResult c = augment_image(img, cfg, 4);
  const bool differs = !(c.image == a.image) || !(c.trace == a.trace);
  CHECK(differs);
}

TEST_CASE("r = 0 applies nothing") {
  const Image img = testutil::random_image(16, 16, 5);
  PolicyConfig cfg;
  cfg.r = 0.0;
  const AugmentResult out = augment_image(img, cfg, 0);
  CHECK(out.image == img);
  CHECK(out.trace.empty());
}

TEST_CASE("r = 1 fills every slot") {
  const Image img = testutil::random_image(16, 16, 6);
  PolicyConfig cfg;
  cfg.r = 1.0;
  cfg.n_max = 5;
  for (std::uint64_t idx = 0; idx < 10; ++idx) {
    CHECK(augment_image(img, cfg, idx).trace.size() == 5);
  }
}

TEST_CASE("trace lengths stay within the adjacent pair") {
  const Image img = testutil::random_image(8, 8, 7);
  PolicyConfig cfg;
  cfg.r = 0.5;
  cfg.n_max = 5;  // 2.5 expected
  for (std::uint64_t idx = 0; idx < 300; ++idx) {
    const std::size_t len = augment_image(img, cfg, idx).trace.size();
    REQUIRE(len >= 2);
    REQUIRE(len <= 3);
  }
}

TEST_CASE("kind selection is uniform over the 14 transforms") {
  const Image img = testutil::random_image(8, 8, 3);
  PolicyConfig cfg;
  cfg.r = 0.3;
  cfg.seed = 31337;
  std::array<int, kTransformKindCount> counts{};
  const int n = 14000;
  for (int i = 0; i < n; ++i) {
    const AugmentResult out =
        augment_image_fixed_count(img, cfg, static_cast<std::uint64_t>(i), 1);
    REQUIRE(out.trace.size() == 1);
    ++counts[static_cast<int>(out.trace[0].kind)];
  }
  const double expected = static_cast<double>(n) / kTransformKindCount;
  double chi2 = 0;
  for (int c : counts) {
    const double d = c - expected;
    chi2 += d * d / expected;
  }
  // 0.999 quantile of chi-square with 13 degrees of freedom.
  CHECK(chi2 < 34.53);
}

TEST_CASE("fixed-count augmentation skips the count draw but keeps the rest") {
  const Image img = testutil::random_image(12, 12, 8);
  PolicyConfig cfg;
  cfg.r = 0.9;
  cfg.seed = 5;
  const AugmentResult fixed = augment_image_fixed_count(img, cfg, 2, 4);
  CHECK(fixed.trace.size() == 4);
  CHECK_THROWS_AS(augment_image_fixed_count(img, cfg, 2, -1), DomainError);

  const AugmentResult zero = augment_image_fixed_count(img, cfg, 2, 0);
  CHECK(zero.image == img);
  CHECK(zero.trace.empty());
}

TEST_CASE("image streams for distinct indices differ") {
  RandomStream a = make_image_stream(7, 0);
  RandomStream b = make_image_stream(7, 1);
  CHECK(a.next_u64() != b.next_u64());
  RandomStream c = make_image_stream(7, 0);
  CHECK(make_image_stream(7, 0).next_u64() == c.next_u64());
}
