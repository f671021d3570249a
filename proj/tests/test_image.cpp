#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "rua/errors.hpp"
#include "rua/image.hpp"
#include "test_util.hpp"

using namespace rua;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) {
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

Image gray2x2(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
  // Row-major: a b / c d, replicated across the three channels.
  return Image(2, 2, {a, a, a, b, b, b, c, c, c, d, d, d});
}

}  // namespace

TEST_CASE("image construction validates dimensions and buffer size") {
  CHECK_THROWS_AS(Image(0, 4), DomainError);
  CHECK_THROWS_AS(Image(4, -1), DomainError);
  CHECK_THROWS_AS(Image(2, 2, std::vector<std::uint8_t>(11)), DomainError);
  const Image img(3, 2);
  CHECK(img.sample_count() == 18);
  for (auto s : img.samples()) CHECK(s == 0);
}

TEST_CASE("ppm encode/decode round-trips bit-exactly") {
  const Image img = testutil::random_image(13, 7, 99);
  const auto encoded = encode_ppm(img);
  CHECK(decode_ppm(encoded) == img);
  CHECK(encode_ppm(decode_ppm(encoded)) == encoded);
}

TEST_CASE("ppm header is canonical") {
  const Image img(2, 3);
  const auto encoded = encode_ppm(img);
  const std::string header(encoded.begin(), encoded.begin() + 11);
  CHECK(header == "P6\n2 3\n255\n");
  CHECK(encoded.size() == 11 + 18);
}

TEST_CASE("ppm decoder accepts comments and flexible whitespace") {
  std::string head = "P6 # inline comment\n# full line\n 2\t1 #dims\n255\n";
  auto data = bytes_of(head);
  for (int i = 0; i < 6; ++i) data.push_back(static_cast<std::uint8_t>(i * 10));
  const Image img = decode_ppm(data);
  CHECK(img.width() == 2);
  CHECK(img.height() == 1);
  CHECK(img.at(1, 0, 2) == 50);
}

TEST_CASE("ppm decoder rejects bad input precisely") {
  CHECK_THROWS_AS(decode_ppm(bytes_of("P5\n2 2\n255\n")), BadMagic);
  CHECK_THROWS_AS(decode_ppm(bytes_of("")), BadMagic);
  CHECK_THROWS_AS(decode_ppm(bytes_of("P6\n0 2\n255\n")), BadHeader);
  CHECK_THROWS_AS(decode_ppm(bytes_of("P6\n2 2\n65535\n")), BadHeader);
  CHECK_THROWS_AS(decode_ppm(bytes_of("P6\nx 2\n255\n")), BadHeader);
  std::string short_payload = "P6\n2 2\n255\n";
  short_payload.append(11, '\0');  // needs 12
  CHECK_THROWS_AS(decode_ppm(bytes_of(short_payload)), Truncated);
}

TEST_CASE("load/save round-trips through the filesystem") {
  testutil::TempDir dir;
  const Image img = testutil::random_image(5, 5, 1);
  const auto path = dir / "img.ppm";
  save_ppm(img, path);
  CHECK(load_ppm(path) == img);
  CHECK_THROWS_AS(load_ppm(dir / "missing.ppm"), IoError);
}

TEST_CASE("identity warp copies the image") {
  const Image img = testutil::random_image(9, 4, 2);
  CHECK(warp_affine(img, AffineMap::identity()) == img);
}

TEST_CASE("quarter rotation permutes a 2x2 image exactly") {
  const Image img = gray2x2(10, 20, 30, 40);  // a b / c d
  const AffineMap map = AffineMap::rotation(90.0, 0.5, 0.5);
  const Image out = warp_affine(img, map);
  // Content turns counter-clockwise: b d / a c.
  CHECK(out.at(0, 0, 0) == 20);
  CHECK(out.at(1, 0, 0) == 40);
  CHECK(out.at(0, 1, 0) == 10);
  CHECK(out.at(1, 1, 0) == 30);
}

TEST_CASE("four quarter turns restore the image") {
  const Image img = testutil::random_image(8, 8, 3);
  Image cur = img;
  const double cx = (img.width() - 1) / 2.0;
  const double cy = (img.height() - 1) / 2.0;
  for (int i = 0; i < 4; ++i) {
    cur = warp_affine(cur, AffineMap::rotation(90.0, cx, cy));
  }
  CHECK(cur == img);
}

TEST_CASE("integer translation shifts content and fills the gap") {
  const Image img = gray2x2(10, 20, 30, 40);
  Image out = warp_affine(img, AffineMap::translation(1.0, 0.0));
  CHECK(out.at(0, 0, 0) == 128);  // default fill
  CHECK(out.at(1, 0, 0) == 10);
  CHECK(out.at(0, 1, 0) == 128);
  CHECK(out.at(1, 1, 0) == 30);

  AffineMap custom = AffineMap::translation(0.0, -1.0);
  custom.fill = 7;
  out = warp_affine(img, custom);
  CHECK(out.at(0, 0, 0) == 30);  // row below moves up
  CHECK(out.at(0, 1, 0) == 7);
}

TEST_CASE("bilinear taps round half-up and blend with the fill") {
  const Image img(2, 1, {10, 10, 10, 15, 15, 15});
  const Image out = warp_affine(img, AffineMap::translation(-0.5, 0.0));
  CHECK(out.at(0, 0, 0) == 13);  // (10 + 15) / 2 = 12.5
  CHECK(out.at(1, 0, 0) == 72);  // (15 + 128) / 2 = 71.5
}

TEST_CASE("nearest interpolation picks the closest source pixel") {
  const Image img(2, 1, {10, 10, 10, 15, 15, 15});
  AffineMap map = AffineMap::translation(-0.5, 0.0);
  map.interpolation = Interpolation::kNearest;
  const Image out = warp_affine(img, map);
  CHECK(out.at(0, 0, 0) == 15);  // source x = 0.5 resolves upward
}

TEST_CASE("horizontal shear leans on the row index") {
  const Image img = gray2x2(10, 20, 30, 40);
  const Image out = warp_affine(img, AffineMap::shear_x(1.0));
  // Row 0 samples source x + 0; row 1 samples source x + 1.
  CHECK(out.at(0, 0, 0) == 10);
  CHECK(out.at(1, 0, 0) == 20);
  CHECK(out.at(0, 1, 0) == 40);
  CHECK(out.at(1, 1, 0) == 128);
}

TEST_CASE("blend_enhance endpoints are exact and midpoints round") {
  const Image a = testutil::random_image(6, 6, 4);
  const Image b = testutil::random_image(6, 6, 5);
  CHECK(blend_enhance(a, b, 1.0) == a);
  CHECK(blend_enhance(a, b, 0.0) == b);

  const Image src(1, 1, {100, 100, 100});
  const Image deg(1, 1, {80, 80, 80});
  CHECK(blend_enhance(src, deg, 1.5).at(0, 0, 0) == 110);  // 80 + 1.5*20
  CHECK(blend_enhance(src, deg, 0.5).at(0, 0, 0) == 90);
  CHECK(blend_enhance(src, deg, 10.0).at(0, 0, 0) == 255);   // clamped
  CHECK(blend_enhance(src, deg, -10.0).at(0, 0, 0) == 0);    // clamped
  CHECK_THROWS_AS(blend_enhance(a, Image(5, 6), 0.5), DimensionMismatch);
}

TEST_CASE("apply_lut maps per channel") {
  LutSet luts;
  for (int v = 0; v < 256; ++v) {
    luts[0][v] = static_cast<std::uint8_t>(255 - v);
    luts[1][v] = static_cast<std::uint8_t>(v);
    luts[2][v] = 0;
  }
  const Image img(1, 1, {1, 2, 3});
  const Image out = apply_lut(img, luts);
  CHECK(out.at(0, 0, 0) == 254);
  CHECK(out.at(0, 0, 1) == 2);
  CHECK(out.at(0, 0, 2) == 0);
}
