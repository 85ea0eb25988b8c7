#include "doctest.h"

#include <algorithm>
#include <random>

#include "gbmcut/metaimage.hpp"
#include "gbmcut/volume.hpp"
#include "test_support.hpp"

using namespace gbmcut;
using testing_support::read_bytes;
using testing_support::TempDir;
using testing_support::write_bytes;

namespace {

std::string header(const std::string& dims, const std::string& type, const std::string& data_file) {
  return "ObjectType = Image\nNDims = 3\nDimSize = " + dims + "\nElementSpacing = 1 1 1\nElementType = " +
         type + "\nElementByteOrderMSB = False\nElementDataFile = " + data_file + "\n";
}

Volume random_volume(std::mt19937_64& rng, Geometry g) {
  std::uniform_real_distribution<float> value(-50.0f, 250.0f);
  std::vector<float> data(g.voxel_count());
  for (auto& v : data) v = value(rng);
  return Volume(g, std::move(data));
}

}  // namespace

TEST_CASE("load_volume reads a 4x4x4 u8 volume") {
  TempDir dir;
  write_bytes(dir / "a.mhd", header("4 4 4", "MET_UCHAR", "a.raw"));
  std::string raw(64, '\0');
  for (int n = 0; n < 64; ++n) raw[n] = static_cast<char>(n);
  write_bytes(dir / "a.raw", raw);

  const Volume v = load_volume(dir / "a.mhd");
  CHECK(v.dims() == std::array<std::int64_t, 3>{4, 4, 4});
  CHECK(v.data().size() == 64);
  CHECK(v.element_kind() == ElementKind::kU8);
  CHECK(v.at(1, 0, 0) == 1.0f);
  CHECK(v.at(0, 1, 0) == 4.0f);
  CHECK(v.at(0, 0, 1) == 16.0f);
  CHECK(v.origin() == Vec3{0, 0, 0});
}

TEST_CASE("load_volume rejects a short data file") {
  TempDir dir;
  write_bytes(dir / "a.mhd", header("2 2 2", "MET_UCHAR", "a.raw"));
  write_bytes(dir / "a.raw", std::string(7, '\0'));
  CHECK_THROWS_AS(load_volume(dir / "a.mhd"), DataLengthMismatch);
}

TEST_CASE("load_volume rejects MET_DOUBLE") {
  TempDir dir;
  write_bytes(dir / "a.mhd", header("2 2 2", "MET_DOUBLE", "a.raw"));
  write_bytes(dir / "a.raw", std::string(64, '\0'));
  CHECK_THROWS_AS(load_volume(dir / "a.mhd"), UnsupportedElementType);
}

TEST_CASE("load_volume error classes are distinct") {
  TempDir dir;
  write_bytes(dir / "bad.mhd", "ObjectType = Image\nNDims = 2\n");
  CHECK_THROWS_AS(load_volume(dir / "bad.mhd"), FormatError);
  CHECK_THROWS_AS(load_volume(dir / "missing.mhd"), IoError);

  try {
    load_volume(dir / "bad.mhd");
  } catch (const UnsupportedElementType&) {
    FAIL("malformed header reported as unsupported type");
  } catch (const DataLengthMismatch&) {
    FAIL("malformed header reported as length mismatch");
  } catch (const FormatError&) {
  }
}

TEST_CASE("load_volume reads signed and float little-endian data") {
  TempDir dir;
  write_bytes(dir / "s.mhd", header("2 1 1", "MET_SHORT", "s.raw"));
  write_bytes(dir / "s.raw", std::string("\xfe\xff\x34\x12", 4));  // -2, 0x1234
  const Volume s = load_volume(dir / "s.mhd");
  CHECK(s.at(0, 0, 0) == -2.0f);
  CHECK(s.at(1, 0, 0) == 4660.0f);

  write_bytes(dir / "f.mhd", header("1 1 1", "MET_FLOAT", "f.raw"));
  write_bytes(dir / "f.raw", std::string("\x00\x00\xc0\x3f", 4));  // 1.5f
  CHECK(load_volume(dir / "f.mhd").at(0, 0, 0) == 1.5f);
}

TEST_CASE("load_volume honours Offset and spacing") {
  TempDir dir;
  write_bytes(dir / "a.mhd",
              "ObjectType = Image\nNDims = 3\nDimSize = 1 1 1\nElementSpacing = 0.5 0.5 2\n"
              "Offset = -10 5 3.25\nElementType = MET_UCHAR\nElementDataFile = a.raw\n");
  write_bytes(dir / "a.raw", std::string(1, '\x07'));
  const Volume v = load_volume(dir / "a.mhd");
  CHECK(v.spacing() == Vec3{0.5, 0.5, 2.0});
  CHECK(v.origin() == Vec3{-10, 5, 3.25});
}

TEST_CASE("save_mask writes 0x01 bytes for an all-ones mask") {
  TempDir dir;
  Geometry g;
  g.dims = {2, 2, 2};
  Mask m(g, std::vector<std::uint8_t>(8, 1));
  save_mask(m, dir / "m.mhd");
  CHECK(read_bytes(dir / "m.raw") == std::string(8, '\x01'));
  CHECK(read_bytes(dir / "m.mhd").find("ElementType = MET_UCHAR") != std::string::npos);
}

TEST_CASE("save_mask then load_volume round-trips dims, spacing and data") {
  std::mt19937_64 rng(11);
  TempDir dir;
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_int_distribution<std::int64_t> extent(1, 7);
    std::uniform_real_distribution<double> sp(0.1, 3.0);
    Geometry g;
    g.dims = {extent(rng), extent(rng), extent(rng)};
    g.spacing = {sp(rng), sp(rng), sp(rng)};
    g.origin = {sp(rng) - 1.5, sp(rng) * 7.0, -sp(rng)};
    std::bernoulli_distribution bit(0.4);
    std::vector<std::uint8_t> data(g.voxel_count());
    for (auto& b : data) b = bit(rng) ? 1 : 0;
    const Mask m(g, data);

    for (const char* name : {"m.mhd", "m.mha"}) {
      save_mask(m, dir / name);
      const Volume back = load_volume(dir / name);
      CHECK(back.geometry() == g);
      const Mask again = mask_from_volume(back);
      CHECK(again.data() == data);
    }
  }
}

TEST_CASE("save_mask rejects values other than 0 and 1") {
  Geometry g;
  g.dims = {2, 1, 1};
  CHECK_THROWS_AS(Mask(g, {0, 2}), InvalidArgument);

  Mask m(g);
  m.data()[1] = 2;
  TempDir dir;
  CHECK_THROWS_AS(save_mask(m, dir / "m.mhd"), InvalidArgument);
}

TEST_CASE("save_volume round-trips every element kind") {
  TempDir dir;
  Geometry g;
  g.dims = {3, 2, 2};
  const std::vector<std::pair<ElementKind, std::vector<float>>> cases = {
      {ElementKind::kU8, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 255}},
      {ElementKind::kI16, {-32768, -1, 0, 1, 2, 3, 4, 5, 6, 7, 8, 32767}},
      {ElementKind::kU16, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 65535}},
      {ElementKind::kF32, {-1.25f, 0.1f, 3e10f, 4, 5, 6, 7, 8, 9, 10, 11, 1e-20f}},
  };
  for (const auto& [kind, values] : cases) {
    const Volume v(g, values, kind);
    save_volume(v, dir / "v.mhd");
    const Volume back = load_volume(dir / "v.mhd");
    CHECK(back.element_kind() == kind);
    CHECK(back.data() == values);
  }
}

TEST_CASE("parse_metaimage accepts a detached raw buffer") {
  const std::string hdr = header("2 1 1", "MET_UCHAR", "whatever.raw");
  const std::string raw("\x03\x09", 2);
  const Volume v = parse_metaimage(hdr, &raw);
  CHECK(v.at(1, 0, 0) == 9.0f);

  const std::string short_raw("\x03", 1);
  try {
    parse_metaimage(hdr, &short_raw);
    FAIL("expected a length error");
  } catch (const DataLengthMismatch& e) {
    CHECK(std::string(e.what()).rfind("data length mismatch", 0) == 0);
  }
}

TEST_CASE("sample_trilinear examples") {
  Geometry g;
  g.dims = {4, 4, 4};
  const Volume constant(g, std::vector<float>(64, 100.0f));
  CHECK(constant.sample_trilinear({1.3, 2.7, 0.2}) == doctest::Approx(100.0));
  CHECK(constant.sample_trilinear({2.0, 2.0, 2.0}) == 100.0);

  Geometry line;
  line.dims = {2, 1, 1};
  const Volume ramp(line, {0.0f, 10.0f});
  CHECK(ramp.sample_trilinear({0.5, 0, 0}) == doctest::Approx(5.0));

  CHECK(constant.sample_trilinear({-10.0, 1.0, 1.0}) == 0.0);
  CHECK(constant.sample_trilinear({1.0, 13.5, 1.0}, -7.0) == -7.0);
}

TEST_CASE("sample_trilinear equals stored values at voxel centres") {
  std::mt19937_64 rng(5);
  Geometry g;
  g.dims = {5, 4, 3};
  g.spacing = {0.5, 1.25, 2.0};
  g.origin = {-3.0, 1.0, 7.5};
  const Volume v = random_volume(rng, g);
  for (std::int64_t k = 0; k < 3; ++k) {
    for (std::int64_t j = 0; j < 4; ++j) {
      for (std::int64_t i = 0; i < 5; ++i) {
        CHECK(v.sample_trilinear(v.voxel_to_world({i, j, k})) == static_cast<double>(v.at(i, j, k)));
      }
    }
  }
}

TEST_CASE("sample_trilinear stays within the surrounding 8 voxel values") {
  std::mt19937_64 rng(6);
  Geometry g;
  g.dims = {6, 6, 6};
  g.spacing = {0.7, 1.0, 1.9};
  const Volume v = random_volume(rng, g);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double ci = u(rng), cj = u(rng), ck = u(rng);
    const Vec3 p{ci * g.spacing.x, cj * g.spacing.y, ck * g.spacing.z};
    const auto i0 = static_cast<std::int64_t>(ci), j0 = static_cast<std::int64_t>(cj),
               k0 = static_cast<std::int64_t>(ck);
    float lo = v.at(i0, j0, k0), hi = lo;
    for (int c = 0; c < 8; ++c) {
      const float x = v.at(i0 + (c & 1), j0 + ((c >> 1) & 1), k0 + ((c >> 2) & 1));
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    const double s = v.sample_trilinear(p);
    CHECK(s >= lo - 1e-4);
    CHECK(s <= hi + 1e-4);
  }
}

TEST_CASE("voxel_to_world examples") {
  Geometry g;
  g.dims = {4, 4, 4};
  CHECK(g.voxel_to_world({3, 2, 1}) == Vec3{3, 2, 1});
  g.spacing = {0.5, 0.5, 2.0};
  CHECK(g.voxel_to_world({2, 2, 2}) == Vec3{1, 1, 4});
  CHECK_THROWS_AS((void)g.voxel_to_world({4, 0, 0}), OutOfBounds);
  CHECK_THROWS_AS((void)g.voxel_to_world({0, -1, 0}), OutOfBounds);
}

TEST_CASE("geometry validation") {
  Geometry g;
  g.dims = {0, 1, 1};
  CHECK_THROWS_AS(g.validate(), InvalidArgument);
  g.dims = {1, 1, 1};
  g.spacing = {1, 0, 1};
  CHECK_THROWS_AS(g.validate(), InvalidArgument);
  CHECK_THROWS_AS(Volume(Geometry{}, {1.0f, 2.0f}), DataLengthMismatch);
}
