#include <doctest.h>

#include <cmath>

#include "../support.hpp"

using namespace extruplan;
using testing_support::codec;
using testing_support::heat_sink_profile;

namespace {

// Column of `value` in a uniform segment, computed without the codec.
std::size_t uniform_column(std::size_t start, double lo, double width, double value) {
  return start + static_cast<std::size_t>(std::floor((value - lo) / width));
}

std::vector<Interval> thickness_bins() {
  std::vector<Interval> bins;
  for (int i = 0; i < 10; ++i) bins.push_back({0.5 * i, 0.5 * (i + 1)});
  return bins;
}

DieDesign case_study_design() {
  DieDesign d;
  d.die_type = DieType::Hollow;
  d.num_orifices = 1;
  d.extrusion_ratio = 40.0;
  d.parts = {{DiePartKind::Mandrel, 55.0, {}}, {DiePartKind::DieCap, 45.0, {}}};
  return d;
}

DieDesign solid_design() {
  DieDesign d;
  d.die_type = DieType::Solid;
  d.num_orifices = 1;
  d.extrusion_ratio = 80.0;
  d.parts = {{DiePartKind::Feeder, 25.0, {}}, {DiePartKind::DiePlate, 35.0, {}}, {DiePartKind::Backer, 45.0, {}}};
  return d;
}

std::vector<std::size_t> active(const OutputVector& v) {
  std::vector<std::size_t> out;
  for (std::size_t c = 1; c <= kOutputNodes; ++c)
    if (v.at(c)) out.push_back(c);
  return out;
}

}  // namespace

TEST_SUITE("codec") {

TEST_CASE("bin lookup") {
  const auto bins = thickness_bins();
  CHECK(bin_lookup(2.3, bins) == 4);
  CHECK(bin_lookup(0.5, bins) == 1);
  CHECK(bin_lookup(0.0, bins) == 0);
  CHECK(bin_lookup(4.999, bins) == 9);
  CHECK_THROWS_AS(bin_lookup(5.0, bins), BinOutOfRange);
  CHECK_THROWS_AS(bin_lookup(-0.1, bins), BinOutOfRange);
}

TEST_CASE("shipped layout covers 170 and 93 columns") {
  const auto& cfg = codec();
  CHECK(cfg.problems().empty());
  std::size_t next = 1;
  for (const auto& s : cfg.input_segments) {
    CHECK(s.start == next);
    next += s.length;
  }
  CHECK(next == kInputNodes + 1);
  next = 1;
  for (const auto& s : cfg.output_segments) {
    CHECK(s.start == next);
    next += s.length;
  }
  CHECK(next == kOutputNodes + 1);
  CHECK(cfg.output(segment::kFeatureGroups).start == 84);
  CHECK(cfg.output(segment::kProcessRoutes).start == 89);
}

TEST_CASE("heat-sink profile encodes as solid with shape columns clear") {
  const InputVector x = encode_profile(heat_sink_profile(), codec());
  CHECK(x.at(1) == 1);
  for (std::size_t c = 2; c <= 8; ++c) CHECK(x.at(c) == 0);
  CHECK(x.popcount() == 9);
  CHECK(x.at(uniform_column(24, 0.0, 0.5, 2.3)) == 1);
  CHECK(x.at(uniform_column(34, 0.0, 10.0, 24.0)) == 1);
  CHECK(x.at(uniform_column(49, 0.0, 10.0, 15.3)) == 1);
  CHECK(x.at(uniform_column(64, 0.0, 10.0, 28.5)) == 1);
  CHECK(x.at(uniform_column(79, 0.0, 1.0, 1.7)) == 1);
  CHECK(x.at(uniform_column(127, 0.0, 5.0, 20.32)) == 1);
  CHECK(x.at(uniform_column(159, 0.0, 1.0, 4.0)) == 1);
}

TEST_CASE("case-study profile encodes as hollow with one external-perimeter node") {
  const InputVector x = encode_profile(case_study_profile(), codec());
  CHECK(x.at(3) == 1);
  CHECK(x.at(1) == 0);
  CHECK(x.active_in(142, 17) == 1);
  CHECK(x.at(uniform_column(142, 0.0, 5.0, 19.24)) == 1);
}

TEST_CASE("population count equals the number of present attributes") {
  ProfileSpec full = heat_sink_profile();
  full.press_capacity = PressCapacity::T880;
  full.extrusion_ratio = 42.0;
  full.external_perimeter = 12.0;
  CHECK(encode_profile(full, codec()).popcount() == 12);

  ProfileSpec sparse = full;
  sparse.ccd.reset();
  sparse.extrusion_ratio.reset();
  sparse.external_perimeter = 0.0;
  CHECK(encode_profile(sparse, codec()).popcount() == 9);
}

TEST_CASE("out-of-range thickness names the segment") {
  ProfileSpec p = heat_sink_profile();
  p.wall_thickness = 99.0;
  try {
    encode_profile(p, codec());
    FAIL("expected BinOutOfRange");
  } catch (const BinOutOfRange& e) {
    CHECK(e.segment() == "thickness");
    CHECK(e.value() == 99.0);
  }
}

TEST_CASE("unknown shape and invalid profiles are rejected") {
  ProfileSpec p = heat_sink_profile();
  p.shape_class = 20;
  CHECK_THROWS_AS(encode_profile(p, codec()), UnknownShape);
  p = heat_sink_profile();
  p.width = 0.0;
  CHECK_THROWS_AS(encode_profile(p, codec()), InvalidInput);
}

TEST_CASE("case-study design encoding") {
  const OutputVector y = encode_design(case_study_design(), codec());
  CHECK(y.at(3) == 1);
  CHECK(y.at(4) == 1);
  CHECK(y.active_in(19, 15) == 1);
  CHECK(y.at(uniform_column(19, 5.0, 10.0, 40.0)) == 1);
  CHECK(y.at(87) == 1);
  CHECK(y.at(88) == 1);
  CHECK(y.at(92) == 1);
  CHECK(y.at(93) == 1);
  for (std::size_t c = 84; c <= 86; ++c) CHECK(y.at(c) == 0);
  for (std::size_t c = 89; c <= 91; ++c) CHECK(y.at(c) == 0);
  CHECK(y.active_in(34, 30) == 0);
  CHECK(y.active_in(64, 10) == 1);
  CHECK(y.active_in(74, 10) == 1);
  CHECK(y.popcount() == 9);
}

TEST_CASE("solid design encoding") {
  const OutputVector y = encode_design(solid_design(), codec());
  CHECK(y.at(1) == 1);
  CHECK(active(y) == std::vector<std::size_t>{1, 4, uniform_column(19, 5.0, 10.0, 80.0), 34 + 0, 44 + 1, 54 + 2, 84,
                                              85, 86, 89, 90, 91});
  CHECK(y.active_in(64, 20) == 0);
}

TEST_CASE("twenty orifices is out of range") {
  DieDesign d = case_study_design();
  d.num_orifices = 20;
  try {
    encode_design(d, codec());
    FAIL("expected BinOutOfRange");
  } catch (const BinOutOfRange& e) {
    CHECK(e.segment() == "num_orifices");
    CHECK(e.value() == 20.0);
  }
}

TEST_CASE("case-study design decodes back") {
  const DecodedDesign d = decode_output(encode_design(case_study_design(), codec()), codec());
  CHECK(d.die_type == DieType::Hollow);
  CHECK(d.num_orifices == 1);
  CHECK(d.extrusion_ratio == 40.0);
  REQUIRE(d.parts.size() == 2);
  CHECK(d.parts[0].kind == DiePartKind::Mandrel);
  CHECK(d.parts[0].thickness == 55.0);
  CHECK(d.parts[1].kind == DiePartKind::DieCap);
  CHECK(d.routes == std::vector<DiePartKind>{DiePartKind::Mandrel, DiePartKind::DieCap});
  CHECK(d.skeleton().parts.size() == 2);
}

TEST_CASE("ambiguous die type") {
  OutputVector zero;
  CHECK_THROWS_AS(decode_output(zero, codec()), AmbiguousSegment);
  const auto diags = validate_output(zero, codec());
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].kind == DiagnosticKind::AmbiguousSegment);
  CHECK(diags[0].segment == "die_type");

  OutputVector two = encode_design(case_study_design(), codec());
  two.set(1);
  try {
    decode_output(two, codec());
    FAIL("expected AmbiguousSegment");
  } catch (const AmbiguousSegment& e) {
    CHECK(e.segment() == "die_type");
  }
}

TEST_CASE("validate_output") {
  const OutputVector good = encode_design(case_study_design(), codec());
  CHECK(validate_output(good, codec()).empty());

  OutputVector bad = good;
  bad.set(89);  // feeder route on a hollow die
  const auto diags = validate_output(bad, codec());
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].kind == DiagnosticKind::InconsistentParts);
  CHECK_THROWS_AS(decode_output(bad, codec()), InconsistentParts);

  OutputVector no_orifice = good;
  no_orifice.set(4, false);
  const auto d2 = validate_output(no_orifice, codec());
  REQUIRE(d2.size() == 1);
  CHECK(d2[0].segment == "num_orifices");

  OutputVector missing_thickness = good;
  for (std::size_t c = 64; c <= 73; ++c) missing_thickness.set(c, false);
  const auto d3 = validate_output(missing_thickness, codec());
  REQUIRE(d3.size() == 1);
  CHECK(d3[0].kind == DiagnosticKind::AmbiguousSegment);
  CHECK(d3[0].segment == "thickness_mandrel");
}

TEST_CASE("decode round trip over generated designs") {
  const auto& cfg = codec();
  for (const auto& rec : generate_synthetic_cases(150, 7, cfg, testing_support::kb())) {
    const DieDesign& d = rec.design;
    const DecodedDesign back = decode_output(encode_design(d, cfg), cfg);
    CHECK(back.die_type == d.die_type);
    CHECK(back.num_orifices == d.num_orifices);
    REQUIRE(back.parts.size() == d.parts.size());
    const auto& er = cfg.output(segment::kExtrusionRatio);
    CHECK(std::abs(back.extrusion_ratio - d.extrusion_ratio) < er.bins.intervals[0].width());
    for (std::size_t i = 0; i < d.parts.size(); ++i) {
      CHECK(back.parts[i].kind == d.parts[i].kind);
      CHECK(std::abs(back.parts[i].thickness - d.parts[i].thickness) < 10.0);
    }
  }
}

TEST_CASE("vector JSON") {
  const OutputVector y = encode_design(case_study_design(), codec());
  const Json j = vector_to_json(y);
  CHECK(j.size() == 93);
  CHECK(vector_from_json<kOutputNodes>(j) == y);
  CHECK_THROWS_AS(vector_from_json<kInputNodes>(j), SchemaMismatch);
}

TEST_CASE("config round trips through JSON") {
  const EncodingConfig back = EncodingConfig::from_json(codec().to_json());
  CHECK(back.codec_version == codec().codec_version);
  CHECK(back.shape_catalog == codec().shape_catalog);
  REQUIRE(back.input_segments.size() == codec().input_segments.size());
  for (std::size_t i = 0; i < back.input_segments.size(); ++i)
    CHECK(back.input_segments[i].bins.intervals == codec().input_segments[i].bins.intervals);
}

TEST_CASE("config errors collect every problem") {
  Json j = testing_support::codec_json();
  j["input_segments"][3]["length"] = 14;
  j["codec_version"] = "";
  try {
    EncodingConfig::from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() >= 3);
  }
}

}  // TEST_SUITE
