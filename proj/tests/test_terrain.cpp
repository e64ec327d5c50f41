#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "curriwalk/terrain.hpp"

using namespace curriwalk::terrain;

namespace {

constexpr TerrainKind kAllKinds[] = {TerrainKind::kFlat, TerrainKind::kGaps,
                                     TerrainKind::kHurdles, TerrainKind::kStairs};
constexpr TerrainKind kArtifactKinds[] = {TerrainKind::kGaps, TerrainKind::kHurdles,
                                          TerrainKind::kStairs};

int count_gaps(const Heightfield& hf) {
  int n = 0;
  for (const Segment& s : hf.segments) n += s.is_gap ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("difficulty endpoints are exact") {
  CHECK(dimension_for(TerrainKind::kHurdles, 1.0) == 0.13);
  CHECK(dimension_for(TerrainKind::kHurdles, 10.0) == 0.38);
  CHECK(dimension_for(TerrainKind::kGaps, 1.0) == 0.10);
  CHECK(dimension_for(TerrainKind::kGaps, 10.0) == 1.00);
  CHECK(dimension_for(TerrainKind::kStairs, 1.0) == 0.017);
  CHECK(dimension_for(TerrainKind::kStairs, 10.0) == 0.17);
  CHECK(dimension_for(TerrainKind::kFlat, 7.0) == 0.0);
}

TEST_CASE("difficulty schedule is a monotone line extended past 10") {
  for (const TerrainKind kind : kArtifactKinds) {
    const double p1 = dimension_for(kind, 1.0);
    const double p10 = dimension_for(kind, 10.0);
    // Two-point line through the endpoints, written from the far end.
    const auto line = [&](double d) { return p10 - (p10 - p1) * (10.0 - d) / 9.0; };
    double previous = -1.0;
    for (double d = 1.0; d <= 12.0; d += 0.25) {
      const double p = dimension_for(kind, d);
      CHECK(p >= previous);
      CHECK(p == doctest::Approx(line(d)).epsilon(1e-12));
      previous = p;
    }
  }
  CHECK(dimension_for(TerrainKind::kGaps, 12.0) == doctest::Approx(1.20).epsilon(1e-12));
  CHECK(dimension_for(TerrainKind::kGaps, 8.0) == doctest::Approx(0.80).epsilon(1e-12));
  CHECK_THROWS_AS(dimension_for(TerrainKind::kGaps, 0.5), std::out_of_range);
  CHECK_THROWS_AS(dimension_for(TerrainKind::kGaps, 12.5), std::out_of_range);
}

TEST_CASE("flat course is a single gap-free segment") {
  const Heightfield hf = generate({TerrainKind::kFlat, 1.0, kEvalInstances, 9});
  REQUIRE(hf.segments.size() == 1);
  CHECK_FALSE(hf.segments[0].is_gap);
  CHECK(hf.segments[0].height == 0.0);
  CHECK(hf.segments[0].x_end == hf.total_length);
  hf.check_invariants();
}

TEST_CASE("seven maximal gap instances are each one metre long") {
  const Heightfield hf = generate({TerrainKind::kGaps, 10.0, kEvalInstances, 4});
  CHECK(count_gaps(hf) == 7);
  for (const Segment& s : hf.segments) {
    if (s.is_gap) CHECK(s.x_end - s.x_start == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("hurdles and stairs have the scheduled dimensions") {
  const Heightfield hurdles = generate({TerrainKind::kHurdles, 10.0, kTrainInstances, 2});
  int raised = 0;
  for (const Segment& s : hurdles.segments) {
    if (s.height > 0.0) {
      ++raised;
      CHECK(s.height == doctest::Approx(0.38));
      CHECK(s.x_end - s.x_start == doctest::Approx(0.06));
    }
  }
  CHECK(raised == 2);

  const double rise = dimension_for(TerrainKind::kStairs, 4.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Heightfield stairs = generate({TerrainKind::kStairs, 4.0, kTrainInstances, seed});
    // Every segment after the start zone begins with one riser. The landing
    // merges into the top stair, so a long segment closes a flight.
    int risers = 0;
    int flight = 0;
    int flights = 0;
    for (std::size_t i = 1; i < stairs.segments.size(); ++i) {
      const Segment& seg = stairs.segments[i];
      CHECK(seg.height - stairs.segments[i - 1].height == doctest::Approx(rise).epsilon(1e-9));
      ++risers;
      ++flight;
      if (seg.x_end - seg.x_start > 0.28 + 1e-9) {
        CHECK(flight >= 5);
        CHECK(flight <= 8);
        ++flights;
        flight = 0;
      }
    }
    CHECK(flight == 0);
    CHECK(flights == 2);
    CHECK(risers >= 10);
    CHECK(risers <= 16);
  }
}

TEST_CASE("generated courses satisfy the heightfield invariants") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint64_t seed = rng();
    for (const TerrainKind kind : kAllKinds) {
      for (int d = 1; d <= 12; ++d) {
        const int instances = (trial % 2 == 0) ? kTrainInstances : kEvalInstances;
        const Heightfield hf = generate({kind, static_cast<double>(d), instances, seed});
        CHECK_NOTHROW(hf.check_invariants());
        CHECK(hf.finish_x == hf.total_length);
        if (kind == TerrainKind::kGaps) CHECK(count_gaps(hf) == instances);
      }
    }
  }
}

TEST_CASE("generation is deterministic in the seed") {
  for (const TerrainKind kind : kAllKinds) {
    const TerrainSpec spec{kind, 6.5, kEvalInstances, 123456789};
    const Heightfield a = generate(spec);
    const Heightfield b = generate(spec);
    REQUIRE(a.segments.size() == b.segments.size());
    for (std::size_t i = 0; i < a.segments.size(); ++i) {
      CHECK(a.segments[i].x_start == b.segments[i].x_start);
      CHECK(a.segments[i].x_end == b.segments[i].x_end);
      CHECK(a.segments[i].height == b.segments[i].height);
      CHECK(a.segments[i].is_gap == b.segments[i].is_gap);
    }
  }
  const Heightfield a = generate({TerrainKind::kGaps, 5.0, kEvalInstances, 1});
  const Heightfield b = generate({TerrainKind::kGaps, 5.0, kEvalInstances, 2});
  CHECK(a.total_length != b.total_length);
}

TEST_CASE("height lookup conventions") {
  const Heightfield hf = generate({TerrainKind::kGaps, 10.0, kTrainInstances, 5});
  CHECK(hf.height_at(1.0).height == 0.0);
  CHECK_FALSE(hf.height_at(1.0).is_gap);
  const Segment* gap = nullptr;
  for (const Segment& s : hf.segments) {
    if (s.is_gap) {
      gap = &s;
      break;
    }
  }
  REQUIRE(gap != nullptr);
  const HeightSample inside = hf.height_at(0.5 * (gap->x_start + gap->x_end));
  CHECK(inside.is_gap);
  CHECK(inside.height == -2.0);
  CHECK(hf.support_height(0.5 * (gap->x_start + gap->x_end)) == 0.0);
  // A boundary point belongs to the downstream segment.
  CHECK(hf.height_at(gap->x_start).is_gap);
  CHECK_FALSE(hf.height_at(gap->x_end).is_gap);
  // Outside the course clamps to the end segments.
  CHECK(hf.height_at(-5.0).height == 0.0);
  CHECK(hf.height_at(hf.total_length + 5.0).height == hf.segments.back().height);

  const Heightfield stairs = generate({TerrainKind::kStairs, 10.0, kTrainInstances, 5});
  for (std::size_t i = 1; i < stairs.segments.size(); ++i) {
    const double x = stairs.segments[i].x_start;
    CHECK(stairs.height_at(x).height == stairs.segments[i].height);
  }
}

TEST_CASE("scan normalisation and clamping") {
  const Heightfield flat = generate({TerrainKind::kFlat, 1.0, kTrainInstances, 0});
  const Scan s = scan(flat, 1.0, 0.9);
  CHECK(s.size() == 24);
  for (const double v : s) CHECK(v == doctest::Approx((0.9 - 0.25) / 1.75).epsilon(1e-15));
  for (const double v : scan(flat, 1.0, 0.1)) CHECK(v == 0.0);
  for (const double v : scan(flat, 1.0, 3.0)) CHECK(v == 1.0);

  const Heightfield gaps = generate({TerrainKind::kGaps, 10.0, kTrainInstances, 3});
  const Segment* gap = nullptr;
  for (const Segment& seg : gaps.segments) {
    if (seg.is_gap) {
      gap = &seg;
      break;
    }
  }
  REQUIRE(gap != nullptr);
  const double base_x = gap->x_start - 0.25;
  const Scan over = scan(gaps, base_x, 0.9);
  for (int k = 0; k < kScanSamples; ++k) {
    const double x = base_x + 0.25 + 1.75 * k / 23.0;
    if (gaps.height_at(x).is_gap) {
      CHECK(over[k] == 1.0);
    } else {
      CHECK(over[k] == doctest::Approx((0.9 - 0.25) / 1.75));
    }
  }

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-2.0, 40.0), uz(-3.0, 4.0);
  const Heightfield stairs = generate({TerrainKind::kStairs, 12.0, kEvalInstances, 8});
  for (int i = 0; i < 10000; ++i) {
    for (const double v : scan(stairs, ux(rng), uz(rng))) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("kind names round trip") {
  for (const TerrainKind kind : kAllKinds) CHECK(parse_kind(to_string(kind)) == kind);
  CHECK_FALSE(parse_kind("steps").has_value());
  CHECK_FALSE(parse_kind("Flat").has_value());
}
