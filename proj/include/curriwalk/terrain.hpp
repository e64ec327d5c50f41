#pragma once

// Procedural terrain courses: a flat start zone followed by `instance_count`
// artifacts (a gap, a hurdle, or a flight of 5-8 stairs), each followed by a
// flat inter-artifact zone. Ground is piecewise constant in x.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace curriwalk::terrain {

enum class TerrainKind { kFlat, kGaps, kHurdles, kStairs };

std::string_view to_string(TerrainKind kind);
// Accepts "flat", "gaps", "hurdles", "stairs" (case-sensitive).
std::optional<TerrainKind> parse_kind(std::string_view name);

inline constexpr double kMinDifficulty = 1.0;
inline constexpr double kMaxDifficulty = 12.0;
inline constexpr int kTrainInstances = 2;
inline constexpr int kEvalInstances = 7;

struct TerrainSpec {
  TerrainKind kind = TerrainKind::kFlat;
  double difficulty = 1.0;
  int instance_count = kTrainInstances;
  std::uint64_t seed = 0;
};

// Geometry that the difficulty schedule does not control.
struct TerrainLayout {
  double start_zone = 3.0;
  double spacing = 1.5;
  double spacing_jitter = 0.25;
  double hurdle_width = 0.06;
  double stair_run = 0.28;
  int min_stairs = 5;
  int max_stairs = 8;
  double gap_floor_depth = 2.0;

  void validate() const;
};

struct Segment {
  double x_start = 0.0;
  double x_end = 0.0;
  double height = 0.0;  // surface height; for gaps the rim height
  bool is_gap = false;
};

struct HeightSample {
  double height = 0.0;
  bool is_gap = false;
};

struct Heightfield {
  std::vector<Segment> segments;
  double total_length = 0.0;
  double start_zone = 0.0;
  double finish_x = 0.0;
  double gap_floor_depth = 2.0;

  // Piecewise lookup; x outside the course clamps to the nearest segment and
  // a boundary point belongs to the downstream segment. Gaps report the
  // floor, `gap_floor_depth` below the rim.
  HeightSample height_at(double x) const;
  // Walkable reference height: gaps report their rim instead of the floor.
  double support_height(double x) const;
  // Throws std::logic_error if the segment invariants do not hold.
  void check_invariants() const;
};

// Linear difficulty schedule p(d) = p1 + (p10 - p1) (d - 1) / 9, extrapolated
// above 10. Hurdles: height, Gaps: length, Stairs: riser height, Flat: 0.
double dimension_for(TerrainKind kind, double difficulty);

Heightfield generate(const TerrainSpec& spec, const TerrainLayout& layout = {});

inline constexpr int kScanSamples = 24;
inline constexpr double kScanNear = 0.25;
inline constexpr double kScanFar = 2.0;

using Scan = std::array<double, kScanSamples>;

// Ground clearance ahead of the base, sampled at kScanSamples offsets evenly
// spaced over [kScanNear, kScanFar], clamped to the same range and mapped to
// [0, 1].
Scan scan(const Heightfield& hf, double base_x, double base_z);

}  // namespace curriwalk::terrain
