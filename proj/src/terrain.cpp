#include "curriwalk/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace curriwalk::terrain {

std::string_view to_string(TerrainKind kind) {
  switch (kind) {
    case TerrainKind::kFlat:
      return "flat";
    case TerrainKind::kGaps:
      return "gaps";
    case TerrainKind::kHurdles:
      return "hurdles";
    case TerrainKind::kStairs:
      return "stairs";
  }
  return "unknown";
}

std::optional<TerrainKind> parse_kind(std::string_view name) {
  for (auto kind : {TerrainKind::kFlat, TerrainKind::kGaps, TerrainKind::kHurdles,
                    TerrainKind::kStairs}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

void TerrainLayout::validate() const {
  const bool ok = start_zone > 0.0 && spacing > 0.0 && spacing_jitter >= 0.0 &&
                  spacing_jitter < spacing && hurdle_width > 0.0 && stair_run > 0.0 &&
                  min_stairs >= 1 && max_stairs >= min_stairs && gap_floor_depth > 0.0;
  if (!ok) throw std::invalid_argument("terrain layout: invalid geometry");
}

HeightSample Heightfield::height_at(double x) const {
  if (segments.empty()) return {};
  auto it = std::upper_bound(segments.begin(), segments.end(), x,
                             [](double v, const Segment& s) { return v < s.x_end; });
  if (it == segments.end()) it = std::prev(segments.end());
  if (it->is_gap) return {it->height - gap_floor_depth, true};
  return {it->height, false};
}

double Heightfield::support_height(double x) const {
  if (segments.empty()) return 0.0;
  auto it = std::upper_bound(segments.begin(), segments.end(), x,
                             [](double v, const Segment& s) { return v < s.x_end; });
  if (it == segments.end()) it = std::prev(segments.end());
  return it->height;
}

void Heightfield::check_invariants() const {
  if (segments.empty()) throw std::logic_error("heightfield: no segments");
  if (segments.front().x_start != 0.0) throw std::logic_error("heightfield: must start at 0");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    if (!(s.x_end > s.x_start)) throw std::logic_error("heightfield: empty segment");
    if (i > 0 && segments[i - 1].x_end != s.x_start) {
      throw std::logic_error("heightfield: segments not contiguous");
    }
    if (s.is_gap && s.x_start < start_zone) {
      throw std::logic_error("heightfield: gap inside start zone");
    }
    if (s.x_start < start_zone && s.height != 0.0) {
      throw std::logic_error("heightfield: start zone not flat");
    }
  }
  if (segments.back().x_end != total_length || finish_x != total_length) {
    throw std::logic_error("heightfield: finish must equal total length");
  }
}

double dimension_for(TerrainKind kind, double difficulty) {
  if (!(difficulty >= kMinDifficulty && difficulty <= kMaxDifficulty)) {
    throw std::out_of_range("terrain difficulty must lie in [1, 12]");
  }
  double first = 0.0;
  double last = 0.0;
  switch (kind) {
    case TerrainKind::kFlat:
      return 0.0;
    case TerrainKind::kHurdles:
      first = 0.13;
      last = 0.38;
      break;
    case TerrainKind::kGaps:
      first = 0.10;
      last = 1.00;
      break;
    case TerrainKind::kStairs:
      first = 0.017;
      last = 0.17;
      break;
  }
  // Exact at both endpoints: the weight is 0 at d = 1 and 1 at d = 10.
  const double w = (difficulty - 1.0) / 9.0;
  if (w == 1.0) return last;
  return first + (last - first) * w;
}

Heightfield generate(const TerrainSpec& spec, const TerrainLayout& layout) {
  layout.validate();
  if (spec.instance_count < 1) throw std::invalid_argument("terrain: instance_count must be >= 1");
  const double dim = dimension_for(spec.kind, spec.difficulty);

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> jitter(-layout.spacing_jitter, layout.spacing_jitter);
  std::uniform_int_distribution<int> stair_count(layout.min_stairs, layout.max_stairs);

  Heightfield hf;
  hf.start_zone = layout.start_zone;
  hf.gap_floor_depth = layout.gap_floor_depth;

  double x = 0.0;
  double level = 0.0;
  auto push = [&](double length, double height, bool gap) {
    Segment s{x, x + length, height, gap};
    x = s.x_end;
    // Merge flat runs at the same height so Flat courses stay one segment.
    if (!gap && !hf.segments.empty() && !hf.segments.back().is_gap &&
        hf.segments.back().height == height) {
      hf.segments.back().x_end = s.x_end;
    } else {
      hf.segments.push_back(s);
    }
  };

  push(layout.start_zone, 0.0, false);
  for (int i = 0; i < spec.instance_count; ++i) {
    switch (spec.kind) {
      case TerrainKind::kFlat:
        break;
      case TerrainKind::kGaps:
        push(dim, level, true);
        break;
      case TerrainKind::kHurdles:
        push(layout.hurdle_width, level + dim, false);
        break;
      case TerrainKind::kStairs: {
        const int steps = stair_count(rng);
        for (int k = 0; k < steps; ++k) {
          level += dim;
          push(layout.stair_run, level, false);
        }
        break;
      }
    }
    push(layout.spacing + jitter(rng), level, false);
  }
  hf.total_length = x;
  hf.finish_x = x;
  return hf;
}

Scan scan(const Heightfield& hf, double base_x, double base_z) {
  Scan out{};
  const double span = kScanFar - kScanNear;
  for (int k = 0; k < kScanSamples; ++k) {
    const double offset = kScanNear + span * k / (kScanSamples - 1);
    const double clearance = base_z - hf.height_at(base_x + offset).height;
    const double clamped = std::clamp(clearance, kScanNear, kScanFar);
    out[k] = (clamped - kScanNear) / span;
  }
  return out;
}

}  // namespace curriwalk::terrain
