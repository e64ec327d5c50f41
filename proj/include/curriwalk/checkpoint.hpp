#pragma once

// Binary policy checkpoint. All integers and floats are little-endian.
//
//   magic "CWCKPT\0\0" | u32 version | i32 terrain kind | i32 x4 architecture
//   | u64 env steps | u32 updates | curriculum state | running stats
//   (u64 count, u32 dim, f64 mean[dim], f64 m2[dim]) | u64 n | f32 params[n]

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "curriwalk/actor_critic.hpp"
#include "curriwalk/curriculum.hpp"
#include "curriwalk/running_stats.hpp"
#include "curriwalk/terrain.hpp"

namespace curriwalk::rl {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  terrain::TerrainKind kind = terrain::TerrainKind::kFlat;
  Architecture architecture;
  std::uint64_t env_steps = 0;
  std::uint32_t updates = 0;
  curriculum::CurriculumState curriculum;
  RunningStats obs_stats;
  std::vector<float> params;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

// Throws CheckpointError on a missing, truncated or malformed file.
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Builds a network from the checkpoint; throws CheckpointError if the stored
// architecture differs from `expected`.
ActorCritic<float> network_from(const Checkpoint& checkpoint, const Architecture& expected);

}  // namespace curriwalk::rl
