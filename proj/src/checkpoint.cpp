#include "curriwalk/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace curriwalk::rl {

namespace {

constexpr std::array<char, 8> kMagic = {'C', 'W', 'C', 'K', 'P', 'T', '\0', '\0'};

class Writer {
 public:
  template <typename U>
  void put(U value) {
    using Bits = std::conditional_t<sizeof(U) == 8, std::uint64_t, std::uint32_t>;
    static_assert(sizeof(U) == 4 || sizeof(U) == 8);
    auto bits = std::bit_cast<Bits>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bytes_.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
  }
  void raw(const char* data, std::size_t n) { bytes_.insert(bytes_.end(), data, data + n); }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}

  template <typename U>
  U get() {
    using Bits = std::conditional_t<sizeof(U) == 8, std::uint64_t, std::uint32_t>;
    need(sizeof(U));
    Bits bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bits |= static_cast<Bits>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return std::bit_cast<U>(bits);
  }
  void raw(char* out, std::size_t n) {
    need(n);
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw CheckpointError("checkpoint: truncated file");
  }
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  Writer w;
  w.raw(kMagic.data(), kMagic.size());
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::int32_t>(static_cast<std::int32_t>(c.kind));
  w.put<std::int32_t>(c.architecture.input);
  w.put<std::int32_t>(c.architecture.hidden1);
  w.put<std::int32_t>(c.architecture.hidden2);
  w.put<std::int32_t>(c.architecture.action);
  w.put<std::uint64_t>(c.env_steps);
  w.put<std::uint32_t>(c.updates);

  const auto& s = c.curriculum;
  w.put<std::int32_t>(static_cast<std::int32_t>(s.phase));
  w.put<std::int32_t>(s.d_index);
  w.put<double>(s.guide.multiplier);
  w.put<std::int32_t>(static_cast<std::int32_t>(s.guide.mode));
  w.put<std::int32_t>(s.guide.joints_enabled ? 1 : 0);
  w.put<std::int32_t>(s.guide_active ? 1 : 0);
  w.put<double>(s.p_magnitude);
  w.put<std::int32_t>(s.success_streak);
  w.put<std::int32_t>(s.p_step);

  w.put<std::uint64_t>(c.obs_stats.count());
  w.put<std::uint32_t>(static_cast<std::uint32_t>(c.obs_stats.dim()));
  for (double m : c.obs_stats.mean()) w.put<double>(m);
  for (double m : c.obs_stats.m2()) w.put<double>(m);

  w.put<std::uint64_t>(c.params.size());
  for (float p : c.params) w.put<float>(p);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("checkpoint: cannot open " + path.string() + " for writing");
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw CheckpointError("checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot open " + path.string());
  Reader r(std::vector<char>(std::istreambuf_iterator<char>(in), {}));

  std::array<char, 8> magic{};
  r.raw(magic.data(), magic.size());
  if (magic != kMagic) throw CheckpointError("checkpoint: bad magic in " + path.string());
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint: unsupported version " + std::to_string(version));
  }
  Checkpoint c;
  const auto kind = r.get<std::int32_t>();
  if (kind < 0 || kind > static_cast<int>(terrain::TerrainKind::kStairs)) {
    throw CheckpointError("checkpoint: bad terrain kind");
  }
  c.kind = static_cast<terrain::TerrainKind>(kind);
  c.architecture.input = r.get<std::int32_t>();
  c.architecture.hidden1 = r.get<std::int32_t>();
  c.architecture.hidden2 = r.get<std::int32_t>();
  c.architecture.action = r.get<std::int32_t>();
  c.env_steps = r.get<std::uint64_t>();
  c.updates = r.get<std::uint32_t>();

  auto& s = c.curriculum;
  const auto phase = r.get<std::int32_t>();
  if (phase < 1 || phase > 4) throw CheckpointError("checkpoint: bad curriculum phase");
  s.phase = static_cast<curriculum::Phase>(phase);
  s.d_index = r.get<std::int32_t>();
  s.guide.multiplier = r.get<double>();
  const auto mode = r.get<std::int32_t>();
  if (mode < 0 || mode > 1) throw CheckpointError("checkpoint: bad decay mode");
  s.guide.mode = static_cast<guide::DecayMode>(mode);
  s.guide.joints_enabled = r.get<std::int32_t>() != 0;
  s.guide_active = r.get<std::int32_t>() != 0;
  s.p_magnitude = r.get<double>();
  s.success_streak = r.get<std::int32_t>();
  s.p_step = r.get<std::int32_t>();

  const auto count = r.get<std::uint64_t>();
  const auto dim = r.get<std::uint32_t>();
  if (dim > 1u << 20) throw CheckpointError("checkpoint: bad statistics dimension");
  std::vector<double> mean(dim), m2(dim);
  for (auto& m : mean) m = r.get<double>();
  for (auto& m : m2) m = r.get<double>();
  c.obs_stats = RunningStats::from_moments(count, std::move(mean), std::move(m2));

  const auto n = r.get<std::uint64_t>();
  if (n > (1ull << 32)) throw CheckpointError("checkpoint: bad parameter count");
  c.params.resize(n);
  for (auto& p : c.params) p = r.get<float>();
  if (!r.at_end()) throw CheckpointError("checkpoint: trailing bytes");
  return c;
}

ActorCritic<float> network_from(const Checkpoint& c, const Architecture& expected) {
  if (!(c.architecture == expected)) {
    throw CheckpointError("checkpoint: architecture mismatch");
  }
  ActorCritic<float> net(c.architecture);
  if (net.size() != c.params.size()) throw CheckpointError("checkpoint: parameter count mismatch");
  net.params().assign(c.params.begin(), c.params.end());
  if (static_cast<int>(c.obs_stats.dim()) != c.architecture.input) {
    throw CheckpointError("checkpoint: statistics dimension mismatch");
  }
  return net;
}

}  // namespace curriwalk::rl
