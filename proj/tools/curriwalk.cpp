// Command-line driver: train, eval, ablate, sweep, gen-terrain, dump-trajectory.
//
// Exit codes: 0 success, 1 runtime fault, 2 bad configuration or usage,
// 3 missing or unreadable checkpoint.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "curriwalk/checkpoint.hpp"
#include "curriwalk/eval.hpp"
#include "curriwalk/run_config.hpp"
#include "curriwalk/target_trajectory.hpp"
#include "curriwalk/terrain.hpp"
#include "curriwalk/trainer.hpp"

namespace fs = std::filesystem;
using namespace curriwalk;

namespace {

constexpr int kExitFault = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCheckpoint = 3;

struct Common {
  std::string config_file;
  std::vector<std::string> overrides;
  bool print_config = false;
  std::string out_dir;
};

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

config::RunConfig resolve(const Common& common,
                          const std::vector<std::pair<std::string, std::string>>& flags) {
  config::RunConfig cfg;
  if (!common.config_file.empty()) config::apply_file(cfg, common.config_file);
  for (const std::string& kv : common.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw config::ConfigError("--set expects key=value, got '" + kv + "'");
    config::set_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [key, value] : flags) config::set_value(cfg, key, value);
  cfg.validate();
  return cfg;
}

fs::path run_dir(const Common& common, const config::RunConfig& cfg, const std::string& command) {
  fs::path dir;
  if (!common.out_dir.empty()) {
    dir = common.out_dir;
  } else {
    dir = fs::path(cfg.output_root) / (command + "_" + std::string(terrain::to_string(cfg.train.kind)) +
                                       "_seed" + std::to_string(cfg.train.seed) + "_" + timestamp());
  }
  fs::create_directories(dir);
  write_file(dir / "config.cfg", config::to_text(cfg));
  return dir;
}

void print_report_table(const std::vector<std::pair<std::string, eval::EvalReport>>& rows) {
  std::printf("%-24s %10s %10s %10s %8s\n", "label", "mean %", "std %", "success", "trials");
  for (const auto& [label, r] : rows) {
    std::printf("%-24s %10.2f %10.2f %10d %8zu\n", label.c_str(), r.mean_pct, r.std_pct,
                r.successes, r.fractions.size());
  }
}

std::string terrain_csv(const terrain::Heightfield& hf) {
  std::string out = "index,x_start,x_end,length,height,is_gap\n";
  char buf[160];
  for (std::size_t i = 0; i < hf.segments.size(); ++i) {
    const terrain::Segment& s = hf.segments[i];
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6f,%.6f,%d\n", i, s.x_start, s.x_end,
                  s.x_end - s.x_start, s.height, s.is_gap ? 1 : 0);
    out += buf;
  }
  return out;
}

std::string trajectory_csv(const target::TargetTrajectory& traj) {
  std::string out =
      "frame,segment,right_hip,right_knee,right_ankle,left_hip,left_knee,left_ankle\n";
  char buf[256];
  int frame = 0;
  for (const auto id : {target::SegmentId::kRight, target::SegmentId::kLeft}) {
    for (const sim::Vec6& q : traj.segment(id)) {
      std::snprintf(buf, sizeof(buf), "%d,%s,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f\n", frame++,
                    id == target::SegmentId::kRight ? "right" : "left", q[0], q[1], q[2], q[3],
                    q[4], q[5]);
      out += buf;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curriculum-trained planar biped walking"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", common.config_file, "Config file (key = value)");
    sub->add_option("--set", common.overrides, "Override a config key (key=value)");
    sub->add_flag("--print-config", common.print_config, "Print the resolved config and exit");
    sub->add_option("-o,--out", common.out_dir, "Output directory (default: timestamped run dir)");
  };
  std::vector<std::pair<std::string, std::string>> flags;
  auto flag = [&](CLI::App* sub, const std::string& name, const std::string& key,
                  const std::string& help) {
    sub->add_option_function<std::string>(
        name, [&flags, key](const std::string& v) { flags.emplace_back(key, v); }, help);
  };

  CLI::App* train_cmd = app.add_subcommand("train", "Train a policy with the curriculum");
  add_common(train_cmd);
  flag(train_cmd, "--terrain", "run.terrain", "flat | gaps | hurdles | stairs");
  flag(train_cmd, "--seed", "run.seed", "Run seed");
  flag(train_cmd, "--steps", "train.total_steps", "Environment step budget");

  std::string checkpoint_path;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(eval_cmd);
  eval_cmd->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
  flag(eval_cmd, "--trials", "eval.n_trials", "Number of trials");
  flag(eval_cmd, "--difficulty", "eval.difficulty", "Terrain difficulty 1-12");
  flag(eval_cmd, "--perturb", "eval.perturbation", "Perturbation magnitude N (0 = off)");
  flag(eval_cmd, "--seed", "eval.seed", "Evaluation seed");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Evaluate a checkpoint at d = 1, 8, 10, 12");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
  flag(sweep_cmd, "--trials", "eval.n_trials", "Number of trials per difficulty");
  flag(sweep_cmd, "--seed", "eval.seed", "Evaluation seed");

  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::vector<std::string> variant_names;
  CLI::App* ablate_cmd = app.add_subcommand("ablate", "Train and evaluate the ablation matrix");
  add_common(ablate_cmd);
  flag(ablate_cmd, "--terrain", "run.terrain", "flat | gaps | hurdles | stairs");
  flag(ablate_cmd, "--steps", "train.total_steps", "Environment step budget per run");
  flag(ablate_cmd, "--trials", "eval.n_trials", "Evaluation trials per run");
  ablate_cmd->add_option("--seeds", seeds, "Training seeds");
  ablate_cmd->add_option("--variants", variant_names, "Subset of variants (default: all)");

  std::string kind_name = "flat";
  double difficulty = 10.0;
  int instances = terrain::kEvalInstances;
  std::uint64_t terrain_seed = 0;
  CLI::App* terrain_cmd = app.add_subcommand("gen-terrain", "Write a terrain course as CSV");
  add_common(terrain_cmd);
  terrain_cmd->add_option("--kind", kind_name, "flat | gaps | hurdles | stairs");
  terrain_cmd->add_option("--difficulty", difficulty, "Difficulty 1-12");
  terrain_cmd->add_option("--instances", instances, "Number of artifacts");
  terrain_cmd->add_option("--seed", terrain_seed, "Course seed");

  CLI::App* traj_cmd = app.add_subcommand("dump-trajectory", "Write the target gait as CSV");
  add_common(traj_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  config::RunConfig cfg;
  try {
    cfg = resolve(common, flags);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  if (common.print_config) {
    std::fputs(config::to_text(cfg).c_str(), stdout);
    return 0;
  }

  try {
    if (train_cmd->parsed()) {
      const fs::path dir = run_dir(common, cfg, "train");
      train::TrainConfig tc = cfg.train;
      tc.output_dir = dir;
      std::fprintf(stderr, "training %s seed %llu for %llu steps -> %s\n",
                   std::string(terrain::to_string(tc.kind)).c_str(),
                   static_cast<unsigned long long>(tc.seed),
                   static_cast<unsigned long long>(tc.total_steps), dir.c_str());
      const auto result = train::train(cfg.env, tc, [](const train::MetricsRow& r) {
        std::fprintf(stderr, "update %4d step %9llu phase %d d %2d f %.4f reward %.4f eval %s\n",
                     r.update, static_cast<unsigned long long>(r.step), static_cast<int>(r.phase),
                     r.difficulty, r.guide, r.mean_reward,
                     r.eval_distance_pct < 0.0 ? "-"
                                               : std::to_string(r.eval_distance_pct).c_str());
      });
      std::fprintf(stderr, "done: %d episodes, %d faults, %d aborted updates\n", result.episodes,
                   result.faults, result.aborted_updates);
      return 0;
    }

    if (eval_cmd->parsed() || sweep_cmd->parsed()) {
      rl::Checkpoint ckpt;
      try {
        if (!fs::exists(checkpoint_path)) {
          throw rl::CheckpointError("checkpoint not found: " + checkpoint_path);
        }
        ckpt = rl::load_checkpoint(checkpoint_path);
        if (ckpt.kind != cfg.eval.kind) {
          cfg.eval.kind = ckpt.kind;
          cfg.train.kind = ckpt.kind;
        }
        (void)rl::network_from(ckpt, cfg.train.architecture());
      } catch (const rl::CheckpointError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCheckpoint;
      }
      const rl::ActorCritic<float> net = rl::network_from(ckpt, cfg.train.architecture());
      const eval::Policy policy = eval::deterministic_policy(net, ckpt.obs_stats, cfg.train.obs_clip);
      std::vector<std::pair<std::string, eval::EvalReport>> rows;
      const char* name = eval_cmd->parsed() ? "eval" : "sweep";
      if (eval_cmd->parsed()) {
        char label[32];
        std::snprintf(label, sizeof(label), "d%g", cfg.eval.difficulty);
        rows.emplace_back(label, eval::run_trials(cfg.env, cfg.eval, policy));
      } else {
        for (const auto& entry : eval::difficulty_sweep(cfg.env, cfg.eval, policy)) {
          char label[32];
          std::snprintf(label, sizeof(label), "d%g", entry.difficulty);
          rows.emplace_back(label, entry.report);
        }
      }
      const fs::path dir = run_dir(common, cfg, name);
      std::string csv = eval::report_csv_header() + "\n";
      for (const auto& [label, r] : rows) csv += eval::report_csv_row(label, r) + "\n";
      write_file(dir / (std::string(name) + ".csv"), csv);
      if (eval_cmd->parsed()) {
        std::string trials = "trial,seed,distance_fraction\n";
        const auto& fr = rows.front().second.fractions;
        for (std::size_t i = 0; i < fr.size(); ++i) {
          char buf[96];
          std::snprintf(buf, sizeof(buf), "%zu,%llu,%.17g\n", i,
                        static_cast<unsigned long long>(cfg.eval.seed + i), fr[i]);
          trials += buf;
        }
        write_file(dir / "trials.csv", trials);
      }
      print_report_table(rows);
      return 0;
    }

    if (ablate_cmd->parsed()) {
      // Ablations keep perturbations at their initial magnitude throughout.
      cfg.train.curriculum.perturb_stage = false;
      std::vector<train::AblationVariant> variants;
      for (const auto& v : train::ablation_variants()) {
        if (variant_names.empty() ||
            std::find(variant_names.begin(), variant_names.end(), v.name) != variant_names.end()) {
          variants.push_back(v);
        }
      }
      if (variants.empty()) {
        std::fprintf(stderr, "error: no matching ablation variants\n");
        return kExitConfig;
      }
      const fs::path dir = run_dir(common, cfg, "ablate");
      train::TrainConfig base = cfg.train;
      base.output_dir = dir;
      const auto rows = train::ablation_suite(cfg.env, base, variants, seeds, cfg.eval);
      std::string csv = "variant,seed,mean_pct,std_pct,successes,trials,mean_steps\n";
      std::map<std::string, std::pair<double, int>> sums;
      std::vector<std::pair<std::string, eval::EvalReport>> table;
      for (const auto& r : rows) {
        csv += eval::report_csv_row(r.variant + "," + std::to_string(r.seed), r.report) + "\n";
        sums[r.variant].first += r.report.mean_pct;
        sums[r.variant].second += 1;
        table.emplace_back(r.variant + " s" + std::to_string(r.seed), r.report);
      }
      write_file(dir / "ablation.csv", csv);
      std::string summary = "variant,mean_pct_over_seeds\n";
      for (const auto& v : variants) {
        const auto& s = sums[v.name];
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s,%.17g\n", v.name.c_str(), s.first / s.second);
        summary += buf;
      }
      write_file(dir / "ablation_summary.csv", summary);
      print_report_table(table);
      std::fputs(summary.c_str(), stdout);
      return 0;
    }

    if (terrain_cmd->parsed()) {
      const auto kind = terrain::parse_kind(kind_name);
      if (!kind) {
        std::fprintf(stderr, "error: unknown terrain kind '%s'\n", kind_name.c_str());
        return kExitConfig;
      }
      terrain::Heightfield hf;
      try {
        hf = terrain::generate({*kind, difficulty, instances, terrain_seed}, cfg.env.layout);
      } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
      }
      const std::string csv = terrain_csv(hf);
      if (common.out_dir.empty()) {
        std::fputs(csv.c_str(), stdout);
      } else {
        fs::create_directories(common.out_dir);
        write_file(fs::path(common.out_dir) / "terrain.csv", csv);
      }
      return 0;
    }

    if (traj_cmd->parsed()) {
      const std::string csv =
          trajectory_csv(target::builtin_walk_trajectory(cfg.env.model, cfg.env.gait));
      if (common.out_dir.empty()) {
        std::fputs(csv.c_str(), stdout);
      } else {
        fs::create_directories(common.out_dir);
        write_file(fs::path(common.out_dir) / "trajectory.csv", csv);
      }
      return 0;
    }
  } catch (const config::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFault;
  }
  return kExitFault;
}
