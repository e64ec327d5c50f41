#pragma once

// Flat `section.key = value` run configuration covering every tunable
// default. Unknown keys and malformed values are rejected.

#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "curriwalk/biped_env.hpp"
#include "curriwalk/eval.hpp"
#include "curriwalk/trainer.hpp"

namespace curriwalk::config {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  env::EnvConfig env;
  train::TrainConfig train;
  eval::EvalConfig eval;
  std::string output_root = "runs";

  // Cross-module checks; throws ConfigError.
  void validate() const;
};

// Sets one key from its textual value.
void set_value(RunConfig& config, const std::string& key, const std::string& value);
std::string get_value(const RunConfig& config, const std::string& key);
// All keys in emission order.
std::vector<std::string> keys();

// Parses `key = value` lines; '#' starts a comment, blank lines are ignored.
void apply_text(RunConfig& config, const std::string& text, const std::string& source = "<text>");
void apply_file(RunConfig& config, const std::filesystem::path& path);

// Fully resolved configuration; values round-trip exactly.
std::string to_text(const RunConfig& config);

}  // namespace curriwalk::config
