#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "curriwalk_test_cli";

struct Run {
  int code = -1;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Run cli(const std::string& args) {
  fs::create_directories(kWork);
  const fs::path out = kWork / "stdout.txt";
  const std::string cmd =
      std::string(CURRIWALK_CLI) + " " + args + " > " + out.string() + " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// Small but complete training run: two updates with evaluation.
const std::string kTinyTrain =
    "train --terrain hurdles --seed 3 --steps 512 --set ppo.horizon=256 --set ppo.minibatch=64 "
    "--set ppo.epochs=2 --set ppo.hidden1=32 --set ppo.hidden2=32 --set train.eval_interval=1 "
    "--set train.eval_trials=2";

}  // namespace

TEST_CASE("train flags resolve into the configuration") {
  const Run r = cli("train --terrain hurdles --seed 1 --steps 100000 --print-config");
  CHECK(r.code == 0);
  CHECK(r.out.find("run.terrain = hurdles\n") != std::string::npos);
  CHECK(r.out.find("run.seed = 1\n") != std::string::npos);
  CHECK(r.out.find("train.total_steps = 100000\n") != std::string::npos);

  // The printed configuration loads back to the same text.
  const fs::path cfg = kWork / "printed.cfg";
  std::ofstream(cfg) << r.out;
  const Run again = cli("train --config " + cfg.string() + " --print-config");
  CHECK(again.code == 0);
  CHECK(again.out == r.out);
}

TEST_CASE("usage and configuration errors exit with code 2") {
  CHECK(cli("train --set ppo.no_such_key=1 --print-config").code == 2);
  CHECK(cli("train --set ppo.gamma=abc --print-config").code == 2);
  CHECK(cli("train --terrain moon --print-config").code == 2);
  CHECK(cli("train --config /nonexistent/run.cfg").code == 2);
  CHECK(cli("no-such-command").code == 2);
  CHECK(cli("").code == 2);
  CHECK(cli("gen-terrain --kind moon").code == 2);
  CHECK(cli("gen-terrain --kind gaps --difficulty 13").code == 2);
}

TEST_CASE("missing or corrupt checkpoints exit with code 3") {
  CHECK(cli("eval --checkpoint " + (kWork / "absent.ckpt").string()).code == 3);
  const fs::path junk = kWork / "junk.ckpt";
  std::ofstream(junk) << "not a checkpoint";
  CHECK(cli("eval --checkpoint " + junk.string()).code == 3);
  CHECK(cli("sweep --checkpoint " + junk.string()).code == 3);
}

TEST_CASE("gen-terrain writes seven one-metre gaps at difficulty 10") {
  const Run r = cli("gen-terrain --kind gaps --difficulty 10 --instances 7");
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"index", "x_start", "x_end", "length", "height",
                                            "is_gap"});
  int gaps = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][5] == "1") {
      ++gaps;
      CHECK(rows[i][3] == "1.000000");
    }
  }
  CHECK(gaps == 7);
}

TEST_CASE("dump-trajectory writes both gait segments") {
  const Run r = cli("dump-trajectory");
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  CHECK(rows.size() == 121);
  CHECK(rows[1][1] == "right");
  CHECK(rows[120][1] == "left");
}

TEST_CASE("train, eval and sweep repeat bit for bit") {
  const fs::path a = kWork / "train_a";
  const fs::path b = kWork / "train_b";
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(cli(kTinyTrain + " -o " + a.string()).code == 0);
  REQUIRE(cli(kTinyTrain + " -o " + b.string()).code == 0);
  for (const char* name : {"config.cfg", "metrics.csv", "curriculum.csv", "final.ckpt"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }

  const std::string ckpt = (a / "final.ckpt").string();
  const std::string arch = " --set ppo.hidden1=32 --set ppo.hidden2=32";
  const fs::path ea = kWork / "eval_a";
  const fs::path eb = kWork / "eval_b";
  REQUIRE(cli("eval --checkpoint " + ckpt + arch + " --trials 3 -o " + ea.string()).code == 0);
  REQUIRE(cli("eval --checkpoint " + ckpt + arch + " --trials 3 -o " + eb.string()).code == 0);
  CHECK(slurp(ea / "eval.csv") == slurp(eb / "eval.csv"));
  CHECK(slurp(ea / "trials.csv") == slurp(eb / "trials.csv"));
  CHECK(csv_rows(slurp(ea / "trials.csv")).size() == 4);
  // The checkpoint carries its terrain; eval follows it.
  CHECK(slurp(ea / "config.cfg").find("run.terrain = hurdles\n") != std::string::npos);

  // Architecture mismatch is a checkpoint error.
  CHECK(cli("eval --checkpoint " + ckpt + " --trials 1 -o " + (kWork / "eval_c").string()).code ==
        3);

  const fs::path sa = kWork / "sweep_a";
  const fs::path sb = kWork / "sweep_b";
  REQUIRE(cli("sweep --checkpoint " + ckpt + arch + " --trials 2 -o " + sa.string()).code == 0);
  REQUIRE(cli("sweep --checkpoint " + ckpt + arch + " --trials 2 -o " + sb.string()).code == 0);
  const std::string sweep = slurp(sa / "sweep.csv");
  CHECK(sweep == slurp(sb / "sweep.csv"));
  const auto rows = csv_rows(sweep);
  REQUIRE(rows.size() == 5);
  CHECK(rows[1][0] == "d1");
  CHECK(rows[2][0] == "d8");
  CHECK(rows[3][0] == "d10");
  CHECK(rows[4][0] == "d12");
  fs::remove_all(kWork);
}
