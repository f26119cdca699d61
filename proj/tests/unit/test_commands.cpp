#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wpmec/checkpoint.hpp"
#include "wpmec/commands.hpp"

using namespace wpmec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("wpmec_test_commands_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(slurp(p));
  std::string l;
  while (std::getline(in, l)) {
    CHECK((!l.empty() && l.back() == '\r'));
    l.pop_back();
    out.push_back(l);
  }
  return out;
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string c;
  while (std::getline(ss, c, ',')) out.push_back(c);
  return out;
}

// Small enough that a full train runs in a second or two.
fs::path tiny_config(const fs::path& dir) {
  const auto p = dir / "tiny.json";
  std::ofstream(p) << R"({"num_uavs": 2, "num_devices": 5, "num_aps": 4, "episodes": 4,
    "slots_per_episode": 12, "hidden_units": 16, "batch_size": 8, "replay_capacity": 64,
    "reward_norm_warmup": 10})";
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WPMEC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("numbers print with full precision") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(2.0) == "2");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("plateau detection") {
  CHECK(episodes_to_plateau({}) == -1);
  std::vector<double> flat(100, 5.0);
  CHECK(episodes_to_plateau(flat, 10) == 9);
  std::vector<double> ramp;
  for (int i = 0; i < 100; ++i) ramp.push_back(i < 50 ? i : 50.0);
  const int e = episodes_to_plateau(ramp, 10, 0.05);
  CHECK(e > 40);
  CHECK(e <= 55);
}

TEST_CASE("sweep axes") {
  SimConfig cfg;
  CHECK(with_axis(cfg, "devices", 7).num_devices == 7);
  CHECK(with_axis(cfg, "aps", 9).num_aps == 9);
  CHECK(with_axis(cfg, "uavs", 3).num_uavs == 3);
  CHECK_THROWS(with_axis(cfg, "lasers", 1));
  CHECK_THROWS(with_axis(cfg, "devices", 0));
}

TEST_CASE("train writes rewards matching the training log") {
  const auto dir = scratch("train");
  const auto cfg_path = tiny_config(dir);
  TrainOptions opt;
  opt.config_path = cfg_path.string();
  opt.seed = 3;
  opt.out_dir = (dir / "run").string();
  const auto m = cmd_train(opt);
  CHECK(m["command"] == "train");
  CHECK(m["version"] == artifact_version());
  CHECK(m["outputs"].size() == 2);
  CHECK(fs::exists(dir / "run" / "manifest.json"));
  CHECK(fs::exists(dir / "run" / "checkpoint.bin"));

  const auto rows = lines(dir / "run" / "rewards.csv");
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "episode,reward,loss_task_mean,loss_shared");
  const auto direct = run_training(load_config(cfg_path.string()), 3);
  for (std::size_t i = 0; i < direct.log.size(); ++i) {
    const auto c = cells(rows[i + 1]);
    REQUIRE(c.size() == 4);
    CHECK(c[0] == std::to_string(i));
    CHECK(std::stod(c[1]) == direct.log[i].reward);
    CHECK(std::stod(c[2]) == direct.log[i].loss_task_mean);
  }

  // Same seed, same bytes.
  opt.out_dir = (dir / "again").string();
  cmd_train(opt);
  CHECK(slurp(dir / "run" / "rewards.csv") == slurp(dir / "again" / "rewards.csv"));
  CHECK(slurp(dir / "run" / "checkpoint.bin") == slurp(dir / "again" / "checkpoint.bin"));

  // Resuming to more episodes extends the same log.
  TrainOptions more;
  more.resume = (dir / "run" / "checkpoint.bin").string();
  more.episodes = 6;
  more.out_dir = (dir / "more").string();
  cmd_train(more);
  const auto extended = lines(dir / "more" / "rewards.csv");
  REQUIRE(extended.size() == 7);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(extended[i] == rows[i]);
  fs::remove_all(dir);
}

TEST_CASE("parallel seeds write one file per seed and a merged one") {
  const auto dir = scratch("parallel");
  TrainOptions opt;
  opt.config_path = tiny_config(dir).string();
  opt.seed = 10;
  opt.parallel_seeds = 2;
  opt.out_dir = dir.string();
  cmd_train(opt);
  CHECK(lines(dir / "rewards_seed10.csv").size() == 5);
  CHECK(lines(dir / "rewards_seed11.csv").size() == 5);
  const auto merged = lines(dir / "rewards.csv");
  REQUIRE(merged.size() == 9);
  CHECK(merged[0] == "seed,episode,reward,loss_task_mean,loss_shared");
  CHECK(merged[1].rfind("10,0,", 0) == 0);
  CHECK(merged[5].rfind("11,0,", 0) == 0);
  CHECK(fs::exists(dir / "checkpoint_seed11.bin"));
  fs::remove_all(dir);
}

TEST_CASE("evaluate writes metrics and is reproducible") {
  const auto dir = scratch("evaluate");
  TrainOptions t;
  t.config_path = tiny_config(dir).string();
  t.out_dir = dir.string();
  cmd_train(t);
  const auto ckpt = (dir / "checkpoint.bin").string();

  for (const std::string policy : {"mural", "oo", "nsd", "greedy"}) {
    EvaluateOptions e;
    e.checkpoint = ckpt;
    e.policy = policy;
    e.episodes = 3;
    e.out_dir = (dir / ("a_" + policy)).string();
    cmd_evaluate(e);
    e.out_dir = (dir / ("b_" + policy)).string();
    cmd_evaluate(e);
    const auto rows = lines(dir / ("a_" + policy) / "metrics.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "episode,avg_efficiency,avg_bits,avg_energy");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto c = cells(rows[i]);
      REQUIRE(c.size() == 4);
      CHECK(std::stod(c[1]) > 0.0);
    }
    CHECK(slurp(dir / ("a_" + policy) / "metrics.csv") == slurp(dir / ("b_" + policy) / "metrics.csv"));
  }

  const auto cfg = load_checkpoint(ckpt).cfg;
  const auto trained = load_checkpoint(ckpt);
  const auto oo = evaluate_policy(cfg, &trained.nets, PolicyKind::kOffloadOnly, 2, 1);
  const auto mural = evaluate_policy(cfg, &trained.nets, PolicyKind::kMural, 2, 1);
  CHECK(oo[0].avg_bits < mural[0].avg_bits);

  EvaluateOptions greedy;
  greedy.policy = "greedy";
  greedy.episodes = 1;
  greedy.config_path = tiny_config(dir).string();
  greedy.out_dir = (dir / "greedy_no_ckpt").string();
  CHECK_NOTHROW(cmd_evaluate(greedy));

  EvaluateOptions bad;
  bad.policy = "mural";
  bad.out_dir = (dir / "bad").string();
  CHECK_THROWS(cmd_evaluate(bad));  // no checkpoint
  bad.checkpoint = ckpt;
  bad.config_path = (dir / "other.json").string();
  std::ofstream(bad.config_path) << R"({"num_uavs": 3})";
  CHECK_THROWS_AS(cmd_evaluate(bad), ConfigError);
  bad.config_path.clear();
  bad.policy = "random";
  CHECK_THROWS(cmd_evaluate(bad));
  fs::remove_all(dir);
}

TEST_CASE("sweep writes one row per value, policy and metric") {
  const auto dir = scratch("sweep");
  SweepOptions s;
  s.axis = "aps";
  s.values = {4, 5, 6, 7, 8, 9};
  s.config_path = tiny_config(dir).string();
  s.episodes = 1;
  s.train_episodes = 2;
  s.out_dir = dir.string();
  cmd_sweep(s);
  const auto rows = lines(dir / "sweep.csv");
  CHECK(rows[0] == "axis,axis_value,policy,metric,value");
  CHECK(rows.size() == 1 + 6 * 4 * 3);
  const auto first = cells(rows[1]);
  REQUIRE(first.size() == 5);
  CHECK(first[0] == "aps");
  CHECK(first[1] == "4");
  CHECK(first[2] == "mural");
  CHECK(first[3] == "avg_efficiency");

  s.values = {4, 6};
  s.policies = {"greedy"};
  s.with_harvest = true;
  s.out_dir = (dir / "harvest").string();
  cmd_sweep(s);
  const auto h = lines(dir / "harvest" / "sweep.csv");
  CHECK(h.size() == 1 + 2 * 4);
  CHECK(h[4].find("avg_device_harvest") != std::string::npos);

  s.axis = "walls";
  CHECK_THROWS(cmd_sweep(s));
  fs::remove_all(dir);
}

TEST_CASE("cli exit codes") {
  const auto dir = scratch("cli");
  const auto cfg = tiny_config(dir).string();
  const auto out = (dir / "out").string();
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("train --config " + cfg + " --out " + out) == 0);
  CHECK(fs::exists(dir / "out" / "rewards.csv"));
  CHECK(run_cli("evaluate --checkpoint " + out + "/checkpoint.bin --episodes 1 --out " + out) == 0);
  CHECK(run_cli("sweep --axis devices --values 3..4 --policy greedy --episodes 1 --config " + cfg + " --out " + out) ==
        0);
  CHECK(run_cli("train --config /nonexistent.json --out " + out) != 0);
  CHECK(run_cli("evaluate --policy mural --out " + out) != 0);
  CHECK(run_cli("sweep --axis walls --values 1 --out " + out) != 0);
  CHECK(run_cli("frobnicate") != 0);
  fs::remove_all(dir);
}
