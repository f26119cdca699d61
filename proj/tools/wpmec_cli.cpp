#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpmec/commands.hpp"

namespace {

std::vector<int> parse_values(const std::string& text) {
  // "4,5,6" or an inclusive range "4..9"
  std::vector<int> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("empty range " + text);
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    out.push_back(std::stoi(item, &used));
    if (used != item.size()) throw std::invalid_argument("bad value '" + item + "'");
  }
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-UAV wireless-powered edge computing simulator"};
  app.require_subcommand(1);

  wpmec::TrainOptions train;
  int train_episodes = 0;
  auto* t = app.add_subcommand("train", "Train the UAV policies; writes rewards.csv and checkpoint.bin");
  t->add_option("--config", train.config_path, "JSON config (defaults when omitted)");
  t->add_option("--seed", train.seed, "Base seed");
  t->add_option("--out", train.out_dir, "Output directory");
  t->add_option("--episodes", train_episodes, "Override the configured episode count");
  t->add_option("--resume", train.resume, "Continue from a checkpoint");
  t->add_option("--parallel-seeds", train.parallel_seeds, "Independent seeds to run concurrently");

  wpmec::EvaluateOptions eval;
  auto* e = app.add_subcommand("evaluate", "Evaluate a policy; writes metrics.csv");
  e->add_option("--checkpoint", eval.checkpoint, "Checkpoint from train");
  e->add_option("--config", eval.config_path, "JSON config (the checkpoint's when omitted)");
  e->add_option("--policy", eval.policy, "mural, oo, nsd or greedy");
  e->add_option("--episodes", eval.episodes, "Evaluation episodes");
  e->add_option("--seed", eval.seed, "Base seed");
  e->add_option("--out", eval.out_dir, "Output directory");
  e->add_option("--parallel-seeds", eval.parallel_seeds, "Independent seeds to run concurrently");

  wpmec::SweepOptions sweep;
  std::string values;
  std::string policies;
  int sweep_train = 0;
  auto* s = app.add_subcommand("sweep", "Sweep devices, aps or uavs; writes sweep.csv");
  s->add_option("--axis", sweep.axis, "devices, aps or uavs")->required();
  s->add_option("--values", values, "Comma list or inclusive range a..b")->required();
  s->add_option("--config", sweep.config_path, "Base JSON config");
  s->add_option("--policy", policies, "Comma list of policies (default all)");
  s->add_option("--checkpoint", sweep.checkpoint, "Networks reused where compatible");
  s->add_option("--episodes", sweep.episodes, "Evaluation episodes per point");
  s->add_option("--train-episodes", sweep_train, "Training episodes for points that need networks");
  s->add_option("--seed", sweep.seed, "Base seed");
  s->add_option("--out", sweep.out_dir, "Output directory");
  s->add_flag("--with-harvest", sweep.with_harvest, "Also report avg_device_harvest");
  s->add_option("--parallel-seeds", sweep.parallel_seeds, "Independent seeds to run concurrently");

  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json manifest;
    if (*t) {
      if (train_episodes > 0) train.episodes = train_episodes;
      manifest = wpmec::cmd_train(train);
    } else if (*e) {
      manifest = wpmec::cmd_evaluate(eval);
    } else {
      sweep.values = parse_values(values);
      if (!policies.empty()) sweep.policies = split(policies);
      if (sweep_train > 0) sweep.train_episodes = sweep_train;
      manifest = wpmec::cmd_sweep(sweep);
    }
    for (const auto& p : manifest["outputs"]) std::cout << p.get<std::string>() << "\n";
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
