#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpmec/config.hpp"
#include "wpmec/mural.hpp"
#include "wpmec/trainer.hpp"

namespace wpmec {

/// Artifact version recorded in every manifest.
const char* artifact_version();

/// Shortest-free formatting used in every CSV: 17 significant digits.
std::string format_number(double v);

/// First episode whose trailing mean over `window` episodes is within
/// `tolerance` (relative) of the mean of the last `window` episodes; -1
/// for an empty log.
int episodes_to_plateau(const std::vector<double>& rewards, int window = 50, double tolerance = 0.05);

struct TrainOptions {
  std::string config_path;  // empty: defaults
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::optional<int> episodes;
  std::string resume;  // checkpoint to continue from
  int parallel_seeds = 1;
};

struct EvaluateOptions {
  std::string checkpoint;  // required unless the policy is greedy
  std::string config_path;  // empty: the checkpoint's config
  std::string policy = "mural";
  int episodes = 10;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int parallel_seeds = 1;
};

struct SweepOptions {
  std::string axis;  // devices, aps or uavs
  std::vector<int> values;
  std::string config_path;
  std::vector<std::string> policies{"mural", "oo", "nsd", "greedy"};
  std::string checkpoint;  // reused for every value it is compatible with
  int episodes = 10;       // evaluation episodes per point
  std::optional<int> train_episodes;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool with_harvest = false;  // add avg_device_harvest rows
  int parallel_seeds = 1;
};

/// Each command writes its CSV(s), a manifest.json and (train) a
/// checkpoint under out_dir, and returns the manifest.
nlohmann::json cmd_train(const TrainOptions& opt);
nlohmann::json cmd_evaluate(const EvaluateOptions& opt);
nlohmann::json cmd_sweep(const SweepOptions& opt);

/// Evaluation core shared by the commands: `episodes` fresh worlds.
std::vector<EpisodeMetrics> evaluate_policy(const SimConfig& cfg, const PolicyNets* nets, PolicyKind kind,
                                            int episodes, std::uint64_t seed);

/// Config with the sweep axis set to `value`.
SimConfig with_axis(SimConfig cfg, const std::string& axis, int value);

}  // namespace wpmec
