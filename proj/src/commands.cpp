#include "wpmec/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "wpmec/checkpoint.hpp"
#include "wpmec/environment.hpp"

#ifndef WPMEC_VERSION
#define WPMEC_VERSION "0.1.0"
#endif

namespace wpmec {

namespace fs = std::filesystem;

const char* artifact_version() { return WPMEC_VERSION; }

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int episodes_to_plateau(const std::vector<double>& rewards, int window, double tolerance) {
  const int n = static_cast<int>(rewards.size());
  if (n == 0) return -1;
  const int w = std::min(window, n);
  const double final_mean = std::accumulate(rewards.end() - w, rewards.end(), 0.0) / w;
  double run = std::accumulate(rewards.begin(), rewards.begin() + w, 0.0);
  for (int e = w - 1; e < n; ++e) {
    if (e >= w) run += rewards[e] - rewards[e - w];
    if (std::abs(run / w - final_mean) <= tolerance * std::abs(final_mean)) return e;
  }
  return n - 1;
}

namespace {

using Rows = std::vector<std::vector<std::string>>;

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header, const Rows& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\r\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

SimConfig config_or_default(const std::string& path) {
  return path.empty() ? validate_config(SimConfig{}) : load_config(path);
}

void prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir);
}

/// Runs `fn` for seeds base..base+n-1, one thread each, and returns their
/// results in seed order.
template <class R>
std::vector<R> for_seeds(std::uint64_t base, int n, const std::function<R(std::uint64_t)>& fn) {
  if (n < 1) throw std::invalid_argument("--parallel-seeds must be >= 1");
  std::vector<R> results(static_cast<std::size_t>(n));
  if (n == 1) {
    results[0] = fn(base);
    return results;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  for (int i = 0; i < n; ++i) {
    pool.emplace_back([&, i] {
      try {
        results[static_cast<std::size_t>(i)] = fn(base + static_cast<std::uint64_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

/// One CSV per seed plus a merged file with a leading seed column when
/// more than one seed ran; a single file otherwise.
std::vector<std::string> write_seeded(const fs::path& dir, const std::string& stem,
                                      const std::vector<std::string>& header, const std::vector<Rows>& per_seed,
                                      std::uint64_t base) {
  std::vector<std::string> paths;
  if (per_seed.size() == 1) {
    const auto p = dir / (stem + ".csv");
    write_csv(p, header, per_seed[0]);
    paths.push_back(p.string());
    return paths;
  }
  Rows merged;
  for (std::size_t i = 0; i < per_seed.size(); ++i) {
    const auto seed = std::to_string(base + i);
    const auto p = dir / (stem + "_seed" + seed + ".csv");
    write_csv(p, header, per_seed[i]);
    paths.push_back(p.string());
    for (auto row : per_seed[i]) {
      row.insert(row.begin(), seed);
      merged.push_back(std::move(row));
    }
  }
  auto merged_header = header;
  merged_header.insert(merged_header.begin(), "seed");
  const auto p = dir / (stem + ".csv");
  write_csv(p, merged_header, merged);
  paths.push_back(p.string());
  return paths;
}

nlohmann::json manifest(const std::string& command, const SimConfig& cfg, std::uint64_t seed, int seeds,
                        const std::string& started, double wall) {
  return {{"command", command},
          {"version", artifact_version()},
          {"seed", seed},
          {"parallel_seeds", seeds},
          {"config", config_to_json(cfg)},
          {"started", started},
          {"finished", timestamp()},
          {"wall_seconds", wall},
          {"outputs", nlohmann::json::array()}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<EpisodeMetrics> evaluate_policy(const SimConfig& cfg, const PolicyNets* nets, PolicyKind kind,
                                            int episodes, std::uint64_t seed) {
  const ActionSpace space(cfg);
  std::vector<EpisodeMetrics> out;
  for (int e = 0; e < episodes; ++e) {
    Environment env(cfg, evaluation_seed(seed, e));
    out.push_back(run_episode(env, nets, space, kind));
  }
  return out;
}

SimConfig with_axis(SimConfig cfg, const std::string& axis, int value) {
  if (axis == "devices") {
    cfg.num_devices = value;
  } else if (axis == "aps") {
    cfg.num_aps = value;
  } else if (axis == "uavs") {
    cfg.num_uavs = value;
  } else {
    throw std::invalid_argument("unknown sweep axis '" + axis + "' (expected devices, aps or uavs)");
  }
  return validate_config(cfg);
}

nlohmann::json cmd_train(const TrainOptions& opt) {
  const auto started = timestamp();
  const auto t0 = std::chrono::steady_clock::now();
  prepare_dir(opt.out_dir);
  const fs::path dir(opt.out_dir);

  if (!opt.resume.empty() && opt.parallel_seeds != 1) {
    throw std::invalid_argument("--resume continues a single run; drop --parallel-seeds");
  }
  SimConfig cfg;
  if (!opt.resume.empty()) {
    cfg = load_checkpoint(opt.resume).cfg;
    if (!opt.config_path.empty()) check_compatible(cfg, load_config(opt.config_path));
  } else {
    cfg = config_or_default(opt.config_path);
  }
  if (opt.episodes) {
    cfg.episodes = *opt.episodes;
    cfg = validate_config(cfg);
  }

  struct Run {
    Rows rows;
    int plateau = -1;
    double wall = 0.0;
  };
  const bool single = opt.parallel_seeds == 1;
  const auto runs = for_seeds<Run>(opt.seed, opt.parallel_seeds, [&](std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    Trainer t = opt.resume.empty() ? make_trainer(cfg, seed) : load_checkpoint(opt.resume);
    t.cfg = cfg;
    train_until(t, cfg.episodes);
    const std::string ckpt = single ? "checkpoint.bin" : "checkpoint_seed" + std::to_string(seed) + ".bin";
    save_checkpoint(t, (dir / ckpt).string());
    Run r;
    std::vector<double> rewards;
    for (const auto& e : t.log) {
      r.rows.push_back({std::to_string(e.episode), format_number(e.reward), format_number(e.loss_task_mean),
                        format_number(e.loss_shared)});
      rewards.push_back(e.reward);
    }
    r.plateau = episodes_to_plateau(rewards);
    r.wall = seconds_since(start);
    return r;
  });

  std::vector<Rows> rows;
  for (const auto& r : runs) rows.push_back(r.rows);
  auto m = manifest("train", cfg, opt.seed, opt.parallel_seeds, started, seconds_since(t0));
  for (const auto& p : write_seeded(dir, "rewards", {"episode", "reward", "loss_task_mean", "loss_shared"}, rows,
                                    opt.seed)) {
    m["outputs"].push_back(p);
  }
  m["episodes_to_plateau"] = nlohmann::json::array();
  m["run_wall_seconds"] = nlohmann::json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string ckpt = single ? "checkpoint.bin" : "checkpoint_seed" + std::to_string(opt.seed + i) + ".bin";
    m["outputs"].push_back((dir / ckpt).string());
    m["episodes_to_plateau"].push_back(runs[i].plateau);
    m["run_wall_seconds"].push_back(runs[i].wall);
  }
  if (!opt.resume.empty()) m["resumed_from"] = opt.resume;
  write_json(dir / "manifest.json", m);
  return m;
}

nlohmann::json cmd_evaluate(const EvaluateOptions& opt) {
  const auto started = timestamp();
  const auto t0 = std::chrono::steady_clock::now();
  const PolicyKind kind = parse_policy(opt.policy);
  if (opt.episodes < 1) throw std::invalid_argument("--episodes must be >= 1");
  prepare_dir(opt.out_dir);
  const fs::path dir(opt.out_dir);

  std::optional<Trainer> trained;
  if (!opt.checkpoint.empty()) trained = load_checkpoint(opt.checkpoint);
  if (uses_networks(kind) && !trained) throw std::invalid_argument("policy '" + opt.policy + "' needs --checkpoint");

  SimConfig cfg;
  if (!opt.config_path.empty()) {
    cfg = load_config(opt.config_path);
    if (trained && uses_networks(kind)) check_compatible(trained->cfg, cfg);
  } else if (trained) {
    cfg = trained->cfg;
  } else {
    cfg = validate_config(SimConfig{});
  }
  const PolicyNets* nets = trained ? &trained->nets : nullptr;

  const auto rows = for_seeds<Rows>(opt.seed, opt.parallel_seeds, [&](std::uint64_t seed) {
    Rows out;
    const auto metrics = evaluate_policy(cfg, nets, kind, opt.episodes, seed);
    for (std::size_t e = 0; e < metrics.size(); ++e) {
      out.push_back({std::to_string(e), format_number(metrics[e].mean_efficiency), format_number(metrics[e].avg_bits),
                     format_number(metrics[e].avg_energy)});
    }
    return out;
  });

  auto m = manifest("evaluate", cfg, opt.seed, opt.parallel_seeds, started, seconds_since(t0));
  m["policy"] = to_string(kind);
  if (!opt.checkpoint.empty()) m["checkpoint"] = opt.checkpoint;
  for (const auto& p :
       write_seeded(dir, "metrics", {"episode", "avg_efficiency", "avg_bits", "avg_energy"}, rows, opt.seed)) {
    m["outputs"].push_back(p);
  }
  write_json(dir / "manifest.json", m);
  return m;
}

nlohmann::json cmd_sweep(const SweepOptions& opt) {
  const auto started = timestamp();
  const auto t0 = std::chrono::steady_clock::now();
  if (opt.values.empty()) throw std::invalid_argument("--values is empty");
  if (opt.episodes < 1) throw std::invalid_argument("--episodes must be >= 1");
  std::vector<PolicyKind> kinds;
  for (const auto& p : opt.policies) kinds.push_back(parse_policy(p));
  prepare_dir(opt.out_dir);
  const fs::path dir(opt.out_dir);

  SimConfig base = config_or_default(opt.config_path);
  if (opt.train_episodes) {
    base.episodes = *opt.train_episodes;
    base = validate_config(base);
  }
  std::optional<Trainer> given;
  if (!opt.checkpoint.empty()) given = load_checkpoint(opt.checkpoint);
  for (int v : opt.values) with_axis(base, opt.axis, v);  // reject bad values before any work

  const auto rows = for_seeds<Rows>(opt.seed, opt.parallel_seeds, [&](std::uint64_t seed) {
    Rows out;
    for (int v : opt.values) {
      const SimConfig cfg = with_axis(base, opt.axis, v);
      std::optional<PolicyNets> nets;
      const bool need = std::any_of(kinds.begin(), kinds.end(), uses_networks);
      if (need) {
        bool reuse = false;
        if (given) {
          try {
            check_compatible(given->cfg, cfg);
            reuse = true;
          } catch (const ConfigError&) {
          }
        }
        nets = reuse ? given->nets : run_training(cfg, seed).nets;
      }
      for (const auto kind : kinds) {
        const auto metrics = evaluate_policy(cfg, nets ? &*nets : nullptr, kind, opt.episodes, seed);
        double eff = 0.0, bits = 0.0, energy = 0.0, harvest = 0.0;
        for (const auto& m : metrics) {
          eff += m.mean_efficiency;
          bits += m.avg_bits;
          energy += m.avg_energy;
          harvest += m.mean_device_harvest;
        }
        const double n = static_cast<double>(metrics.size());
        const auto row = [&](const char* metric, double value) {
          out.push_back({opt.axis, std::to_string(v), to_string(kind), metric, format_number(value / n)});
        };
        row("avg_efficiency", eff);
        row("avg_bits", bits);
        row("avg_energy", energy);
        if (opt.with_harvest) row("avg_device_harvest", harvest);
      }
    }
    return out;
  });

  auto m = manifest("sweep", base, opt.seed, opt.parallel_seeds, started, seconds_since(t0));
  m["axis"] = opt.axis;
  m["values"] = opt.values;
  m["policies"] = opt.policies;
  if (!opt.checkpoint.empty()) m["checkpoint"] = opt.checkpoint;
  for (const auto& p : write_seeded(dir, "sweep", {"axis", "axis_value", "policy", "metric", "value"}, rows, opt.seed)) {
    m["outputs"].push_back(p);
  }
  write_json(dir / "manifest.json", m);
  return m;
}

}  // namespace wpmec
