#include "wpmec/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace wpmec {

namespace {

constexpr char kMagic[8] = {'W', 'P', 'M', 'E', 'C', 'C', 'K', 0};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write checkpoint " + path);
  }
  template <class T>
  void pod(const T& v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void vec(const Vector& v) {
    pod(static_cast<std::uint64_t>(v.size()));
    bytes(reinterpret_cast<const char*>(v.data()), sizeof(double) * static_cast<std::size_t>(v.size()));
  }
  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("checkpoint write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw std::runtime_error("cannot read checkpoint " + path);
  }
  template <class T>
  T pod() {
    T v{};
    bytes(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
  }
  void bytes(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (!in_) throw std::runtime_error("truncated checkpoint " + path_);
  }
  Vector vec(Eigen::Index expected) {
    const auto n = pod<std::uint64_t>();
    if (expected >= 0 && n != static_cast<std::uint64_t>(expected)) {
      throw std::runtime_error("checkpoint " + path_ + ": parameter block has the wrong size");
    }
    if (n > (1ULL << 32)) throw std::runtime_error("checkpoint " + path_ + ": corrupt block length");
    Vector v(static_cast<Eigen::Index>(n));
    bytes(reinterpret_cast<char*>(v.data()), sizeof(double) * n);
    return v;
  }

 private:
  std::ifstream in_;
  std::string path_;
};

template <class Engine>
std::string rng_state(const Engine& e) {
  std::ostringstream s;
  s << e;
  return s.str();
}

template <class Engine>
void set_rng_state(Engine& e, const std::string& state) {
  std::istringstream s(state);
  s >> e;
  if (!s) throw std::runtime_error("checkpoint: bad RNG state");
}

void write_adam(Writer& w, const Adam& a) {
  w.vec(a.m);
  w.vec(a.v);
}

void read_adam(Reader& r, Adam& a, Eigen::Index n) {
  a.m = r.vec(n);
  a.v = r.vec(n);
}

}  // namespace

void save_checkpoint(const Trainer& t, const std::string& path) {
  nlohmann::json h;
  h["config"] = config_to_json(t.cfg);
  h["seed"] = t.seed;
  h["next_episode"] = t.next_episode;
  h["normalizer"] = {{"count", t.normalizer.count}, {"mean", t.normalizer.mean}};
  h["rng"] = rng_state(t.rng);
  h["shared_steps"] = t.nets.shared_opt.t;
  h["task_steps"] = nlohmann::json::array();
  for (const auto& a : t.nets.task_opt) h["task_steps"].push_back(a.t);
  h["log"] = nlohmann::json::array();
  for (const auto& e : t.log) {
    h["log"].push_back({e.episode, e.reward, e.loss_task_mean, e.loss_shared, e.mean_efficiency, e.penalty_events});
  }
  const std::string header = h.dump();

  Writer w(path);
  w.bytes(kMagic, sizeof(kMagic));
  w.pod(kVersion);
  w.pod(static_cast<std::uint64_t>(header.size()));
  w.bytes(header.data(), header.size());

  w.vec(t.nets.shared.parameters());
  write_adam(w, t.nets.shared_opt);
  for (std::size_t u = 0; u < t.nets.task.size(); ++u) {
    w.vec(t.nets.task[u].parameters());
    w.vec(t.nets.target[u].parameters());
    write_adam(w, t.nets.task_opt[u]);
  }
  for (const auto& buf : t.replay) {
    w.pod(static_cast<std::uint64_t>(buf.data().size()));
    w.pod(static_cast<std::uint64_t>(buf.next()));
    for (const auto& tr : buf.data()) {
      w.pod(static_cast<std::int32_t>(tr.action));
      w.pod(tr.reward);
      w.pod(static_cast<std::int32_t>(tr.slot));
      w.pod(static_cast<std::uint8_t>(tr.done));
      w.vec(tr.obs);
      w.vec(tr.next_obs);
    }
  }
  w.finish();
}

Trainer load_checkpoint(const std::string& path) {
  Reader r(path);
  char magic[sizeof(kMagic)];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw std::runtime_error(path + " is not a checkpoint");
  const auto version = r.pod<std::uint32_t>();
  if (version != kVersion) {
    throw std::runtime_error("checkpoint " + path + " has version " + std::to_string(version) +
                             ", expected " + std::to_string(kVersion));
  }
  const auto len = r.pod<std::uint64_t>();
  if (len > (1ULL << 30)) throw std::runtime_error("checkpoint " + path + ": corrupt header length");
  std::string header(len, '\0');
  r.bytes(header.data(), len);
  const auto h = nlohmann::json::parse(header);

  const SimConfig cfg = config_from_json(h.at("config"));
  Trainer t = make_trainer(cfg, h.at("seed").get<std::uint64_t>());
  t.next_episode = h.at("next_episode").get<int>();
  t.normalizer.count = h.at("normalizer").at("count").get<std::int64_t>();
  t.normalizer.mean = h.at("normalizer").at("mean").get<double>();
  set_rng_state(t.rng, h.at("rng").get<std::string>());
  t.nets.shared_opt.t = h.at("shared_steps").get<std::int64_t>();
  const auto& steps = h.at("task_steps");
  if (steps.size() != t.nets.task.size()) throw std::runtime_error("checkpoint " + path + ": UAV count mismatch");
  for (std::size_t u = 0; u < steps.size(); ++u) t.nets.task_opt[u].t = steps[u].get<std::int64_t>();
  for (const auto& e : h.at("log")) {
    t.log.push_back({e[0].get<int>(), e[1].get<double>(), e[2].get<double>(), e[3].get<double>(),
                     e[4].get<double>(), e[5].get<int>()});
  }

  const auto shared_n = t.nets.shared.parameter_count();
  t.nets.shared.parameters() = r.vec(shared_n);
  read_adam(r, t.nets.shared_opt, shared_n);
  for (std::size_t u = 0; u < t.nets.task.size(); ++u) {
    const auto n = t.nets.task[u].parameter_count();
    t.nets.task[u].parameters() = r.vec(n);
    t.nets.target[u].parameters() = r.vec(n);
    read_adam(r, t.nets.task_opt[u], n);
  }
  const auto obs_n = static_cast<Eigen::Index>(observation_size(cfg));
  for (auto& buf : t.replay) {
    const auto size = r.pod<std::uint64_t>();
    const auto next = r.pod<std::uint64_t>();
    if (size > buf.capacity()) throw std::runtime_error("checkpoint " + path + ": replay larger than capacity");
    std::vector<Transition> data(size);
    for (auto& tr : data) {
      tr.action = r.pod<std::int32_t>();
      tr.reward = r.pod<double>();
      tr.slot = r.pod<std::int32_t>();
      tr.done = r.pod<std::uint8_t>() != 0;
      tr.obs = r.vec(obs_n);
      tr.next_obs = r.vec(obs_n);
    }
    buf.restore(std::move(data), next);
  }
  return t;
}

void check_compatible(const SimConfig& a, const SimConfig& b) {
  auto same = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("checkpoint/config mismatch: " + what + " differs from the trained networks");
  };
  same(a.num_devices == b.num_devices, "num_devices");
  same(a.num_uavs == b.num_uavs, "num_uavs");
  same(a.joint_obs == b.joint_obs, "joint_obs");
  same(a.uav_speed_low == b.uav_speed_low && a.uav_speed_high == b.uav_speed_high, "action space");
  same(a.hidden_layers == b.hidden_layers && a.hidden_units == b.hidden_units, "network shape");
}

}  // namespace wpmec
