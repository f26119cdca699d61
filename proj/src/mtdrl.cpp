#include "wpmec/mtdrl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wpmec {

namespace {

constexpr double kDiag = 0.70710678118654752440;
const Vec2 kCompass[8] = {{0, 1}, {kDiag, kDiag}, {1, 0}, {kDiag, -kDiag},
                          {0, -1}, {-kDiag, -kDiag}, {-1, 0}, {-kDiag, kDiag}};

Matrix stack(std::span<const Transition* const> batch, bool next) {
  Matrix x(batch.front()->obs.size(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) x.col(static_cast<Eigen::Index>(i)) = next ? batch[i]->next_obs : batch[i]->obs;
  return x;
}

}  // namespace

ActionSpace::ActionSpace(const SimConfig& cfg) : side_(cfg.area_side), dt_(cfg.slot_duration) {
  for (int beta = 0; beta <= 1; ++beta) {
    actions_.push_back({beta, -1, 0.0});
    for (int dir = 0; dir < 8; ++dir) {
      for (double v : {cfg.uav_speed_low, cfg.uav_speed_high}) actions_.push_back({beta, dir, v});
    }
  }
}

Vec2 ActionSpace::next_position(int index, const Vec2& from) const {
  const auto& a = (*this)[index];
  if (a.direction < 0) return from;
  const Vec2 p = from + kCompass[a.direction] * (a.speed * dt_);
  return {std::clamp(p.x, 0.0, side_), std::clamp(p.y, 0.0, side_)};
}

int ActionSpace::index_of(int beta, int direction, double speed) const {
  for (int i = 0; i < size(); ++i) {
    const auto& a = actions_[static_cast<std::size_t>(i)];
    if (a.beta == beta && a.direction == direction && (direction < 0 || a.speed == speed)) return i;
  }
  throw std::invalid_argument("ActionSpace::index_of: no such action");
}

ActionSpace build_action_space(const SimConfig& cfg) { return ActionSpace(cfg); }

int observation_size(const SimConfig& cfg) {
  return 3 + (cfg.joint_obs ? 4 * (cfg.num_uavs - 1) : 0) + 3 * cfg.num_devices;
}

Vector observe(const WorldState& world, int u, const SimConfig& cfg) {
  const int U = static_cast<int>(world.uavs.size());
  const int M = static_cast<int>(world.devices.size());
  Vector o(3 + (cfg.joint_obs ? 4 * (U - 1) : 0) + 3 * M);
  const double s = cfg.area_side;
  Eigen::Index k = 0;
  const auto& me = world.uavs.at(static_cast<std::size_t>(u));
  o[k++] = me.pos.x / s;
  o[k++] = me.pos.y / s;
  o[k++] = me.residual / me.battery_cap;
  if (cfg.joint_obs) {
    for (const auto& other : world.uavs) {
      if (other.id == u) continue;
      o[k++] = other.pos.x / s;
      o[k++] = other.pos.y / s;
      o[k++] = other.residual / other.battery_cap;
      o[k++] = other.beta;
    }
  }
  for (const auto& d : world.devices) {
    o[k++] = d.pos.x / s;
    o[k++] = d.pos.y / s;
    o[k++] = d.residual / d.battery_cap;
  }
  return o;
}

double penalty(double use, double residual, double harvest, const SimConfig& cfg) {
  return use - residual - harvest <= 0.0 ? 0.0 : cfg.penalty;
}

double base_reward(std::span<const double> history, RewardMode mode) {
  if (history.empty()) throw std::invalid_argument("base_reward: empty history");
  if (mode == RewardMode::kIncremental) return history.back();
  double sum = 0.0;
  for (double e : history) sum += e;
  return sum;
}

void RewardNormalizer::observe(double efficiency) {
  if (count >= warmup) return;
  ++count;
  mean += (efficiency - mean) / static_cast<double>(count);
}

double RewardNormalizer::normalize(double value) const {
  return mean > 0.0 ? scale * value / mean : scale * value;
}

double shaped_reward(double reward, double pi0_prob, const SimConfig& cfg) {
  if (!(pi0_prob > 0.0)) throw std::domain_error("shaped_reward: shared policy probability must be positive");
  return reward + cfg.distill_weight / cfg.inverse_temperature * std::log(pi0_prob);
}

double soft_value(const Vector& q, const Vector& pi0, double mu) {
  const double mx = q.maxCoeff();
  const double sum = (pi0.array() * (mu * (q.array() - mx)).exp()).sum();
  return mx + std::log(sum) / mu;
}

Vector boltzmann_policy(const Vector& q, const Vector& pi0, double mu) {
  const double v = soft_value(q, pi0, mu);
  return pi0.array() * (mu * (q.array() - v)).exp();
}

double q_target(double reward, double pi0_prob, double next_value, bool done, const SimConfig& cfg) {
  return shaped_reward(reward, pi0_prob, cfg) + (done ? 0.0 : cfg.discount * next_value);
}

void ReplayBuffer::push(Transition t) {
  if (capacity_ == 0) return;
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
  if (data_.empty()) throw std::logic_error("ReplayBuffer::sample: buffer is empty");
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::vector<const Transition*> out(n);
  for (auto& p : out) p = &data_[pick(rng)];
  return out;
}

void ReplayBuffer::restore(std::vector<Transition> data, std::size_t next) {
  if (data.size() > capacity_ || (capacity_ > 0 && next >= capacity_)) {
    throw std::invalid_argument("ReplayBuffer::restore: inconsistent ring state");
  }
  data_ = std::move(data);
  next_ = next;
}

PolicyNets make_policy_nets(const SimConfig& cfg, int obs_size, int actions, std::mt19937_64& rng) {
  const std::vector<int> hidden(static_cast<std::size_t>(cfg.hidden_layers), cfg.hidden_units);
  PolicyNets n;
  n.shared = Mlp(obs_size, hidden, actions, rng);
  n.shared_opt = Adam(n.shared.parameter_count(), cfg.learning_rate);
  for (int u = 0; u < cfg.num_uavs; ++u) {
    n.task.emplace_back(obs_size, hidden, actions, rng);
    n.target.push_back(n.task.back());
    n.task_opt.emplace_back(n.task.back().parameter_count(), cfg.learning_rate);
  }
  return n;
}

Matrix shared_policy(const PolicyNets& nets, const Matrix& obs) {
  return softmax_columns(nets.shared.forward(obs));
}

Vector task_policy(const PolicyNets& nets, int u, const Vector& obs, const SimConfig& cfg) {
  const Vector pi0 = shared_policy(nets, obs).col(0);
  const Vector q = nets.task.at(static_cast<std::size_t>(u)).forward(obs).col(0);
  return boltzmann_policy(q, pi0, cfg.inverse_temperature);
}

double task_loss(const Mlp& q, const Matrix& obs, std::span<const int> actions, const Vector& targets,
                 Vector* grad) {
  const auto n = obs.cols();
  Mlp::Tape tape;
  const Matrix out = grad ? q.forward(obs, tape) : q.forward(obs);
  Matrix g = Matrix::Zero(out.rows(), n);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double err = out(actions[static_cast<std::size_t>(i)], i) - targets[i];
    loss += err * err;
    g(actions[static_cast<std::size_t>(i)], i) = 2.0 * err / static_cast<double>(n);
  }
  if (grad) *grad = q.backward(tape, g);
  return loss / static_cast<double>(n);
}

double shared_loss(const Mlp& pi0, const Matrix& obs, std::span<const int> actions, Vector* grad) {
  const auto n = obs.cols();
  Mlp::Tape tape;
  const Matrix logits = grad ? pi0.forward(obs, tape) : pi0.forward(obs);
  const Matrix logp = log_softmax_columns(logits);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) loss -= logp(actions[static_cast<std::size_t>(i)], i);
  loss /= static_cast<double>(n);
  if (grad) {
    Matrix g = logp.array().exp();
    for (Eigen::Index i = 0; i < n; ++i) g(actions[static_cast<std::size_t>(i)], i) -= 1.0;
    g /= static_cast<double>(n);
    *grad = pi0.backward(tape, g);
  }
  return loss;
}

Vector task_targets(std::span<const Transition* const> batch, const PolicyNets& nets, int u,
                    const SimConfig& cfg) {
  const Matrix next = stack(batch, true);
  const Matrix q = nets.target.at(static_cast<std::size_t>(u)).forward(next);
  const Matrix pi0 = shared_policy(nets, next);
  Vector y(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    const double v = batch[i]->done ? 0.0 : soft_value(q.col(j), pi0.col(j), cfg.inverse_temperature);
    y[j] = batch[i]->reward + cfg.discount * v;
  }
  return y;
}

double train_task_network(std::span<const Transition* const> batch, PolicyNets& nets, int u,
                          const SimConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("train_task_network: empty batch");
  const auto k = static_cast<std::size_t>(u);
  const Vector y = task_targets(batch, nets, u, cfg);
  const Matrix obs = stack(batch, false);
  std::vector<int> actions;
  actions.reserve(batch.size());
  for (const auto* t : batch) actions.push_back(t->action);

  Vector grad;
  const double loss = task_loss(nets.task[k], obs, actions, y, &grad);
  if (!std::isfinite(loss) || !grad.allFinite()) {
    std::ostringstream msg;
    msg << "train_task_network: non-finite loss " << loss << " for UAV " << u << " after "
        << nets.task_opt[k].t << " steps";
    throw std::runtime_error(msg.str());
  }
  nets.task_opt[k].step(nets.task[k].parameters(), grad);
  if (cfg.target_sync_interval > 0 && nets.task_opt[k].t % cfg.target_sync_interval == 0) {
    nets.target[k] = nets.task[k];
  }
  return loss;
}

double train_shared_network(std::span<const std::vector<const Transition*>> batches, PolicyNets& nets) {
  std::vector<const Transition*> all;
  for (const auto& b : batches) all.insert(all.end(), b.begin(), b.end());
  if (all.empty()) throw std::invalid_argument("train_shared_network: empty batch");
  const Matrix obs = stack(all, false);
  std::vector<int> actions;
  actions.reserve(all.size());
  for (const auto* t : all) actions.push_back(t->action);

  Vector grad;
  const double loss = shared_loss(nets.shared, obs, actions, &grad);
  if (!std::isfinite(loss) || !grad.allFinite()) {
    std::ostringstream msg;
    msg << "train_shared_network: non-finite loss " << loss << " after " << nets.shared_opt.t << " steps";
    throw std::runtime_error(msg.str());
  }
  nets.shared_opt.step(nets.shared.parameters(), grad);
  return loss;
}

}  // namespace wpmec
