#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "json.hpp"
#include "ixa/adam.hpp"
#include "ixa/network.hpp"
#include "ixa/replay.hpp"

namespace ixa {

enum class TargetMode { Dqn, Double };

/// Linear epsilon schedule over explore-mode act() calls.
struct ExplorationSchedule {
  double start = 1.0;
  double end = 0.05;
  std::int64_t decay_steps = 10000;

  double at(std::int64_t step) const;

  static ExplorationSchedule pretrained() { return {0.2, 0.01, 2000}; }
  static ExplorationSchedule scratch() { return {1.0, 0.05, 10000}; }
};

/// Declarative agent description; JSON form:
/// {"states": {"length": L, "vocab_size": V},
///  "actions": {"heads": k, "options": 2k+1},
///  "network": [{"type": "embedding", "size": 32},
///              {"type": "dense", "size": 128, "activation": "relu"}],
///  "pooling": "flatten",
///  "optimizer": {"type": "adam", "lr": 5e-4},
///  "gamma": .., "margin": .., "margin_weight": .., "batch_size": ..,
///  "demo_fraction": .., "target": "double"|"dqn", "target_sync": ..,
///  "warmup": .., "update_interval": .., "memory": {"capacity": ..},
///  "exploration": {"type": "linear", "start": .., "end": .., "decay_steps": ..},
///  "seed": ..}
struct AgentConfig {
  NetworkSpec network;
  double learning_rate = 5e-4;
  double gamma = 0.95;
  double margin = 0.1;
  double margin_weight = 1.0;
  std::size_t batch_size = 32;
  double demo_fraction = 0.25;
  TargetMode target_mode = TargetMode::Double;
  std::int64_t target_sync = 100;
  std::int64_t warmup = 32;
  std::int64_t update_interval = 1;
  std::size_t memory_capacity = 50000;
  ExplorationSchedule exploration = ExplorationSchedule::scratch();
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

nlohmann::json to_json(const AgentConfig& cfg);
/// Missing keys keep the values already in `base`.
AgentConfig agent_config_from_json(const nlohmann::json& j, AgentConfig base = {});

struct LossReport {
  double td = 0.0;      // mean over the batch of the summed per-head squared TD error
  double margin = 0.0;  // mean over the batch of the summed per-head J_E (demo rows only)
  double total = 0.0;   // td + margin_weight * margin
};

struct AccuracyPoint {
  std::int64_t update = 0;
  double accuracy = 0.0;
  double loss_td = 0.0;
  double loss_margin = 0.0;
};

struct PretrainHistory {
  std::vector<AccuracyPoint> points;
  bool early_stopped = false;
  std::int64_t updates = 0;
};

/// J_E = max_a [q(a) + l(a)] - q(a_E), l(a_E) = 0, l(a) = margin otherwise.
double margin_loss(std::span<const double> q, int expert_action, double margin);

/// Lowest index among the maxima.
int argmax(std::span<const double> values);

/// Per (transition, head) targets, row-major batch x heads.
std::vector<double> compute_targets(std::span<const Transition> batch, const NetworkSpec& spec,
                                    const Params& online, const Params& target, double gamma,
                                    TargetMode mode);

/// Deep Q-learning from demonstrations over k independent action heads.
class Agent {
 public:
  explicit Agent(AgentConfig cfg);

  const AgentConfig& config() const { return cfg_; }

  /// Per-head argmax; with `explore`, each head is replaced by a uniform
  /// random action with probability epsilon().
  ActionVec act(const StateTokens& state, bool explore);
  /// Completes the transition begun by the last act(). A non-terminal
  /// transition is stored once the next act() supplies its successor state.
  void observe(double reward, bool terminal);
  /// Stores `t` in online memory and runs any due training update.
  void observe(const Transition& t);

  std::size_t import_demonstrations(std::span<const Transition> demos);
  /// Demo-only updates; stops early at the first evaluation reaching
  /// `target_accuracy`. Throws Error if there are no demonstrations.
  PretrainHistory pretrain(std::int64_t steps, std::int64_t eval_every,
                           std::optional<double> target_accuracy = std::nullopt);

  /// One gradient step on a batch mixing demo and online samples.
  std::optional<LossReport> training_update();
  std::optional<LossReport> training_update(double demo_fraction);
  /// Loss and update on an explicit batch (used by the sampling path and tests).
  LossReport update_on_batch(std::span<const Transition> batch);
  /// Loss without updating.
  LossReport evaluate_loss(std::span<const Transition> batch, std::vector<double>* dq = nullptr) const;

  /// Fraction of demonstrations whose every head's argmax equals the demonstrated action.
  double demo_accuracy() const;

  QValues q_values(const StateTokens& state) const;
  double epsilon() const { return cfg_.exploration.at(explore_steps_); }

  const Params& params() const { return params_; }
  const Params& target_params() const { return target_; }
  /// Replaces both networks (e.g. from a model file) and resets the optimizer.
  void load_params(const Params& params);
  void sync_target() { target_ = params_; }

  const ReplayMemories& memories() const { return memories_; }
  std::int64_t observed() const { return observed_; }
  std::int64_t updates() const { return updates_; }
  const std::optional<LossReport>& last_loss() const { return last_loss_; }

 private:
  std::vector<Transition> sample_batch(double demo_fraction);
  LossReport loss_on(std::span<const Transition> batch, const QValues& q,
                     std::vector<double>* dq) const;
  void store(Transition t);

  AgentConfig cfg_;
  Params params_;
  Params target_;
  AdamState adam_;
  ReplayMemories memories_;
  std::mt19937_64 explore_rng_;
  std::mt19937_64 sample_rng_;
  std::int64_t explore_steps_ = 0;
  std::int64_t observed_ = 0;
  std::int64_t updates_ = 0;
  std::optional<LossReport> last_loss_;

  // act()/observe(reward, terminal) bookkeeping.
  std::optional<std::pair<StateTokens, ActionVec>> last_act_;
  std::optional<Transition> pending_;
};

}  // namespace ixa
