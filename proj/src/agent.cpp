#include "ixa/agent.hpp"

#include <algorithm>
#include <cmath>

#include "ixa/error.hpp"

namespace ixa {

using nlohmann::json;

double ExplorationSchedule::at(std::int64_t step) const {
  if (decay_steps <= 0) return end;
  const double frac = std::min(1.0, static_cast<double>(step) / static_cast<double>(decay_steps));
  return start + (end - start) * frac;
}

void AgentConfig::validate() const {
  network.validate();
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("agent config field '" + field + "' " + why);
  };
  if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma", "must be in [0, 1)");
  if (!(margin > 0.0)) fail("margin", "must be > 0");
  if (!(margin_weight >= 0.0)) fail("margin_weight", "must be >= 0");
  if (!(learning_rate > 0.0)) fail("optimizer.lr", "must be > 0");
  if (batch_size < 1) fail("batch_size", "must be >= 1");
  if (!(demo_fraction >= 0.0 && demo_fraction <= 1.0)) fail("demo_fraction", "must be in [0, 1]");
  if (target_sync < 1) fail("target_sync", "must be >= 1");
  if (warmup < 0) fail("warmup", "must be >= 0");
  if (update_interval < 1) fail("update_interval", "must be >= 1");
  if (memory_capacity < 1) fail("memory.capacity", "must be >= 1");
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(exploration.start)) fail("exploration.start", "must be in [0, 1]");
  if (!in_unit(exploration.end)) fail("exploration.end", "must be in [0, 1]");
  if (exploration.decay_steps < 0) fail("exploration.decay_steps", "must be >= 0");
}

json to_json(const AgentConfig& cfg) {
  json network = json::array();
  network.push_back({{"type", "embedding"}, {"size", cfg.network.embed_dim}});
  for (const LayerSpec& l : cfg.network.hidden) {
    network.push_back({{"type", "dense"},
                       {"size", l.size},
                       {"activation", l.activation == Activation::Relu ? "relu" : "tanh"}});
  }
  return json{
      {"states", {{"length", cfg.network.input_length}, {"vocab_size", cfg.network.vocab_size}}},
      {"actions", {{"heads", cfg.network.heads}, {"options", cfg.network.head_width()}}},
      {"network", network},
      {"pooling", cfg.network.pooling == Pooling::Mean ? "mean" : "flatten"},
      {"optimizer", {{"type", "adam"}, {"lr", cfg.learning_rate}}},
      {"gamma", cfg.gamma},
      {"margin", cfg.margin},
      {"margin_weight", cfg.margin_weight},
      {"batch_size", cfg.batch_size},
      {"demo_fraction", cfg.demo_fraction},
      {"target", cfg.target_mode == TargetMode::Double ? "double" : "dqn"},
      {"target_sync", cfg.target_sync},
      {"warmup", cfg.warmup},
      {"update_interval", cfg.update_interval},
      {"memory", {{"capacity", cfg.memory_capacity}}},
      {"exploration",
       {{"type", "linear"},
        {"start", cfg.exploration.start},
        {"end", cfg.exploration.end},
        {"decay_steps", cfg.exploration.decay_steps}}},
      {"seed", cfg.seed}};
}

AgentConfig agent_config_from_json(const json& j, AgentConfig cfg) {
  if (!j.is_object()) throw ConfigError("agent config must be a JSON object");
  static const std::vector<std::string> kKnown = {
      "states", "actions", "network", "pooling", "optimizer", "gamma", "margin", "margin_weight",
      "batch_size", "demo_fraction", "target", "target_sync", "warmup", "update_interval",
      "memory", "exploration", "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(kKnown.begin(), kKnown.end(), it.key()) == kKnown.end()) {
      throw ConfigError("unknown agent config key '" + it.key() + "'");
    }
  }
  try {
    if (j.contains("states")) {
      const json& s = j["states"];
      if (s.contains("length")) cfg.network.input_length = s["length"].get<std::size_t>();
      if (s.contains("vocab_size")) cfg.network.vocab_size = s["vocab_size"].get<std::size_t>();
    }
    if (j.contains("actions")) {
      const json& a = j["actions"];
      if (a.contains("heads")) cfg.network.heads = a["heads"].get<std::size_t>();
      if (a.contains("options") && a["options"].get<std::size_t>() != cfg.network.head_width()) {
        throw ConfigError("agent config field 'actions.options' must equal 2*heads+1");
      }
    }
    if (j.contains("network")) {
      cfg.network.hidden.clear();
      for (const json& layer : j["network"]) {
        const std::string type = layer.at("type").get<std::string>();
        if (type == "embedding") {
          cfg.network.embed_dim = layer.at("size").get<std::size_t>();
        } else if (type == "dense") {
          const std::string act = layer.value("activation", "relu");
          if (act != "relu" && act != "tanh") {
            throw ConfigError("agent config field 'network.activation' must be relu or tanh");
          }
          cfg.network.hidden.push_back({layer.at("size").get<std::size_t>(),
                                        act == "relu" ? Activation::Relu : Activation::Tanh});
        } else {
          throw ConfigError("agent config field 'network.type' unknown layer '" + type + "'");
        }
      }
    }
    if (j.contains("pooling")) {
      const std::string p = j["pooling"].get<std::string>();
      if (p != "mean" && p != "flatten") throw ConfigError("agent config field 'pooling' must be mean or flatten");
      cfg.network.pooling = p == "mean" ? Pooling::Mean : Pooling::Flatten;
    }
    if (j.contains("optimizer")) {
      const json& o = j["optimizer"];
      if (o.value("type", "adam") != "adam") throw ConfigError("agent config field 'optimizer.type' must be adam");
      if (o.contains("lr")) cfg.learning_rate = o["lr"].get<double>();
    }
    if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
    if (j.contains("margin")) cfg.margin = j["margin"].get<double>();
    if (j.contains("margin_weight")) cfg.margin_weight = j["margin_weight"].get<double>();
    if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("demo_fraction")) cfg.demo_fraction = j["demo_fraction"].get<double>();
    if (j.contains("target")) {
      const std::string t = j["target"].get<std::string>();
      if (t != "double" && t != "dqn") throw ConfigError("agent config field 'target' must be double or dqn");
      cfg.target_mode = t == "double" ? TargetMode::Double : TargetMode::Dqn;
    }
    if (j.contains("target_sync")) cfg.target_sync = j["target_sync"].get<std::int64_t>();
    if (j.contains("warmup")) cfg.warmup = j["warmup"].get<std::int64_t>();
    if (j.contains("update_interval")) cfg.update_interval = j["update_interval"].get<std::int64_t>();
    if (j.contains("memory")) cfg.memory_capacity = j["memory"].at("capacity").get<std::size_t>();
    if (j.contains("exploration")) {
      const json& e = j["exploration"];
      if (e.contains("start")) cfg.exploration.start = e["start"].get<double>();
      if (e.contains("end")) cfg.exploration.end = e["end"].get<double>();
      if (e.contains("decay_steps")) cfg.exploration.decay_steps = e["decay_steps"].get<std::int64_t>();
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("agent config: ") + e.what());
  }
  return cfg;
}

int argmax(std::span<const double> values) {
  int best = 0;
  for (std::size_t a = 1; a < values.size(); ++a) {
    if (values[a] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(a);
  }
  return best;
}

double margin_loss(std::span<const double> q, int expert_action, double margin) {
  double best = -INFINITY;
  for (std::size_t a = 0; a < q.size(); ++a) {
    const double l = static_cast<int>(a) == expert_action ? 0.0 : margin;
    best = std::max(best, q[a] + l);
  }
  return best - q[static_cast<std::size_t>(expert_action)];
}

std::vector<double> compute_targets(std::span<const Transition> batch, const NetworkSpec& spec,
                                    const Params& online, const Params& target, double gamma,
                                    TargetMode mode) {
  std::vector<StateTokens> next;
  next.reserve(batch.size());
  for (const Transition& t : batch) next.push_back(t.next_state);
  const QValues q_target = forward_batch(spec, target, next).q;
  std::optional<QValues> q_online;
  if (mode == TargetMode::Double) q_online = forward_batch(spec, online, next).q;

  std::vector<double> y(batch.size() * spec.heads);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    for (std::size_t h = 0; h < spec.heads; ++h) {
      double& out = y[b * spec.heads + h];
      if (batch[b].terminal) {
        out = batch[b].reward;
        continue;
      }
      double bootstrap;
      if (mode == TargetMode::Double) {
        const int a_star = argmax(q_online->head(b, h));
        bootstrap = q_target.at(b, h, static_cast<std::size_t>(a_star));
      } else {
        auto head = q_target.head(b, h);
        bootstrap = *std::max_element(head.begin(), head.end());
      }
      out = batch[b].reward + gamma * bootstrap;
    }
  }
  return y;
}

Agent::Agent(AgentConfig cfg)
    : cfg_(std::move(cfg)), memories_(cfg_.memory_capacity) {
  cfg_.validate();
  std::seed_seq init_seq{cfg_.seed, std::uint64_t{1}};
  std::seed_seq explore_seq{cfg_.seed, std::uint64_t{2}};
  std::seed_seq sample_seq{cfg_.seed, std::uint64_t{3}};
  std::mt19937_64 init_rng(init_seq);
  explore_rng_.seed(explore_seq);
  sample_rng_.seed(sample_seq);
  params_ = init_params(cfg_.network, init_rng);
  target_ = params_;
  adam_ = make_adam(cfg_.network, cfg_.learning_rate);
}

QValues Agent::q_values(const StateTokens& state) const {
  return forward(cfg_.network, params_, state);
}

ActionVec Agent::act(const StateTokens& state, bool explore) {
  if (pending_) {
    pending_->next_state = state;
    Transition done = std::move(*pending_);
    pending_.reset();
    observe(done);
  }
  const QValues q = q_values(state);
  ActionVec action{std::vector<int>(cfg_.network.heads, 0)};
  const double eps = epsilon();
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> any(0, static_cast<int>(cfg_.network.head_width()) - 1);
  for (std::size_t h = 0; h < cfg_.network.heads; ++h) {
    action.heads[h] = argmax(q.head(0, h));
    if (explore && coin(explore_rng_) < eps) action.heads[h] = any(explore_rng_);
  }
  if (explore) ++explore_steps_;
  last_act_ = std::make_pair(state, action);
  return action;
}

void Agent::observe(double reward, bool terminal) {
  if (!last_act_) throw Error("observe() without a preceding act()");
  Transition t{last_act_->first, last_act_->second, reward, last_act_->first, terminal, false};
  last_act_.reset();
  if (terminal) {
    observe(t);
  } else {
    pending_ = std::move(t);
  }
}

void Agent::store(Transition t) {
  t.is_demo = false;
  memories_.online.push(std::move(t));
}

void Agent::observe(const Transition& t) {
  store(t);
  ++observed_;
  if (observed_ >= cfg_.warmup && observed_ % cfg_.update_interval == 0) training_update();
}

std::size_t Agent::import_demonstrations(std::span<const Transition> demos) {
  for (Transition t : demos) {
    t.is_demo = true;
    memories_.demo.push_back(std::move(t));
  }
  return demos.size();
}

std::vector<Transition> Agent::sample_batch(double demo_fraction) {
  const std::size_t b = cfg_.batch_size;
  const auto& demo = memories_.demo;
  const auto& online = memories_.online;
  std::size_t n_demo = demo.empty() ? 0 : static_cast<std::size_t>(std::ceil(demo_fraction * static_cast<double>(b)));
  n_demo = std::min(n_demo, b);
  if (online.empty()) n_demo = b;
  const std::size_t n_online = b - n_demo;

  std::vector<Transition> batch;
  batch.reserve(b);
  if (n_demo > 0) {
    std::uniform_int_distribution<std::size_t> pick(0, demo.size() - 1);
    for (std::size_t i = 0; i < n_demo; ++i) batch.push_back(demo[pick(sample_rng_)]);
  }
  if (n_online > 0) {
    std::uniform_int_distribution<std::size_t> pick(0, online.size() - 1);
    for (std::size_t i = 0; i < n_online; ++i) batch.push_back(online.at(pick(sample_rng_)));
  }
  return batch;
}

std::optional<LossReport> Agent::training_update() { return training_update(cfg_.demo_fraction); }

std::optional<LossReport> Agent::training_update(double demo_fraction) {
  if (memories_.demo.size() + memories_.online.size() < cfg_.batch_size) return std::nullopt;
  if (demo_fraction >= 1.0 && memories_.demo.empty()) return std::nullopt;
  const std::vector<Transition> batch = sample_batch(demo_fraction);
  return update_on_batch(batch);
}

LossReport Agent::evaluate_loss(std::span<const Transition> batch, std::vector<double>* dq) const {
  std::vector<StateTokens> states;
  states.reserve(batch.size());
  for (const Transition& t : batch) states.push_back(t.state);
  return loss_on(batch, forward_batch(cfg_.network, params_, states).q, dq);
}

LossReport Agent::loss_on(std::span<const Transition> batch, const QValues& q,
                          std::vector<double>* dq) const {
  const NetworkSpec& spec = cfg_.network;
  const std::vector<double> y =
      compute_targets(batch, spec, params_, target_, cfg_.gamma, cfg_.target_mode);

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  if (dq) dq->assign(q.values.size(), 0.0);
  LossReport report;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Transition& t = batch[b];
    for (std::size_t h = 0; h < spec.heads; ++h) {
      const auto a = static_cast<std::size_t>(t.action.heads.at(h));
      const std::size_t base = (b * spec.heads + h) * spec.head_width();
      const double td = y[b * spec.heads + h] - q.values[base + a];
      report.td += td * td;
      if (dq) (*dq)[base + a] += -2.0 * td * inv_b;
      if (t.is_demo) {
        auto head = q.head(b, h);
        report.margin += margin_loss(head, static_cast<int>(a), cfg_.margin);
        if (dq && cfg_.margin_weight != 0.0) {
          // Subgradient: +1 at the margin-augmented argmax, -1 at the expert action.
          std::size_t best = 0;
          double best_v = -INFINITY;
          for (std::size_t k = 0; k < head.size(); ++k) {
            const double v = head[k] + (k == a ? 0.0 : cfg_.margin);
            if (v > best_v) {
              best_v = v;
              best = k;
            }
          }
          (*dq)[base + best] += cfg_.margin_weight * inv_b;
          (*dq)[base + a] -= cfg_.margin_weight * inv_b;
        }
      }
    }
  }
  report.td *= inv_b;
  report.margin *= inv_b;
  report.total = report.td + cfg_.margin_weight * report.margin;
  return report;
}

LossReport Agent::update_on_batch(std::span<const Transition> batch) {
  if (batch.empty()) throw Error("update on an empty batch");
  std::vector<StateTokens> states;
  states.reserve(batch.size());
  for (const Transition& t : batch) states.push_back(t.state);

  const ForwardCache cache = forward_batch(cfg_.network, params_, states);
  std::vector<double> dq;
  const LossReport report = loss_on(batch, cache.q, &dq);
  const Gradients grads = backward(cfg_.network, params_, cache, dq);
  adam_step(params_, grads, adam_);
  ++updates_;
  if (updates_ % cfg_.target_sync == 0) sync_target();
  last_loss_ = report;
  return report;
}

PretrainHistory Agent::pretrain(std::int64_t steps, std::int64_t eval_every,
                                std::optional<double> target_accuracy) {
  if (memories_.demo.empty()) throw Error("pretraining requires demonstrations");
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
  PretrainHistory history;
  LossReport last;
  for (std::int64_t step = 1; step <= steps; ++step) {
    const std::vector<Transition> batch = sample_batch(1.0);
    last = update_on_batch(batch);
    ++history.updates;
    if (step % eval_every == 0 || step == steps) {
      const double acc = demo_accuracy();
      history.points.push_back({step, acc, last.td, last.margin});
      if (target_accuracy && acc >= *target_accuracy) {
        history.early_stopped = true;
        break;
      }
    }
  }
  return history;
}

double Agent::demo_accuracy() const {
  const auto& demo = memories_.demo;
  if (demo.empty()) return 0.0;
  constexpr std::size_t kChunk = 256;
  std::size_t correct = 0;
  std::vector<StateTokens> states;
  for (std::size_t start = 0; start < demo.size(); start += kChunk) {
    const std::size_t end = std::min(demo.size(), start + kChunk);
    states.clear();
    for (std::size_t i = start; i < end; ++i) states.push_back(demo[i].state);
    const QValues q = forward_batch(cfg_.network, params_, states).q;
    for (std::size_t i = start; i < end; ++i) {
      bool all = true;
      for (std::size_t h = 0; h < cfg_.network.heads && all; ++h) {
        all = argmax(q.head(i - start, h)) == demo[i].action.heads[h];
      }
      correct += all ? 1 : 0;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(demo.size());
}

void Agent::load_params(const Params& params) {
  if (params.parameter_count() != parameter_count(cfg_.network) ||
      params.tensors.size() != params_.tensors.size()) {
    throw Error("loaded parameters do not match the agent's network");
  }
  params_ = params;
  target_ = params;
  adam_ = make_adam(cfg_.network, cfg_.learning_rate);
}

}  // namespace ixa
