#include "ier/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "ier/error.hpp"

namespace ier {

namespace {

using nlohmann::json;

constexpr std::uint64_t kTrainStream = 0x747261696e;  // "train"
constexpr std::uint64_t kInitStream = 0x696e6974;     // "init"

std::vector<float> to_float(const std::vector<double>& v) { return {v.begin(), v.end()}; }

}  // namespace

const char* to_string(AgentVariant v) {
  switch (v) {
    case AgentVariant::A1: return "A1";
    case AgentVariant::A2: return "A2";
    case AgentVariant::A3: return "A3";
    case AgentVariant::A4: return "A4";
    case AgentVariant::A5: return "A5";
  }
  return "?";
}

AgentVariant parse_variant(std::string_view name) {
  for (auto v : {AgentVariant::A1, AgentVariant::A2, AgentVariant::A3, AgentVariant::A4, AgentVariant::A5}) {
    if (name == to_string(v)) return v;
  }
  throw ConfigError(fmt::format("unknown agent variant '{}' (expected A1..A5)", name));
}

TrainSetup variant_setup(AgentVariant v) {
  switch (v) {
    case AgentVariant::A1: return {{"Sc02"}, false, false};
    case AgentVariant::A2: return {{"Sc07"}, false, false};
    case AgentVariant::A3: return {{"Sc02", "Sc07"}, false, false};
    case AgentVariant::A4: return {{"Sc07"}, true, false};
    case AgentVariant::A5: return {{"Sc07"}, false, true};
  }
  return {};
}

double epsilon(long step, const TrainConfig& cfg) {
  const double horizon = cfg.epsilon_fraction * static_cast<double>(cfg.total_steps);
  if (step <= 0) return cfg.epsilon_start;
  if (static_cast<double>(step) >= horizon) return cfg.epsilon_final;
  const double frac = static_cast<double>(step) / horizon;
  return cfg.epsilon_start + frac * (cfg.epsilon_final - cfg.epsilon_start);
}

double per_beta(long step, const TrainConfig& cfg) {
  if (cfg.total_steps <= 0) return cfg.per_beta_end;
  const double frac = std::clamp(static_cast<double>(step) / static_cast<double>(cfg.total_steps), 0.0, 1.0);
  return cfg.per_beta_start + frac * (cfg.per_beta_end - cfg.per_beta_start);
}

long target_sync_interval(const TrainConfig& cfg) {
  if (cfg.target_sync > 0) return cfg.target_sync;
  return std::max(1L, std::lround(0.002 * static_cast<double>(cfg.total_steps)));
}

std::vector<double> double_q_target(std::span<const double> rewards, std::span<const char> terminal,
                                    const Eigen::MatrixXd& next_obs, const QNetwork& online,
                                    const QNetwork& target, double gamma) {
  const auto n = rewards.size();
  if (terminal.size() != n || static_cast<std::size_t>(next_obs.cols()) != n) {
    throw std::invalid_argument("double_q_target: batch components differ in size");
  }
  const Eigen::MatrixXd q_online = online.forward(next_obs);
  const Eigen::MatrixXd q_target = target.forward(next_obs);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (terminal[i]) {
      y[i] = rewards[i];
      continue;
    }
    const auto col = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd q = q_online.col(col);
    const int a = argmax(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())));
    y[i] = rewards[i] + gamma * q_target(a, col);
  }
  return y;
}

Trainer::Trainer(std::vector<const Scenario*> scenarios, TrainSetup setup, TrainConfig cfg, EnvConfig env_cfg,
                 std::uint64_t seed)
    : scenarios_(std::move(scenarios)),
      setup_(std::move(setup)),
      cfg_(std::move(cfg)),
      seed_(seed),
      rng_(mix_seed(seed, kTrainStream)),
      adam_(cfg_.lr),
      replay_(cfg_.buffer_size, cfg_.per_alpha, cfg_.priority_eps) {
  if (scenarios_.empty()) throw ConfigError("training needs at least one scenario");
  if (!(cfg_.gamma >= 0.0 && cfg_.gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (cfg_.batch_size == 0 || cfg_.buffer_size == 0) throw ConfigError("batch and buffer sizes must be positive");
  if (cfg_.target_sync < 0) throw ConfigError("target sync interval must not be negative");
  env_cfg.occlusions = setup_.occlusions;
  env_cfg.include_ibit = setup_.include_ibit;
  env_ = Environment(env_cfg);
  Rng init(mix_seed(seed, kInitStream));
  online_ = QNetwork(static_cast<int>(observation_size(setup_.include_ibit)), cfg_.hidden, kNumActions, init);
  target_ = online_;
}

void Trainer::start_episode() {
  const Scenario* sc = scenarios_[uniform_index(rng_, scenarios_.size())];
  const auto ep_seed = mix_seed(mix_seed(seed_, kTrainStream + 1), static_cast<std::uint64_t>(episodes_));
  obs_ = env_.reset(*sc, ep_seed);
  episode_scenarios_.push_back(sc->name());
  ++episodes_;
  need_reset_ = false;
}

void Trainer::step() {
  if (need_reset_) start_episode();

  int action;
  if (uniform01(rng_) < epsilon(step_, cfg_)) {
    action = static_cast<int>(uniform_index(rng_, kNumActions));
  } else {
    action = greedy_action_index(online_, obs_);
  }
  StepResult r = env_.step(action_from_index(action));
  const bool terminal = r.outcome == EpisodeOutcome::success || r.outcome == EpisodeOutcome::collision ||
                        r.outcome == EpisodeOutcome::near_collision;
  replay_.add({to_float(obs_), action, r.reward, to_float(r.observation), terminal});
  obs_ = std::move(r.observation);
  need_reset_ = r.terminal;
  ++step_;

  if (replay_.size() >= cfg_.warmup) {
    loss_acc_ += learn();
    ++loss_count_;
  }
  if (step_ % target_sync_interval(cfg_) == 0) target_ = online_;
}

double Trainer::learn() {
  const SampledBatch batch = replay_.sample(cfg_.batch_size, per_beta(step_, cfg_), rng_);
  const auto n = batch.items.size();
  const auto dim = static_cast<Eigen::Index>(online_.input_size());
  Eigen::MatrixXd obs(dim, static_cast<Eigen::Index>(n));
  Eigen::MatrixXd next(dim, static_cast<Eigen::Index>(n));
  std::vector<int> actions(n);
  std::vector<double> rewards(n);
  std::vector<char> terminal(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& t = *batch.items[i];
    const auto col = static_cast<Eigen::Index>(i);
    obs.col(col) = Eigen::Map<const Eigen::VectorXf>(t.obs.data(), dim).cast<double>();
    next.col(col) = Eigen::Map<const Eigen::VectorXf>(t.next_obs.data(), dim).cast<double>();
    actions[i] = t.action;
    rewards[i] = t.reward;
    terminal[i] = t.terminal ? 1 : 0;
  }
  const auto targets = double_q_target(rewards, terminal, next, online_, target_, cfg_.gamma);
  std::vector<DenseLayer> grads;
  std::vector<double> td;
  const double loss = td_loss(online_, obs, actions, targets, batch.weights, &grads, &td);
  adam_.step(online_, grads);
  replay_.update_priorities(batch.indices, td);
  ++grad_steps_;
  return loss;
}

void Trainer::run(long until, const std::function<void(const TrainLogRow&)>& on_log) {
  while (step_ < until) {
    step();
    const bool log_now = cfg_.log_interval > 0 && step_ % cfg_.log_interval == 0;
    const bool eval_now = evaluator_ && cfg_.eval_interval > 0 && step_ % cfg_.eval_interval == 0;
    if (!log_now && !eval_now && step_ != until) continue;
    TrainLogRow row;
    row.step = step_;
    row.epsilon = epsilon(step_, cfg_);
    row.loss = loss_count_ > 0 ? loss_acc_ / static_cast<double>(loss_count_) : 0.0;
    if (eval_now) row.eval_sr = evaluator_(online_);
    loss_acc_ = 0.0;
    loss_count_ = 0;
    log_.push_back(row);
    if (on_log) on_log(row);
  }
}

std::string dump_checkpoint(const Checkpoint& ckpt) {
  json layers = json::array();
  for (const auto& l : ckpt.network.layers()) {
    json w = json::array();
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.push_back(l.weight(r, c));
    }
    layers.push_back({{"rows", l.weight.rows()},
                      {"cols", l.weight.cols()},
                      {"weight", std::move(w)},
                      {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
  }
  json doc = {{"format", kCheckpointFormat},
              {"version", kCheckpointVersion},
              {"variant", to_string(ckpt.variant)},
              {"occlusions", ckpt.occlusions},
              {"include_ibit", ckpt.include_ibit},
              {"seed", ckpt.seed},
              {"steps", ckpt.steps},
              {"activation", "relu"},
              {"layers", std::move(layers)}};
  return doc.dump(1);
}

Checkpoint parse_checkpoint(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != kCheckpointFormat) throw ConfigError("not a checkpoint file");
    if (doc.at("version").get<int>() != kCheckpointVersion) throw ConfigError("unsupported checkpoint version");
    Checkpoint ckpt;
    ckpt.variant = parse_variant(doc.at("variant").get<std::string>());
    ckpt.occlusions = doc.at("occlusions").get<bool>();
    ckpt.include_ibit = doc.at("include_ibit").get<bool>();
    ckpt.seed = doc.at("seed").get<std::uint64_t>();
    ckpt.steps = doc.at("steps").get<long>();
    std::vector<DenseLayer> layers;
    for (const auto& l : doc.at("layers")) {
      const auto rows = l.at("rows").get<Eigen::Index>();
      const auto cols = l.at("cols").get<Eigen::Index>();
      const auto w = l.at("weight").get<std::vector<double>>();
      const auto b = l.at("bias").get<std::vector<double>>();
      if (rows <= 0 || cols <= 0 || static_cast<Eigen::Index>(w.size()) != rows * cols ||
          static_cast<Eigen::Index>(b.size()) != rows) {
        throw ConfigError("checkpoint layer shape mismatch");
      }
      DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::Map<const Eigen::VectorXd>(b.data(), rows)};
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) layer.weight(r, c) = w[static_cast<std::size_t>(r * cols + c)];
      }
      layers.push_back(std::move(layer));
    }
    ckpt.network = QNetwork(std::move(layers));
    if (static_cast<std::size_t>(ckpt.network.input_size()) != observation_size(ckpt.include_ibit)) {
      throw ConfigError("checkpoint input width does not match its ibit flag");
    }
    if (ckpt.network.output_size() != kNumActions) throw ConfigError("checkpoint must have 3 outputs");
    return ckpt;
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("malformed checkpoint: {}", e.what()));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("malformed checkpoint: {}", e.what()));
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError(fmt::format("cannot write {}", file.string()));
  out << dump_checkpoint(ckpt) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(fmt::format("cannot read checkpoint {}", file.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

void write_train_log(const std::vector<TrainLogRow>& rows, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError(fmt::format("cannot write {}", file.string()));
  out << "step,epsilon,loss,eval_sr\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{:.6f},{:.6g},{}\n", r.step, r.epsilon, r.loss,
                       r.eval_sr ? fmt::format("{:.4f}", *r.eval_sr) : std::string());
  }
}

}  // namespace ier
