#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ier/env.hpp"
#include "ier/mlp.hpp"
#include "ier/replay.hpp"

namespace ier {

enum class AgentVariant { A1, A2, A3, A4, A5 };

const char* to_string(AgentVariant v);
/// Throws ConfigError for anything but "A1".."A5".
AgentVariant parse_variant(std::string_view name);

/// Scenario mix and observation flags an agent is trained with.
struct TrainSetup {
  std::vector<std::string> scenarios;
  bool occlusions = false;
  bool include_ibit = false;
};

TrainSetup variant_setup(AgentVariant v);

struct TrainConfig {
  double lr = 2e-4;
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_final = 0.05;
  double epsilon_fraction = 0.3;
  std::size_t buffer_size = 50'000;
  std::size_t batch_size = 256;
  long total_steps = 5'000'000;
  double per_alpha = 0.6;
  double per_beta_start = 0.4;
  double per_beta_end = 1.0;
  double priority_eps = 1e-6;
  long target_sync = 0;  // 0: derived from total_steps
  std::size_t warmup = 1'000;
  std::vector<int> hidden{60, 60};
  long log_interval = 1'000;
  long eval_interval = 0;  // 0 disables periodic evaluation
  int eval_episodes = 50;
};

/// Linear from epsilon_start at step 0 to epsilon_final at
/// epsilon_fraction * total_steps, constant afterwards.
double epsilon(long step, const TrainConfig& cfg);
/// PER exponent annealed linearly over the full budget.
double per_beta(long step, const TrainConfig& cfg);
/// cfg.target_sync when positive, else 0.2 % of total_steps (10,000 at 5M),
/// at least 1.
long target_sync_interval(const TrainConfig& cfg);

/// y = r for terminal transitions, else r + gamma * Q_target(s', argmax_a Q_online(s', a)).
/// `next_obs` holds one column per transition.
std::vector<double> double_q_target(std::span<const double> rewards, std::span<const char> terminal,
                                    const Eigen::MatrixXd& next_obs, const QNetwork& online,
                                    const QNetwork& target, double gamma);

struct TrainLogRow {
  long step = 0;
  double epsilon = 0.0;
  double loss = 0.0;      // mean loss over gradient steps since the previous row
  std::optional<double> eval_sr;
};

class Trainer {
 public:
  using Evaluator = std::function<double(const QNetwork&)>;

  /// Throws ConfigError on an empty or unknown scenario mix.
  Trainer(std::vector<const Scenario*> scenarios, TrainSetup setup, TrainConfig cfg, EnvConfig env_cfg,
          std::uint64_t seed);

  void set_evaluator(Evaluator e) { evaluator_ = std::move(e); }

  /// One environment step plus, after warm-up, one gradient step.
  void step();
  /// Runs until `steps()` reaches `until`, calling `on_log` for every log row.
  void run(long until, const std::function<void(const TrainLogRow&)>& on_log = {});

  long steps() const { return step_; }
  long gradient_steps() const { return grad_steps_; }
  long episodes() const { return episodes_; }
  const QNetwork& online() const { return online_; }
  const QNetwork& target() const { return target_; }
  const PrioritizedReplay& replay() const { return replay_; }
  const TrainConfig& config() const { return cfg_; }
  const TrainSetup& setup() const { return setup_; }
  const std::vector<TrainLogRow>& log() const { return log_; }
  /// Names of the scenarios drawn for each started episode.
  const std::vector<std::string>& episode_scenarios() const { return episode_scenarios_; }

 private:
  void start_episode();
  double learn();

  std::vector<const Scenario*> scenarios_;
  TrainSetup setup_;
  TrainConfig cfg_;
  std::uint64_t seed_;
  Rng rng_;
  Environment env_;
  QNetwork online_;
  QNetwork target_;
  AdamOptimizer adam_;
  PrioritizedReplay replay_;
  Evaluator evaluator_;

  long step_ = 0;
  long grad_steps_ = 0;
  long episodes_ = 0;
  bool need_reset_ = true;
  std::vector<double> obs_;
  double loss_acc_ = 0.0;
  long loss_count_ = 0;
  std::vector<TrainLogRow> log_;
  std::vector<std::string> episode_scenarios_;
};

struct Checkpoint {
  AgentVariant variant = AgentVariant::A1;
  bool occlusions = false;
  bool include_ibit = false;
  std::uint64_t seed = 0;
  long steps = 0;
  QNetwork network;
};

inline constexpr const char* kCheckpointFormat = "ier-dqn-checkpoint";
inline constexpr int kCheckpointVersion = 1;

std::string dump_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::string_view text);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file);
/// Throws ConfigError on a malformed file or inconsistent shapes.
Checkpoint load_checkpoint(const std::filesystem::path& file);

void write_train_log(const std::vector<TrainLogRow>& rows, const std::filesystem::path& file);

}  // namespace ier
