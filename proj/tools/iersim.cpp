// Command-line front end: train, evaluate, rollout, encode, scenarios.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ier/config.hpp"
#include "ier/dqn.hpp"
#include "ier/error.hpp"
#include "ier/eval.hpp"
#include "ier/policy.hpp"
#include "ier/scenario_io.hpp"

namespace {

using namespace ier;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Raised for bad names and conflicting flags; maps to the usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_file;
  std::string data_dir;
};

RunConfig run_config(const Common& c) {
  return c.config_file.empty() ? RunConfig{} : load_run_config(c.config_file);
}

ScenarioLibrary library(const Common& c) {
  return ScenarioLibrary::load(c.data_dir.empty() ? default_scenario_dir() : std::filesystem::path(c.data_dir));
}

const Scenario& scenario_by_name(const ScenarioLibrary& lib, const std::string& name) {
  if (!lib.contains(name)) throw UsageError(fmt::format("unknown scenario '{}'", name));
  return lib.get(name);
}

std::vector<const Scenario*> scenarios_by_selection(const ScenarioLibrary& lib, const std::string& sel) {
  try {
    return lib.select(sel);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

bool on_off(const std::string& v) { return v == "on"; }

std::unique_ptr<Policy> make_policy(const std::string& agent, const RunConfig& cfg) {
  if (agent == "ttc") return std::make_unique<TTCPolicy>(cfg.ttc);
  if (agent == "random") return std::make_unique<RandomPolicy>();
  if (agent == "accelerate") return std::make_unique<ConstantPolicy>(Action::accelerate);
  if (agent == "maintain") return std::make_unique<ConstantPolicy>(Action::maintain);
  if (agent == "decelerate") return std::make_unique<ConstantPolicy>(Action::decelerate);
  if (!std::filesystem::exists(agent)) {
    throw UsageError(fmt::format(
        "unknown agent '{}' (expected ttc, random, accelerate, maintain, decelerate or a checkpoint file)", agent));
  }
  Checkpoint ckpt = load_checkpoint(agent);
  auto net = std::make_shared<const QNetwork>(std::move(ckpt.network));
  return std::make_unique<GreedyQPolicy>(net, ckpt.include_ibit, to_string(ckpt.variant));
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path));
  out << text;
}

struct TrainArgs {
  std::string agent;
  long steps = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string log;
  std::string scenarios;
};

int cmd_train(const Common& common, const TrainArgs& a) {
  const RunConfig cfg = run_config(common);
  const auto lib = library(common);
  const AgentVariant variant = parse_variant(a.agent);
  TrainSetup setup = variant_setup(variant);
  if (!a.scenarios.empty()) {
    setup.scenarios.clear();
    for (const auto* s : scenarios_by_selection(lib, a.scenarios)) setup.scenarios.push_back(s->name());
  }
  std::vector<const Scenario*> mix;
  for (const auto& name : setup.scenarios) mix.push_back(&scenario_by_name(lib, name));

  TrainConfig tcfg = cfg.train;
  const long steps = a.steps > 0 ? a.steps : tcfg.total_steps;
  tcfg.total_steps = steps;
  Trainer trainer(mix, setup, tcfg, cfg.env, a.seed);
  if (tcfg.eval_interval > 0) {
    EvalOptions opts;
    opts.occlusions = setup.occlusions;
    opts.seed = mix_seed(a.seed, 0x6576616c);  // held-out episode seeds
    opts.env = cfg.env;
    trainer.set_evaluator([&, opts](const QNetwork& net) {
      GreedyQPolicy policy(std::make_shared<const QNetwork>(net), setup.include_ibit);
      double sr = 0.0;
      for (const auto* sc : mix) sr += run_eval(policy, *sc, tcfg.eval_episodes, opts).sr();
      return sr / static_cast<double>(mix.size());
    });
  }
  trainer.run(steps, [](const TrainLogRow& row) {
    std::fprintf(stderr, "step %ld eps %.3f loss %.5f%s\n", row.step, row.epsilon, row.loss,
                 row.eval_sr ? fmt::format(" eval_sr {:.3f}", *row.eval_sr).c_str() : "");
  });

  Checkpoint ckpt{variant, setup.occlusions, setup.include_ibit, a.seed, trainer.steps(), trainer.online()};
  save_checkpoint(ckpt, a.out);
  const std::string log_path = a.log.empty() ? a.out + ".log.csv" : a.log;
  write_train_log(trainer.log(), log_path);
  std::printf("trained %s for %ld steps (%ld episodes), checkpoint %s, log %s\n", to_string(variant),
              trainer.steps(), trainer.episodes(), a.out.c_str(), log_path.c_str());
  return kExitOk;
}

struct EvalArgs {
  std::string agent;
  std::string scenarios = "all";
  int episodes = 1000;
  std::string occlusions = "off";
  std::uint64_t seed = 0;
  std::string out;
  int jobs = 1;
};

int cmd_evaluate(const Common& common, const EvalArgs& a) {
  const RunConfig cfg = run_config(common);
  const auto lib = library(common);
  const auto selection = scenarios_by_selection(lib, a.scenarios);
  const auto policy = make_policy(a.agent, cfg);
  EvalOptions opts;
  opts.occlusions = on_off(a.occlusions);
  opts.seed = a.seed;
  opts.jobs = a.jobs;
  opts.env = cfg.env;
  std::vector<EvalRow> rows;
  for (const auto* sc : selection) rows.push_back(run_eval(*policy, *sc, a.episodes, opts));
  if (!a.out.empty()) write_file(a.out, report_csv(rows));
  std::cout << report_table(rows);
  return kExitOk;
}

struct RolloutArgs {
  std::string agent;
  std::string scenario;
  std::string occlusions = "off";
  std::uint64_t seed = 0;
  std::string trace;
};

int cmd_rollout(const Common& common, const RolloutArgs& a) {
  const RunConfig cfg = run_config(common);
  const auto lib = library(common);
  const Scenario& sc = scenario_by_name(lib, a.scenario);
  auto policy = make_policy(a.agent, cfg);
  EnvConfig env_cfg = cfg.env;
  env_cfg.occlusions = on_off(a.occlusions);
  if (const auto ibit = policy->required_ibit()) env_cfg.include_ibit = *ibit;
  Environment env(env_cfg);
  const std::uint64_t seed = episode_seed(a.seed, sc.name(), 0);
  policy->begin_episode(seed);
  env.reset(sc, seed);

  std::string csv = "t,s,v,a,reward,outcome\n";
  double total = 0.0;
  while (!env.terminal()) {
    const Action act = policy->act(env);
    const StepResult r = env.step(act);
    total += r.reward;
    const auto& ego = env.world().ego;
    csv += fmt::format("{:.1f},{:.4f},{:.4f},{:g},{:.6f},{}\n", env.world().t, ego.s_front, ego.v,
                       acceleration_of(act), r.reward, to_string(r.outcome));
  }
  if (!a.trace.empty()) write_file(a.trace, csv);
  std::printf("%s on %s: %s after %d steps, return %.3f\n", policy->name().c_str(), sc.name().c_str(),
              to_string(env.outcome()), env.world().step_index, total);
  return kExitOk;
}

struct EncodeArgs {
  std::string scenario;
  int at_step = 0;
  std::string agent = "maintain";
  std::string occlusions = "off";
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_encode(const Common& common, const EncodeArgs& a) {
  const RunConfig cfg = run_config(common);
  const auto lib = library(common);
  const Scenario& sc = scenario_by_name(lib, a.scenario);
  auto policy = make_policy(a.agent, cfg);
  if (policy->required_ibit()) throw UsageError("encode drives the scene with a built-in agent, not a checkpoint");
  EnvConfig env_cfg = cfg.env;
  env_cfg.occlusions = on_off(a.occlusions);
  env_cfg.include_ibit = true;
  Environment env(env_cfg);
  const std::uint64_t seed = episode_seed(a.seed, sc.name(), 0);
  policy->begin_episode(seed);
  env.reset(sc, seed);
  for (int k = 0; k < a.at_step; ++k) {
    if (env.terminal()) {
      throw std::runtime_error(fmt::format("episode ended ({}) before step {}", to_string(env.outcome()), a.at_step));
    }
    env.step(policy->act(env));
  }
  std::string csv = "tto,ttv,tto_next,tto_ego,i_int\n";
  for (const auto& p : env.frame().patches) {
    csv += fmt::format("{:.6f},{:.6f},{:.6f},{:.6f},{}\n", p.tto, p.ttv, p.tto_next, p.tto_ego, int(p.i_int));
  }
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    write_file(a.out, csv);
  }
  return kExitOk;
}

int cmd_scenarios(const Common& common) {
  const auto lib = library(common);
  for (const auto& sc : lib.all()) {
    const auto& route = sc.spec().ego_route;
    std::printf("%s  %s\n  route %.1f -> %.1f of %.1f m, %zu flows, %zu occluder slots\n", sc.name().c_str(),
                sc.spec().description.c_str(), route.start, route.goal, sc.ego_path().length(),
                sc.spec().flows.size(), sc.spec().occluder_slots.size());
    for (const auto& c : sc.conflicts()) {
      std::printf("  %-8s %-9s ego [%.2f, %.2f] other [%.2f, %.2f]\n", sc.spec().path_names[c.path_id].c_str(),
                  c.region.kind == ConflictKind::same_path ? "same-path" : "crossing", c.region.ego.lo,
                  c.region.ego.hi, c.region.other.lo, c.region.other.hi);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intersection driving simulator with an invariant environment representation"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_file, "JSON file overriding DQN, environment and TTC constants")
      ->check(CLI::ExistingFile);
  app.add_option("--data-dir", common.data_dir, "Directory holding Sc01.json .. Sc13.json");

  const auto on_off_check = CLI::IsMember({"on", "off"});

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a DQN agent");
  t->add_option("--agent", train.agent, "Agent variant A1..A5")->required();
  t->add_option("--steps", train.steps, "Environment steps (default: dqn.total_steps)");
  t->add_option("--seed", train.seed, "Random seed");
  t->add_option("--out", train.out, "Checkpoint file")->required();
  t->add_option("--log", train.log, "Training log CSV (default: <out>.log.csv)");
  t->add_option("--scenarios", train.scenarios, "Override the variant's scenario mix (comma list)");

  EvalArgs eval;
  auto* e = app.add_subcommand("evaluate", "Evaluate an agent on a set of scenarios");
  e->add_option("--agent", eval.agent, "ttc, random, accelerate, maintain, decelerate or a checkpoint")->required();
  e->add_option("--scenarios", eval.scenarios, "all or a comma list");
  e->add_option("--episodes", eval.episodes, "Episodes per scenario")->check(CLI::NonNegativeNumber);
  e->add_option("--occlusions", eval.occlusions, "on|off")->check(on_off_check);
  e->add_option("--seed", eval.seed, "Random seed");
  e->add_option("--out", eval.out, "Report CSV");
  e->add_option("--jobs", eval.jobs, "Worker threads")->check(CLI::PositiveNumber);

  RolloutArgs roll;
  auto* r = app.add_subcommand("rollout", "Run one episode and write a trace");
  r->add_option("--agent", roll.agent, "Agent")->required();
  r->add_option("--scenario", roll.scenario, "Scenario name")->required();
  r->add_option("--occlusions", roll.occlusions, "on|off")->check(on_off_check);
  r->add_option("--seed", roll.seed, "Random seed");
  r->add_option("--trace", roll.trace, "Trace CSV (t,s,v,a,reward,outcome)");

  EncodeArgs enc;
  auto* c = app.add_subcommand("encode", "Write the representation of one frame");
  c->add_option("--scenario", enc.scenario, "Scenario name")->required();
  c->add_option("--at-step", enc.at_step, "Steps to simulate before encoding")->check(CLI::NonNegativeNumber);
  c->add_option("--agent", enc.agent, "Built-in agent driving until then");
  c->add_option("--occlusions", enc.occlusions, "on|off")->check(on_off_check);
  c->add_option("--seed", enc.seed, "Random seed");
  c->add_option("--out", enc.out, "Frame CSV (stdout if omitted)");

  auto* s = app.add_subcommand("scenarios", "List scenarios and their conflict regions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (t->parsed()) return cmd_train(common, train);
    if (e->parsed()) return cmd_evaluate(common, eval);
    if (r->parsed()) return cmd_rollout(common, roll);
    if (c->parsed()) return cmd_encode(common, enc);
    if (s->parsed()) return cmd_scenarios(common);
  } catch (const UsageError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitUsage;
  } catch (const ConfigError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitUsage;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitFailure;
  }
  return kExitUsage;
}
