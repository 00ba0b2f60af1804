// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpp/benchmark.hpp"
#include "mpp/chain.hpp"
#include "mpp/errors.hpp"
#include "mpp/instance.hpp"
#include "mpp/io.hpp"
#include "mpp/mechanism.hpp"
#include "mpp/partial.hpp"
#include "mpp/persuasion.hpp"
#include "mpp/robust.hpp"
#include "mpp/sim.hpp"

namespace {

constexpr int kExitInput = 2;        // unreadable or invalid inputs
constexpr int kExitSolver = 3;       // numerical / solver failure
constexpr int kExitCap = 4;          // slice-length cap exceeded
constexpr int kExitPrecondition = 5; // violated mathematical precondition

mpp::MppInstance load_or_exit(const std::string& path) {
  try {
    return mpp::load_instance(path);
  } catch (const mpp::MppError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    std::exit(kExitInput);
  }
}

void write_file(const std::string& out_dir, const std::string& name,
                const std::string& text) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  std::ofstream os(out_dir + "/" + name);
  os << text;
  if (!os) {
    std::fprintf(stderr, "error: cannot write %s/%s\n", out_dir.c_str(),
                 name.c_str());
    std::exit(kExitInput);
  }
}

// Parse "K" or "K1..K2" into an inclusive list of memories.
std::vector<int> parse_memories(const std::string& spec) {
  const auto dots = spec.find("..");
  try {
    if (dots == std::string::npos) return {std::stoi(spec)};
    const int lo = std::stoi(spec.substr(0, dots));
    const int hi = std::stoi(spec.substr(dots + 2));
    if (lo < 0 || hi < lo) throw std::invalid_argument(spec);
    std::vector<int> out;
    for (int k = lo; k <= hi; ++k) out.push_back(k);
    return out;
  } catch (const std::exception&) {
    std::fprintf(stderr, "error: bad --memory value '%s'\n", spec.c_str());
    std::exit(kExitInput);
  }
}

int cmd_solve(const std::string& instance_path, const std::string& model_name,
              double tol, const std::string& out_dir) {
  const mpp::MppInstance inst = load_or_exit(instance_path);
  const mpp::InfoModel model = model_name == "no"
                                   ? mpp::InfoModel::no_history()
                                   : mpp::InfoModel::full_history();
  const mpp::BenchmarkResult res = mpp::solve_benchmark(inst, model);
  std::printf("OPT = %.6f\n", res.value);
  const mpp::ObedienceReport rep =
      mpp::check_persuasive(inst, res.mechanism, model, tol);
  std::printf("persuasive = %s (worst margin %.3e)\n",
              rep.persuasive ? "true" : "false", rep.worst_margin);
  std::printf("%s\n", mpp::mechanism_to_json(inst, res.mechanism).c_str());
  write_file(out_dir, model_name + ".json",
             mpp::mechanism_to_json(inst, res.mechanism) + "\n");
  return 0;
}

int cmd_partial(const std::string& instance_path, const std::string& memory,
                int lag, int starts, std::uint64_t seed, double tol,
                const std::string& out_dir) {
  const mpp::MppInstance inst = load_or_exit(instance_path);
  mpp::PartialOptions opts;
  opts.lag = lag;
  opts.starts = starts;
  opts.seed = seed;
  opts.obedience_tol = tol;
  std::printf("memory,value,starts,best_start,iterations,wall_ms\n");
  std::vector<mpp::SignalingMechanism> prev;
  for (const int k : parse_memories(memory)) {
    opts.memory = k;
    opts.warm_starts = prev;  // chain each memory's optimum into the next
    const auto t0 = std::chrono::steady_clock::now();
    const mpp::PartialResult res = mpp::solve_partial(inst, opts);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    std::printf("%d,%.6f,%d,%d,%d,%lld\n", k, res.value, starts,
                res.best_start, res.iterations, static_cast<long long>(ms));
    std::fflush(stdout);
    write_file(out_dir, "partial_k" + std::to_string(k) + ".json",
               mpp::mechanism_to_json(inst, res.mechanism) + "\n");
    prev = {res.mechanism};
  }
  return 0;
}

int cmd_robust(const std::string& instance_path, double epsilon,
               int verify_samples, std::uint64_t seed,
               const std::string& out_dir) {
  const mpp::MppInstance inst = load_or_exit(instance_path);
  const mpp::RobustMechanism rm = mpp::build_robust_mechanism(inst, epsilon);
  const std::string cert = mpp::robust_to_json(inst, rm);
  std::printf("%s\n", cert.c_str());
  const mpp::RobustVerification ver =
      mpp::verify_robust(inst, rm, verify_samples, seed);
  std::printf("analytic_ok = %s\n", ver.analytic_ok ? "true" : "false");
  std::printf("sampled_ok = %s (%d samples, worst margin %.3e)\n",
              ver.sampled_ok ? "true" : "false", ver.samples,
              ver.worst_margin);
  const mpp::PersuasiveLag lags = mpp::persuasive_lag(inst, rm, epsilon);
  std::printf("lag_exact = %d\nlag_spectral = %d\n", lags.exact,
              lags.spectral);
  write_file(out_dir, "robust.json", cert + "\n");
  return 0;
}

int cmd_check_equality(const std::string& instance_path) {
  const mpp::MppInstance inst = load_or_exit(instance_path);
  const mpp::EqualityCheck chk = mpp::check_equality_condition(inst);
  if (chk.holds) {
    std::printf("condition holds; OPT(no)=%.6f OPT(full)=%.6f\n", chk.value_no,
                chk.witness_value);
  } else {
    std::printf("condition FAILS: %s\n", chk.failing_clause.c_str());
  }
  return 0;
}

int cmd_simulate(const std::string& instance_path,
                 const std::string& mechanism_path, std::int64_t steps,
                 std::uint64_t seed, int lag,
                 const std::string& behavior_name) {
  const mpp::MppInstance inst = load_or_exit(instance_path);
  std::string mech_text;
  {
    std::ifstream is(mechanism_path);
    if (!is) {
      std::fprintf(stderr, "error: cannot read %s\n", mechanism_path.c_str());
      return kExitInput;
    }
    std::stringstream ss;
    ss << is.rdbuf();
    mech_text = ss.str();
  }
  mpp::SignalingMechanism sigma(0, inst.n_states, inst.n_actions);
  try {
    sigma = mpp::parse_mechanism(inst, mech_text);
  } catch (const mpp::MppError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  mpp::ReceiverBehavior behavior;
  behavior.kind = behavior_name == "best" ? mpp::ReceiverBehavior::BestRespond
                                          : mpp::ReceiverBehavior::Follow;
  behavior.model = lag > 0 ? mpp::InfoModel::with_lag(lag)
                           : mpp::InfoModel::no_history();
  const mpp::SimResult res = mpp::simulate(inst, sigma, behavior, steps, seed);
  std::printf("steps,average_reward,disobediences\n");
  std::printf("%lld,%.6f,%lld\n", static_cast<long long>(res.steps),
              res.average_reward, static_cast<long long>(res.disobediences));
  std::printf("state,action,frequency\n");
  for (int w = 0; w < inst.n_states; ++w)
    for (int a = 0; a < inst.n_actions; ++a)
      std::printf("%d,%d,%.6f\n", w, a,
                  res.pair_freq[static_cast<size_t>(inst.pair_index(w, a))]);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-run persuasion mechanisms for Markov processes"};
  app.require_subcommand(1);

  std::string instance_path, out_dir, model_name = "no", memory = "0";
  std::string mechanism_path, behavior_name = "follow";
  int lag = 1, starts = 50, verify_samples = 10000;
  std::int64_t steps = 100000;
  std::uint64_t seed = 0;
  double epsilon = 0.01, tol = 1e-9;

  CLI::App* solve = app.add_subcommand("solve", "exact benchmark optimum");
  solve->add_option("instance", instance_path)->required();
  solve->add_option("--model", model_name)
      ->check(CLI::IsMember({"no", "full"}));
  solve->add_option("--tol", tol);
  solve->add_option("--out", out_dir);

  CLI::App* partial =
      app.add_subcommand("partial", "lagged-observation solver");
  partial->add_option("instance", instance_path)->required();
  partial->add_option("--lag", lag)->check(CLI::PositiveNumber);
  partial->add_option("--memory", memory);
  partial->add_option("--starts", starts)->check(CLI::NonNegativeNumber);
  partial->add_option("--seed", seed);
  partial->add_option("--tol", tol);
  partial->add_option("--out", out_dir);

  CLI::App* robust = app.add_subcommand("robust", "robust mechanism + proof");
  robust->add_option("instance", instance_path)->required();
  robust->add_option("--epsilon", epsilon)->check(CLI::NonNegativeNumber);
  robust->add_option("--verify-samples", verify_samples)
      ->check(CLI::NonNegativeNumber);
  robust->add_option("--seed", seed);
  robust->add_option("--out", out_dir);

  CLI::App* check =
      app.add_subcommand("check-equality", "no-history vs full-history test");
  check->add_option("instance", instance_path)->required();

  CLI::App* sim = app.add_subcommand("simulate", "roll out a mechanism");
  sim->add_option("instance", instance_path)->required();
  sim->add_option("--mechanism", mechanism_path)->required();
  sim->add_option("-T,--steps", steps)->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed);
  sim->add_option("--lag", lag);
  sim->add_option("--behavior", behavior_name)
      ->check(CLI::IsMember({"follow", "best"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return cmd_solve(instance_path, model_name, tol, out_dir);
    if (partial->parsed())
      return cmd_partial(instance_path, memory, lag, starts, seed, tol,
                         out_dir);
    if (robust->parsed())
      return cmd_robust(instance_path, epsilon, verify_samples, seed, out_dir);
    if (check->parsed()) return cmd_check_equality(instance_path);
    if (sim->parsed())
      return cmd_simulate(instance_path, mechanism_path, steps, seed,
                          sim->count("--lag") ? lag : 0, behavior_name);
  } catch (const mpp::CapExceededError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCap;
  } catch (const mpp::EpsilonTooLargeError& e) {
    std::fprintf(stderr, "error: %s\nadmissible threshold: %.9f\n", e.what(),
                 e.threshold);
    return kExitPrecondition;
  } catch (const mpp::RegularityError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitPrecondition;
  } catch (const mpp::MppError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
  return 0;
}
