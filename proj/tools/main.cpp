// SPDX-License-Identifier: Apache-2.0
//
// gridless-isac: sparse Bayesian ISAC receiver and benchmark harness
// Copyright (C) 2026 The gridless-isac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// isac: scenario simulation, estimation and Monte Carlo sweeps.

#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "isac/baselines.hpp"
#include "isac/errors.hpp"
#include "isac/harness.hpp"
#include "isac/rng.hpp"
#include "observation_io.hpp"

namespace {

using namespace isac;

constexpr double kDeg = std::numbers::pi / 180.0;

// Options shared by every subcommand that needs a scenario.
struct ScenarioOptions {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::vector<std::string> methods;

  void attach(CLI::App* app, bool with_methods) {
    auto* c = app->add_option("--config", config, "scenario JSON file");
    auto* p = app->add_option("--preset", preset, "built-in scenario name");
    c->excludes(p);
    app->add_option("--seed", seed, "master seed (u64)");
    app->add_option("--trials", trials, "trials per axis value");
    if (with_methods) {
      app->add_option("--method", methods, "sbl-mcmc, omp or periodogram; repeatable");
    }
  }

  ScenarioConfig resolve() const {
    ScenarioConfig sc = !config.empty()  ? load_scenario(config)
                        : !preset.empty() ? preset_scenario()
                                          : ScenarioConfig{};
    if (seed) sc.seed = *seed;
    if (trials) sc.trials = *trials;
    if (!methods.empty()) {
      sc.methods.clear();
      for (const auto& m : methods) sc.methods.push_back(parse_method(m));
    }
    sc.validate();
    return sc;
  }

 private:
  ScenarioConfig preset_scenario() const { return isac::preset(preset); }
};

std::size_t default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

int run(int argc, char** argv) {
  CLI::App app{"Gridless sparse Bayesian ISAC receiver: simulate, estimate, sweep"};
  app.require_subcommand(1);
  std::string out;

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw one scene and dump the observation as JSON");
  ScenarioOptions sim_opts;
  sim_opts.attach(sim, false);
  std::size_t sim_axis = 0, sim_trial = 0;
  sim->add_option("--axis-index", sim_axis, "sweep axis index of the trial")->capture_default_str();
  sim->add_option("--trial", sim_trial, "trial index")->capture_default_str();
  sim->add_option("--out", out, "output path (stdout when omitted)");

  // estimate
  auto* est = app.add_subcommand("estimate", "run one estimator on a dumped observation");
  std::string est_input;
  std::string est_config;
  std::string est_method = "sbl-mcmc";
  std::optional<std::uint64_t> est_seed;
  est->add_option("input", est_input, "observation JSON from `simulate`")->required();
  est->add_option("--config", est_config, "scenario overriding the one stored in the observation");
  est->add_option("--method", est_method, "sbl-mcmc, omp or periodogram")->capture_default_str();
  est->add_option("--seed", est_seed, "estimator seed (default derived from the trial seed)");
  est->add_option("--out", out, "output path (stdout when omitted)");

  // sweep
  auto* swp = app.add_subcommand("sweep", "Monte Carlo sweep to CSV");
  ScenarioOptions swp_opts;
  swp_opts.attach(swp, true);
  std::size_t threads = default_threads();
  bool timing = false, quiet = false;
  swp->add_option("--threads", threads, "concurrent trials")->capture_default_str();
  swp->add_flag("--timing", timing, "fill the wall_time_s column");
  swp->add_flag("--quiet", quiet, "suppress per-trial progress lines");
  swp->add_option("--out", out, "CSV path (stdout when omitted)");

  // bcrb
  auto* bnd = app.add_subcommand("bcrb", "bound curves to CSV");
  ScenarioOptions bnd_opts;
  bnd_opts.attach(bnd, false);
  std::size_t draws = 100;
  bnd->add_option("--draws", draws, "scene draws per axis value")->capture_default_str();
  bnd->add_option("--out", out, "CSV path (stdout when omitted)");

  // rayleigh
  auto* ray = app.add_subcommand("rayleigh", "print the matched-filter resolution cells");
  ScenarioOptions ray_opts;
  ray_opts.attach(ray, false);

  // presets
  auto* pre = app.add_subcommand("presets", "list or print the built-in scenarios");
  std::string pre_name;
  pre->add_option("name", pre_name, "print this preset as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return 64;
  }

  if (*sim) {
    cli::ObservationFile f;
    f.scenario = sim_opts.resolve();
    const std::vector<double> axis = f.scenario.axis_values();
    if (sim_axis >= axis.size()) throw_config("--axis-index is beyond the sweep axis");
    f.trial_seed = derive_seed(f.scenario.seed, sim_axis, sim_trial);
    f.scenario = f.scenario.at(axis[sim_axis]);
    f.data = simulate_trial(f.scenario, f.trial_seed);
    cli::write_text(out, cli::observation_to_json(f));
  } else if (*est) {
    cli::ObservationFile f = cli::observation_from_json(cli::read_text(est_input));
    ScenarioConfig sc = est_config.empty() ? f.scenario : load_scenario(est_config);
    sc.validate();
    const Method m = parse_method(est_method);
    // Matches the seed run_trial gives the first method of the trial.
    const std::uint64_t seed = est_seed ? *est_seed : derive_seed(f.trial_seed, 1, 0);
    const EstimateOutcome r = estimate_block(sc, m, f.data.block, seed, f.data.truth.size());
    cli::write_text(out, cli::estimate_to_json(sc, m, r, &f.data.truth));
  } else if (*swp) {
    const ScenarioConfig sc = swp_opts.resolve();
    SweepOptions opts;
    opts.threads = threads;
    opts.record_time = timing;
    const std::size_t total = sc.axis_values().size() * sc.trials;
    std::size_t done = 0;
    if (!quiet) {
      opts.on_trial = [&](const TrialRecord& r) {
        ++done;
        std::fprintf(stderr, "[%zu/%zu] axis=%g trial=%zu", done, total, r.axis_value, r.trial);
        for (const auto& o : r.outcomes) {
          std::fprintf(stderr, " %s:%s %.2fs", std::string(method_name(o.method)).c_str(),
                       o.score.correct_detection ? "ok" : "miss", o.seconds);
        }
        std::fputc('\n', stderr);
      };
    }
    const SweepResult res = run_sweep(sc, opts);
    if (out.empty() || out == "-") {
      cli::write_text(out, format_csv(res));
    } else {
      write_csv(res, out);
    }
  } else if (*bnd) {
    const ScenarioConfig sc = bnd_opts.resolve();
    const std::vector<BoundRow> rows = bound_curve(sc, draws);
    cli::write_text(out, format_bound_csv(rows));
  } else if (*ray) {
    const ScenarioConfig sc = ray_opts.resolve();
    const RayleighCells c = rayleigh_cells(sc.system);
    std::printf("range_m %.6g\nvelocity_mps %.6g\nangle_deg %.6g\n", c.range_m, c.velocity_mps,
                c.angle_rad / kDeg);
  } else if (*pre) {
    if (pre_name.empty()) {
      for (const auto& n : preset_names()) std::cout << n << '\n';
    } else {
      std::cout << scenario_to_json(isac::preset(pre_name)) << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const isac::Error& e) {
    std::cerr << isac::category_name(e.category()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal: " << e.what() << '\n';
    return 3;
  }
}
