// Copyright 2026 The bandloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bandloc/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bandloc/greens.hpp"
#include "bandloc/moments.hpp"
#include "bandloc/oracles.hpp"
#include "bandloc/shift.hpp"
#include "bandloc/stats.hpp"

namespace bandloc::cli {

using nlohmann::json;

namespace {

// Distinct stream salts per experiment section.
enum Salt : std::uint64_t {
  kSaltDecay = 0x100,
  kSaltApriori = 0x200,
  kSaltJacobian = 0x300,
  kSaltShiftVerify = 0x400,
  kSaltEvents = 0x500,
  kSaltCorrelator = 0x600,
  kSaltLemma = 0x700,
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) throw Error("cannot open output file " + path.string());
    out_ << header << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

json config_echo(const ExperimentConfig& cfg, int threads) {
  json j;
  j["experiment"] = experiment_name(cfg.experiment);
  j["W"] = cfg.model.w;
  j["n"] = cfg.model.n;
  j["z"] = cfg.model.z;
  j["ensemble"] = ensembles::ensemble_name(cfg.model.ensemble);
  j["energy_cap_coeff"] = cfg.model.energy_cap_coeff;
  if (cfg.model.mixture) {
    j["mixture_support"] = cfg.model.mixture->support_bound;
    json atoms = json::array();
    for (const auto& [lambda, weight] : cfg.model.mixture->atoms)
      atoms.push_back(json::array({lambda, weight}));
    j["mixture_atoms"] = atoms;
  }
  j["s"] = cfg.s;
  j["r"] = cfg.r;
  j["q"] = cfg.q;
  j["distances"] = cfg.distances;
  j["n_list"] = cfg.n_list;
  if (!cfg.pairs.empty()) {
    json pairs = json::array();
    for (const auto& [a, b] : cfg.pairs) pairs.push_back(json::array({a, b}));
    j["pairs"] = pairs;
  }
  j["n_samples"] = cfg.n_samples;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["threads"] = threads;
  j["cutoff_K"] = cfg.cutoff_k;
  j["phi_fraction"] = cfg.phi_fraction;
  j["sharp"] = cfg.sharp;
  j["delta"] = cfg.delta;
  j["c_norm"] = cfg.c_norm;
  j["k_event"] = cfg.k_event;
  j["dense_cap"] = cfg.dense_cap;
  j["out_dir"] = cfg.out_dir;
  return j;
}

json estimate_to_json(const moments::MomentEstimate& est) {
  return json{{"distance", est.distance}, {"mean", est.mean},
              {"stderr", est.stderr_mean}, {"n_samples", est.n_samples},
              {"n_excluded", est.n_excluded}};
}

struct Context {
  const ExperimentConfig& cfg;
  int threads;
  std::filesystem::path out;
  json results;
  std::int64_t exclusions = 0;
  std::vector<std::string> files;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& message) {
    if (!ok) failures.push_back(message);
  }

  std::filesystem::path file(const std::string& name) {
    files.push_back(name);
    return out / name;
  }
};

void run_decay(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  RngFactory rng(cfg.seed);
  moments::MomentSeries series;
  series.w = cfg.model.w;
  series.z = cfg.model.z;
  series.s = cfg.s;
  series.ensemble = ensembles::ensemble_name(cfg.model.ensemble);

  CsvWriter csv(ctx.file("decay.csv"), "distance,mean,stderr,n_samples,n_excluded");
  json series_json = json::array();
  for (std::size_t i = 0; i < cfg.distances.size(); ++i) {
    const int distance = cfg.distances[i];
    ensembles::ModelParams params = cfg.model;
    params.n = distance + 1;  // block separation of the (1, n) corner
    const moments::MomentEstimate est = moments::fractional_moment(
        params, cfg.s, 1, params.n, cfg.n_samples, rng, kSaltDecay + i, ctx.threads);
    series.estimates.push_back(est);
    ctx.exclusions += est.n_excluded;
    csv.row({std::to_string(est.distance), format_double(est.mean),
             format_double(est.stderr_mean), std::to_string(est.n_samples),
             std::to_string(est.n_excluded)});
    series_json.push_back(estimate_to_json(est));
  }
  ctx.results["series"] = series_json;

  try {
    const moments::DecayFit fit = moments::fit_localization_length(series);
    ctx.results["fit"] = json{{"xi", fit.xi},           {"mu", fit.mu},
                              {"intercept", fit.intercept}, {"r_squared", fit.r_squared},
                              {"xi_stderr", fit.xi_stderr}, {"mu_stderr", fit.mu_stderr}};
    CsvWriter fit_csv(ctx.file("decay_fit.csv"), "xi,mu,r_squared,intercept");
    fit_csv.row({format_double(fit.xi), format_double(fit.mu), format_double(fit.r_squared),
                 format_double(fit.intercept)});
    ctx.require(fit.r_squared >= 0.95, "decay: r_squared < 0.95");
    ctx.require(fit.xi > 0.0, "decay: xi <= 0");
  } catch (const NonDecaying& e) {
    ctx.results["fit"] = json{{"error", e.what()}};
    ctx.require(false, std::string("decay: ") + e.what());
  }
}

void run_apriori(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  RngFactory rng(cfg.seed);
  const std::vector<moments::MomentEstimate> envelope = moments::apriori_envelope(
      cfg.model.w, cfg.model.z, cfg.s, cfg.n_list, cfg.n_samples, rng, kSaltApriori,
      ctx.threads);

  CsvWriter csv(ctx.file("apriori.csv"), "n,mean,stderr,n_samples,n_excluded");
  json rows = json::array();
  std::vector<double> x, y, w;
  double max_mean = 0.0;
  int argmax_n = 0;
  for (const auto& est : envelope) {
    ctx.exclusions += est.n_excluded;
    csv.row({std::to_string(est.distance), format_double(est.mean),
             format_double(est.stderr_mean), std::to_string(est.n_samples),
             std::to_string(est.n_excluded)});
    rows.push_back(estimate_to_json(est));
    if (est.mean > max_mean) {
      max_mean = est.mean;
      argmax_n = est.distance;
    }
    x.push_back(est.distance);
    y.push_back(std::log(est.mean));
    const double rel = est.stderr_mean / est.mean;
    w.push_back(rel > 0.0 ? 1.0 / (rel * rel) : -1.0);
  }
  const LineFit fit = weighted_line_fit(x, y, w);
  ctx.results["envelope"] = rows;
  ctx.results["slope"] = fit.slope;
  ctx.results["slope_stderr"] = fit.slope_stderr;
  ctx.results["max_mean"] = max_mean;
  ctx.results["argmax_n"] = argmax_n;
  ctx.require(fit.slope <= 3.0 * fit.slope_stderr,
              "apriori: slope significantly positive");
}

void run_jacobian_verify(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  RngFactory rng(cfg.seed);
  const int w = cfg.model.w;
  const double delta = cfg.delta > 0.0 ? cfg.delta : 0.05 / w;

  CsvWriter csv(ctx.file("jacobian.csv"),
                "trial,max_rel_err,product,half_bound,safe_bound");
  double max_rel_err = 0.0;
  double min_product = 1.0;
  int half_violations = 0;
  int safe_violations = 0;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    RngStream stream = rng.stream(kSaltJacobian, static_cast<std::uint64_t>(trial));
    double z = 0.0;
    const shift::BondQuadruple bond = shift::sample_ramp_bond(w, cfg.cutoff_k, stream, &z);
    shift::ShiftContext sctx;
    sctx.delta = delta;
    sctx.sign = +1;
    sctx.cutoff.k = cfg.cutoff_k;
    sctx.z = z;

    const RealMatrix analytic = shift::eta_derivative(bond.t, bond.g, bond.gtilde, sctx);
    const double step = 1e-6 * (1.0 + hs_norm(bond.t));
    const RealMatrix numeric =
        oracles::finite_diff_jacobian(bond.t, bond.g, bond.gtilde, sctx, step);
    const double rel_err = (analytic - numeric).cwiseAbs().maxCoeff() /
                           (1.0 + analytic.cwiseAbs().maxCoeff());
    max_rel_err = std::max(max_rel_err, rel_err);

    const shift::JacobianPair pair =
        shift::jacobian_det_pair(bond.t, bond.g, bond.gtilde, sctx);
    const Matrix q = shift::q_vector(bond.t, bond.g, bond.gtilde, z, w, sctx.cutoff);
    const double scale = delta * delta * hs_norm_sq(bond.t) * hs_norm_sq(q);
    const double half_bound = std::exp(-0.5 * scale);
    const double safe_bound = std::exp(-2.0 * scale);
    if (pair.product < half_bound) ++half_violations;
    if (pair.product < safe_bound) ++safe_violations;
    min_product = std::min(min_product, pair.product);
    csv.row({std::to_string(trial), format_double(rel_err), format_double(pair.product),
             format_double(half_bound), format_double(safe_bound)});
  }
  ctx.results["max_rel_err"] = max_rel_err;
  ctx.results["min_product"] = min_product;
  ctx.results["half_bound_violations"] = half_violations;
  ctx.results["safe_bound_violations"] = safe_violations;
  ctx.require(max_rel_err < 1e-4, "jacobian-verify: finite-difference mismatch");
  ctx.require(safe_violations == 0, "jacobian-verify: safe product bound violated");
}

void run_shift_verify(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  RngFactory rng(cfg.seed);
  ensembles::ModelParams params = cfg.model;
  if (params.n < 2) params.n = 2;
  const double delta = cfg.delta > 0.0 ? cfg.delta : 1e-3;

  const std::vector<oracles::CovCheck> checks = oracles::change_of_variables_check(
      params, delta, cfg.cutoff_k, cfg.n_samples, rng, kSaltShiftVerify, ctx.threads);

  CsvWriter csv(ctx.file("shift_verify.csv"), "function,mean_diff,stderr,n_samples,n_excluded");
  json rows = json::array();
  for (const auto& check : checks) {
    csv.row({check.name, format_double(check.mean_diff), format_double(check.stderr_diff),
             std::to_string(check.n_samples), std::to_string(check.n_excluded)});
    rows.push_back(json{{"function", check.name},
                        {"mean_diff", check.mean_diff},
                        {"stderr", check.stderr_diff},
                        {"n_samples", check.n_samples}});
    ctx.exclusions += check.n_excluded;
    ctx.require(std::abs(check.mean_diff) < 3.0 * check.stderr_diff,
                std::string("shift-verify: identity violated for ") + check.name);
  }
  ctx.results["checks"] = rows;
  ctx.results["delta"] = delta;
}

void run_events(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  RngFactory rng(cfg.seed);

  CsvWriter csv(ctx.file("events.csv"),
                "n,p_mphi_complement,wilson_lower,wilson_upper,hits,n_samples");
  json rows = json::array();
  struct Stat {
    double p = 0.0;
    WilsonInterval iv;
  };
  std::vector<Stat> stats;
  for (std::size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
    const int n = cfg.n_list[idx];
    ensembles::ModelParams params = cfg.model;
    params.n = n;
    struct Acc {
      std::int64_t complement_hits = 0;
      std::int64_t excluded = 0;
      void merge(const Acc& o) {
        complement_hits += o.complement_hits;
        excluded += o.excluded;
      }
    };
    shift::CutoffSpec cut{cfg.cutoff_k};
    auto acc = parallel_reduce<Acc>(cfg.n_samples, ctx.threads, [&](std::int64_t i, Acc& local) {
      RngStream stream = rng.stream(kSaltEvents + idx, static_cast<std::uint64_t>(i));
      try {
        const ensembles::BlockHamiltonian h = ensembles::sample_hamiltonian(params, stream);
        const greens::GammaChain chain = greens::gamma_chain(h, params.z);
        const shift::EventFlags flags =
            shift::event_membership(h, chain, cut, cfg.phi_fraction, cfg.c_norm, cfg.k_event);
        if (!flags.m_phi) ++local.complement_hits;
      } catch (const ExactlySingular&) {
        ++local.excluded;
      }
    });
    ctx.exclusions += acc.excluded;
    Stat stat;
    stat.p = static_cast<double>(acc.complement_hits) / static_cast<double>(cfg.n_samples);
    stat.iv = wilson_interval(acc.complement_hits, cfg.n_samples);
    stats.push_back(stat);
    csv.row({std::to_string(n), format_double(stat.p), format_double(stat.iv.lower),
             format_double(stat.iv.upper), std::to_string(acc.complement_hits),
             std::to_string(cfg.n_samples)});
    rows.push_back(json{{"n", n},
                        {"p_complement", stat.p},
                        {"wilson_lower", stat.iv.lower},
                        {"wilson_upper", stat.iv.upper}});
  }
  ctx.results["m_phi_complement"] = rows;
  for (std::size_t i = 1; i < stats.size(); ++i) {
    ctx.require(stats[i].iv.upper < stats[i - 1].iv.lower,
                "events: tail probabilities not strictly decreasing beyond Wilson overlap");
  }
}

void run_correlator(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  RngFactory rng(cfg.seed);

  CsvWriter csv(ctx.file("correlator.csv"), "i,j,mean,stderr,n_samples");
  json rows = json::array();
  std::vector<OnlineMoments> stats(cfg.pairs.size());
  struct Acc {
    std::vector<OnlineMoments> per_pair;
    void merge(const Acc& o) {
      if (per_pair.empty()) per_pair.resize(o.per_pair.size());
      for (std::size_t k = 0; k < o.per_pair.size(); ++k) per_pair[k].merge(o.per_pair[k]);
    }
  };
  auto acc = parallel_reduce<Acc>(cfg.n_samples, ctx.threads, [&](std::int64_t i, Acc& local) {
    if (local.per_pair.empty()) local.per_pair.resize(cfg.pairs.size());
    RngStream stream = rng.stream(kSaltCorrelator, static_cast<std::uint64_t>(i));
    const ensembles::BlockHamiltonian h = ensembles::sample_hamiltonian(cfg.model, stream);
    for (std::size_t k = 0; k < cfg.pairs.size(); ++k) {
      local.per_pair[k].add(
          moments::eigen_correlator(h, cfg.pairs[k].first, cfg.pairs[k].second, cfg.dense_cap));
    }
  });
  if (acc.per_pair.empty()) acc.per_pair.resize(cfg.pairs.size());

  for (std::size_t k = 0; k < cfg.pairs.size(); ++k) {
    const OnlineMoments& m = acc.per_pair[k];
    csv.row({std::to_string(cfg.pairs[k].first), std::to_string(cfg.pairs[k].second),
             format_double(m.mean()), format_double(m.stderr_mean()),
             std::to_string(m.count)});
    rows.push_back(json{{"i", cfg.pairs[k].first},
                        {"j", cfg.pairs[k].second},
                        {"mean", m.mean()},
                        {"stderr", m.stderr_mean()}});
  }
  ctx.results["correlators"] = rows;
  if (acc.per_pair.size() >= 2) {
    const OnlineMoments& near = acc.per_pair.front();
    const OnlineMoments& far = acc.per_pair.back();
    const double sigma = std::sqrt(near.stderr_mean() * near.stderr_mean() +
                                   far.stderr_mean() * far.stderr_mean());
    ctx.require(far.mean() < near.mean() - 3.0 * sigma,
                "correlator: no significant decay between first and last pair");
  }
}

void run_lemma_check(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  RngFactory rng(cfg.seed);

  // Log-variance identity over random positive 5-point distributions.
  double max_gap = 0.0;
  const std::vector<std::pair<double, double>> rs_pairs{
      {0.25, 0.5}, {0.1, 0.3}, {0.4, 0.8}, {0.6, 0.9}};
  for (int trial = 0; trial < cfg.trials; ++trial) {
    RngStream stream = rng.stream(kSaltLemma, static_cast<std::uint64_t>(trial));
    moments::DiscreteDistribution dist;
    double total = 0.0;
    for (int k = 0; k < 5; ++k) {
      dist.values.push_back(std::exp(stream.uniform(-3.0, 3.0)));
      const double w = stream.uniform(0.05, 1.0);
      dist.weights.push_back(w);
      total += w;
    }
    for (double& w : dist.weights) w /= total;
    const auto& [r, s] = rs_pairs[static_cast<std::size_t>(trial) % rs_pairs.size()];
    const moments::IdentityCheck check = moments::log_variance_identity_check(dist, r, s);
    max_gap = std::max(max_gap, check.gap);
  }

  // Fluctuation lower bound over randomized finite distributions.
  int counterexamples = 0;
  int hypothesis_held = 0;
  const int mw_trials = std::max(cfg.trials, 10000);
  for (int trial = 0; trial < mw_trials; ++trial) {
    RngStream stream = rng.stream(kSaltLemma + 1, static_cast<std::uint64_t>(trial));
    moments::DiscreteDistribution dist;
    const int atoms = 3 + static_cast<int>(stream.uniform() * 5.0);
    const bool symmetric = stream.uniform() < 0.5;
    double total = 0.0;
    for (int k = 0; k < atoms; ++k) {
      const double v = stream.normal(2.0);
      const double w = stream.uniform(0.05, 1.0);
      dist.values.push_back(v);
      dist.weights.push_back(w);
      total += w;
      if (symmetric) {
        dist.values.push_back(-v);
        dist.weights.push_back(w);
        total += w;
      }
    }
    for (double& w : dist.weights) w /= total;
    const double a = stream.uniform(0.5, 3.0);
    const double alpha = a * stream.uniform(0.1, 0.95);
    const double beta = stream.uniform(0.2, 2.0);
    const double epsilon = stream.uniform(0.05, 0.95);
    const oracles::MwCheck check =
        oracles::mw_lower_bound_check(dist, alpha, a, beta, epsilon);
    if (check.hypothesis_holds) ++hypothesis_held;
    if (!check.passes) ++counterexamples;
  }

  CsvWriter csv(ctx.file("lemma.csv"), "check,trials,max_gap,counterexamples");
  csv.row({"log_variance_identity", std::to_string(cfg.trials), format_double(max_gap), "0"});
  csv.row({"mw_lower_bound", std::to_string(mw_trials), "0",
           std::to_string(counterexamples)});
  ctx.results["log_variance_max_gap"] = max_gap;
  ctx.results["mw_trials"] = mw_trials;
  ctx.results["mw_hypothesis_held"] = hypothesis_held;
  ctx.results["mw_counterexamples"] = counterexamples;
  ctx.require(max_gap < 1e-6, "lemma-check: log-variance identity gap too large");
  ctx.require(counterexamples == 0, "lemma-check: fluctuation bound counterexample");
}

}  // namespace

RunReport run(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> warnings = cfg.validate();
  const int threads = resolve_threads(cfg.threads);

  Context ctx{cfg, threads, std::filesystem::path(cfg.out_dir), json::object(), 0, {}, {}};
  std::filesystem::create_directories(ctx.out);

  switch (cfg.experiment) {
    case Experiment::Decay: run_decay(ctx); break;
    case Experiment::Apriori: run_apriori(ctx); break;
    case Experiment::JacobianVerify: run_jacobian_verify(ctx); break;
    case Experiment::ShiftVerify: run_shift_verify(ctx); break;
    case Experiment::Events: run_events(ctx); break;
    case Experiment::Correlator: run_correlator(ctx); break;
    case Experiment::LemmaCheck: run_lemma_check(ctx); break;
  }

  const auto t1 = std::chrono::steady_clock::now();
  RunReport report;
  report.document["experiment"] = experiment_name(cfg.experiment);
  report.document["version"] = kVersion;
  report.document["seed"] = cfg.seed;
  report.document["threads"] = threads;
  report.document["wall_time_seconds"] =
      std::chrono::duration<double>(t1 - t0).count();
  report.document["config"] = config_echo(cfg, threads);
  report.document["results"] = ctx.results;
  report.document["exclusions"] = ctx.exclusions;
  report.document["warnings"] = warnings;
  report.document["assertions"] =
      json{{"passed", ctx.failures.empty()}, {"failures", ctx.failures}};
  report.assertions_passed = ctx.failures.empty();
  report.assertion_failures = ctx.failures;

  {
    std::ofstream out(ctx.out / "run_report.json");
    out << report.document.dump(2) << "\n";
    ctx.files.push_back("run_report.json");
  }
  report.files_written = ctx.files;
  return report;
}

}  // namespace bandloc::cli
