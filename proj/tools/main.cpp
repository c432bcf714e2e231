// Command-line front end: weak-order, invariant, diagnostics, moments and
// contraction experiments driven by a JSON config, with CSV output.

#include <clocale>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spde/config.hpp"
#include "spde/estimators.hpp"
#include "spde/util.hpp"

namespace {

using namespace spde;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitCheckFailed = 4;
constexpr const char* kVersion = "0.1.0";

struct GlobalArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  std::string out;
};

CsvWriter make_writer(std::vector<std::string> columns, const ExperimentConfig& cfg) {
  CsvWriter csv(std::move(columns));
  csv.add_metadata("artifact_version", kVersion);
  csv.add_metadata("config_hash", std::to_string(fnv1a64(cfg.canonical_text)));
  csv.add_metadata("seed", std::to_string(cfg.seed));
  return csv;
}

void emit(const CsvWriter& csv, const std::string& path) {
  csv.write_file(path);
  std::cout << "wrote " << path << "\n";
}

int cmd_weak_order(ExperimentConfig cfg, const GlobalArgs& args) {
  if (cfg.tau_grid.size() < 4) throw ConfigError("weak-order needs scheme.tau_grid with >= 4 entries");
  if (!cfg.horizon) throw ConfigError("weak-order needs scheme.T");
  if (cfg.n_samples < 2) throw ConfigError("weak-order needs estimator.n_samples >= 2");

  const ModelSpec model = cfg.build_model();
  const TestFunctional phi = cfg.build_phi();
  std::vector<double> taus;
  for (const auto& tau : cfg.tau_grid) {
    cfg.steps_for(tau);  // validates exact divisibility
    taus.push_back(tau.value());
  }
  EstimatorOptions options;
  options.workers = args.workers;
  const WeakErrorReport report = order_sweep(model, phi, taus, cfg.horizon->value(),
                                             cfg.refinement_r, cfg.n_samples, cfg.seed,
                                             options);

  CsvWriter csv = make_writer({"tau", "m", "error", "std_error", "n_samples"}, cfg);
  for (const auto& p : report.points) {
    csv.add_row({p.tau, static_cast<double>(p.m), std::abs(p.estimate), p.std_error,
                 static_cast<double>(p.n_samples)});
  }
  const std::string summary = "fitted_order=" + CsvWriter::format_double(report.fit.slope) +
                              " +/- " + CsvWriter::format_double(report.fit.slope_stderr);
  csv.add_summary(summary);
  emit(csv, cfg.output);
  std::cout << summary << "\n";
  return kExitOk;
}

int cmd_invariant(ExperimentConfig cfg, const GlobalArgs&) {
  if (cfg.tau_grid.empty()) throw ConfigError("invariant needs scheme.tau or scheme.tau_grid");
  if (cfg.burn_in < 0) throw ConfigError("invariant needs estimator.burn_in");
  if (cfg.window < 1) throw ConfigError("invariant needs estimator.steps");

  const ModelSpec model = cfg.build_model();
  const TestFunctional phi = cfg.build_phi();
  std::vector<double> taus;
  for (const auto& tau : cfg.tau_grid) taus.push_back(tau.value());

  const InvariantGapReport report = invariant_gap_sweep(model, phi, taus, cfg.burn_in,
                                                        cfg.window, cfg.seed, cfg.batch_count);

  CsvWriter csv = make_writer({"tau", "ergodic_avg", "ci_low", "ci_high", "oracle", "gap"}, cfg);
  for (const auto& p : report.points) {
    csv.add_row({p.tau, p.average, p.average - p.ci_half, p.average + p.ci_half, p.oracle,
                 p.gap});
  }
  if (report.used_proxy) {
    csv.add_summary("oracle_proxy_step=" + CsvWriter::format_double(report.proxy_step));
    csv.add_summary("oracle_proxy_bias_estimate=" +
                    CsvWriter::format_double(report.proxy_bias_estimate));
  }
  if (report.points.size() >= 2) {
    csv.add_summary("fitted_order=" + CsvWriter::format_double(report.fit.slope) + " +/- " +
                    CsvWriter::format_double(report.fit.slope_stderr));
  }
  emit(csv, cfg.output);
  return kExitOk;
}

int cmd_moments(ExperimentConfig cfg, const GlobalArgs& args) {
  if (cfg.tau_grid.size() != 1) throw ConfigError("moments needs a single scheme.tau");
  if (cfg.n_samples < 2) throw ConfigError("moments needs estimator.n_samples >= 2");
  std::vector<long> checkpoints = cfg.checkpoints;
  if (checkpoints.empty()) checkpoints = {10, 100, 1000, 10000};

  const ModelSpec model = cfg.build_model();
  EstimatorOptions options;
  options.workers = args.workers;
  const MomentReport report = moment_bound_probe(model, cfg.tau_grid[0].value(), 2,
                                                 checkpoints, cfg.n_samples, cfg.seed, options);

  CsvWriter csv = make_writer({"m", "estimate", "std_error"}, cfg);
  for (const auto& p : report.points) {
    csv.add_row({static_cast<double>(p.m), p.estimate, p.std_error});
  }
  csv.add_summary("trend_slope=" + CsvWriter::format_double(report.trend_slope) + " +/- " +
                  CsvWriter::format_double(report.trend_slope_stderr));
  csv.add_summary("moment_bound=" + CsvWriter::format_double(report.bound));
  emit(csv, cfg.output);
  return kExitOk;
}

int cmd_contraction(ExperimentConfig cfg, const GlobalArgs&) {
  if (cfg.tau_grid.empty()) throw ConfigError("contraction needs scheme.tau or scheme.tau_grid");
  if (cfg.window < 1) throw ConfigError("contraction needs estimator.steps");

  const ModelSpec model = cfg.build_model();
  if (!(model.nonlinearity().lipschitz < model.spectrum().mu0())) {
    throw ConfigError("contraction requires strict dissipativity L_G < mu0 (Remark on "
                      "strict dissipativity does not apply)");
  }
  const SpectralVector y1 = model.initial_condition();
  const SpectralVector y2 = SpectralVector::unit_mode(model.n_modes(), 0, 1.0);

  CsvWriter csv = make_writer(
      {"tau", "max_ratio", "bound", "final_distance", "violations"}, cfg);
  for (const auto& tau : cfg.tau_grid) {
    const ContractionReport r =
        contraction_probe(model, tau.value(), y1, y2, cfg.window, cfg.seed);
    csv.add_row({tau.value(), r.max_ratio, r.bound, r.final_distance,
                 static_cast<double>(r.violations)});
  }
  emit(csv, cfg.output);
  return kExitOk;
}

int cmd_diagnostics(ExperimentConfig cfg, const GlobalArgs& args) {
  const ModelSpec model = cfg.build_model();
  const Spectrum& s = model.spectrum();
  const NemytskiiSpec& nl = model.nonlinearity();
  const double mu0 = s.mu0();

  if (nl.bounded && !(nl.lipschitz < mu0)) {
    throw ConfigError("diagnostics contraction probe requires L_G < mu0");
  }

  CsvWriter csv = make_writer({"check", "measured", "bound", "status"}, cfg);
  bool all_pass = true;
  const auto add_check = [&](const std::string& name, double measured, double bound) {
    const bool pass = measured <= bound;
    all_pass = all_pass && pass;
    csv.add_text_row({name, CsvWriter::format_double(measured),
                      CsvWriter::format_double(bound), pass ? "PASS" : "FAIL"});
  };

  // semigroup smoothing: |(-B)^sigma e^{tB}| <= (2 sigma/e)^sigma t^-sigma e^{-mu0 t/2}
  for (double sigma : {0.25, 0.5, 1.0}) {
    double worst = 0.0;
    for (int i = 0; i < 25; ++i) {
      const double t = std::pow(10.0, -4.0 + 4.0 * i / 24.0);
      const double bound = std::pow(2.0 * sigma / std::exp(1.0), sigma) *
                           std::pow(t, -sigma) * std::exp(-mu0 * t / 2.0);
      worst = std::max(worst, semigroup_smoothing_norm(s, t, sigma) / bound);
    }
    add_check("semigroup_smoothing_sigma_" + CsvWriter::format_double(sigma), worst, 1.0);
  }

  // resolvent smoothing with c = 1
  {
    double worst = 0.0;
    for (double tau : {1e-3, 1e-2, 1e-1, 1.0}) {
      for (long j : {1L, 2L, 3L, 5L, 10L, 31L, 100L, 316L, 1000L}) {
        for (double kappa : {0.0, 0.25, 0.5, 1.0}) {
          const double bound = std::pow(static_cast<double>(j) * tau, kappa - 1.0) /
                               std::pow(1.0 + mu0 * tau, static_cast<double>(j) * kappa);
          worst = std::max(worst, resolvent_smoothing_norm(s, tau, j, kappa) / bound);
        }
      }
    }
    add_check("resolvent_smoothing_c1", worst, 1.0);
  }

  // |(-B)^-beta (I - R_tau)| <= tau^beta
  {
    double worst = 0.0;
    for (double tau : {1e-3, 1e-2, 1e-1, 1.0}) {
      for (int bi = 0; bi <= 10; ++bi) {
        const double beta = bi / 10.0;
        worst = std::max(worst, resolvent_defect_norm(s, tau, beta) / std::pow(tau, beta));
      }
    }
    add_check("resolvent_defect", worst, 1.0);
  }

  // dissipativity certificate
  {
    const DissipativityReport d =
        dissipativity_margin(nl, s, model.plan(), 10000, 10.0, cfg.seed);
    add_check("dissipativity_certificate", d.max_violation, 0.0);
  }

  // contraction probe (strict dissipativity only)
  if (nl.lipschitz < mu0) {
    const ContractionReport r = contraction_probe(
        model, 0.01, SpectralVector(model.n_modes()),
        SpectralVector::unit_mode(model.n_modes(), 0, 1.0), 10000, cfg.seed);
    add_check("contraction_ratio", r.max_ratio, r.bound + 1e-12);
  }

  // moment probe (skipped for unbounded drifts, which have no uniform bound)
  if (nl.bounded) {
    EstimatorOptions options;
    options.workers = args.workers;
    const MomentReport mr =
        moment_bound_probe(model, 0.0625, 2, {100, 1000}, 200, cfg.seed, options);
    double max_est = 0.0;
    for (const auto& p : mr.points) max_est = std::max(max_est, p.estimate);
    add_check("moment_bound", max_est, mr.bound);
    add_check("moment_trend",
              std::abs(mr.trend_slope) - 2.0 * mr.trend_slope_stderr, 0.0);
  }

  emit(csv, cfg.output);
  return all_pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"spectral Galerkin / semi-implicit Euler experiments for the stochastic "
               "reaction-diffusion equation on (0,1)"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_path, "experiment config (JSON)")->required();
  std::uint64_t seed_flag = 0;
  auto* seed_opt = app.add_option("--seed", seed_flag, "override config seed");
  app.add_option("--workers", args.workers, "worker threads (0 = all cores)");
  app.add_option("--out", args.out, "override config output path");

  auto* weak = app.add_subcommand("weak-order", "finite-time weak error sweep");
  auto* inv = app.add_subcommand("invariant", "ergodic averages vs stationary oracle");
  auto* diag = app.add_subcommand("diagnostics", "operator and dissipativity checks");
  auto* mom = app.add_subcommand("moments", "uniform moment bound probe");
  auto* contr = app.add_subcommand("contraction", "shared-noise contraction probe");
  // global flags may follow the subcommand name
  for (CLI::App* sub : {weak, inv, diag, mom, contr}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    ExperimentConfig cfg = load_config(args.config_path);
    if (*seed_opt) args.seed = seed_flag;
    if (args.seed) cfg.seed = *args.seed;
    if (!args.out.empty()) cfg.output = args.out;
    if (cfg.output.empty()) {
      cfg.output = app.get_subcommands().front()->get_name() + ".csv";
    }
    if (weak->parsed()) return cmd_weak_order(std::move(cfg), args);
    if (inv->parsed()) return cmd_invariant(std::move(cfg), args);
    if (diag->parsed()) return cmd_diagnostics(std::move(cfg), args);
    if (mom->parsed()) return cmd_moments(std::move(cfg), args);
    if (contr->parsed()) return cmd_contraction(std::move(cfg), args);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IntegrationError& e) {
    std::cerr << "numerical divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
