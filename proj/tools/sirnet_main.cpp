// sirnet command-line interface: fit, predict, score, cv, holdout, simulate,
// export-influence. Reads a run-config JSON plus flags, writes versioned JSON
// and CSV artifacts. All randomness comes from config/flag seeds.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sir/eval.hpp"
#include "sir/fit.hpp"
#include "sir/inference.hpp"
#include "sir/io.hpp"
#include "sir/log.hpp"
#include "sir/sim.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitIdentifiability = 4;

int exit_code_for(const sir::SirError& e) {
  switch (e.code()) {
    case sir::ErrorCode::singular_design:
    case sir::ErrorCode::divergence:
    case sir::ErrorCode::boundary_mle:
    case sir::ErrorCode::singular_information:
      return kExitConvergence;
    case sir::ErrorCode::non_identifiable:
      return kExitIdentifiability;
    default:
      return kExitInput;
  }
}

struct CommonArgs {
  std::string config;
  std::string out;
};

sir::SirFit fit_dataset(const sir::io::RunConfig& cfg,
                        const sir::io::Dataset& ds) {
  SIR_LOG(1) << "fitting: n=" << ds.y.n << " T=" << ds.y.T << " q=" << ds.Z.q
             << " p=" << ds.Ws.p;
  return sir::fit_sir(ds.y, ds.Z, ds.Ws, ds.Wr, cfg.estimator);
}

void print_fit_summary(const sir::SirFit& fit, const sir::VcovResult& vcov) {
  std::cout << "log-likelihood " << fit.loglik() << " after "
            << fit.outer_iterations << " outer iterations"
            << (fit.converged ? "" : " (NOT converged)") << "\n";
  const auto& p = fit.params;
  std::cout << "theta:";
  for (long k = 0; k < p.theta.size(); ++k) std::cout << ' ' << p.theta[k];
  std::cout << "\nalpha:";
  for (long k = 0; k < p.alpha.size(); ++k) std::cout << ' ' << p.alpha[k];
  std::cout << "\nbeta: ";
  for (long k = 0; k < p.beta.size(); ++k) std::cout << ' ' << p.beta[k];
  std::cout << "\n";
  for (size_t k = 0; k < vcov.names.size(); ++k)
    std::cout << "  " << vcov.names[k] << "  se(hessian)="
              << vcov.se_hessian[static_cast<long>(k)]
              << "  se(sandwich)=" << vcov.se_sandwich[static_cast<long>(k)]
              << "\n";
}

void print_comparison(const sir::ComparisonReport& report) {
  for (const auto& ms : report.models) {
    std::cout << ms.model << ":";
    for (const char* rule :
         {"dawid_sebastiani", "logarithmic", "brier", "spherical", "rmse"}) {
      const auto it = ms.summary.find(rule);
      if (it != ms.summary.end())
        std::cout << "  " << rule << " " << it->second.mean << " ["
                  << it->second.min << ", " << it->second.max << "]";
    }
    std::cout << "\n";
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"social influence regression for longitudinal dyadic count networks"};
  app.require_subcommand(1);

  CommonArgs fit_args, predict_args, score_args, cv_args, holdout_args, exp_args;
  std::string predict_fit, score_predictions, exp_fit, exp_side = "sender";
  std::string exp_period;
  double exp_threshold = 0.0;
  std::string sim_config, sim_outdir;
  std::vector<std::string> cv_external;
  int cv_k = -1, cv_m = -1;
  long cv_seed = -1;
  std::vector<int> holdout_horizons;

  auto* c_fit = app.add_subcommand("fit", "fit the model and write fit.json");
  c_fit->add_option("--config", fit_args.config, "run-config JSON")->required();
  c_fit->add_option("--out", fit_args.out, "output path")->default_val("fit.json");

  auto* c_predict =
      app.add_subcommand("predict", "one-step-ahead rates for all modeled cells");
  c_predict->add_option("--config", predict_args.config)->required();
  c_predict->add_option("--fit", predict_fit, "fit.json path")->required();
  c_predict->add_option("--out", predict_args.out)->default_val("predictions.csv");

  auto* c_score = app.add_subcommand("score", "score predictions against observed counts");
  c_score->add_option("--config", score_args.config)->required();
  c_score->add_option("--predictions", score_predictions)->required();
  c_score->add_option("--out", score_args.out)->default_val("scores.json");

  auto* c_cv = app.add_subcommand("cv", "random-slice cross validation against the GLM baseline");
  c_cv->add_option("--config", cv_args.config)->required();
  c_cv->add_option("--out", cv_args.out)->default_val("cv_report.json");
  c_cv->add_option("--k", cv_k, "fold count (overrides config)");
  c_cv->add_option("--m", cv_m, "slices held out per fold (overrides config)");
  c_cv->add_option("--seed", cv_seed, "plan seed (overrides config)");
  c_cv->add_option("--external", cv_external,
                   "attach external per-fold scores: name=path.csv");

  auto* c_holdout = app.add_subcommand("holdout", "last-x-period temporal holdout comparison");
  c_holdout->add_option("--config", holdout_args.config)->required();
  c_holdout->add_option("--out", holdout_args.out)->default_val("holdout_report.json");
  c_holdout->add_option("--horizons", holdout_horizons, "holdout lengths (overrides config)");

  auto* c_sim = app.add_subcommand("simulate", "draw a synthetic dataset from the model");
  c_sim->add_option("--sim-config", sim_config, "simulation config JSON")->required();
  c_sim->add_option("--out-dir", sim_outdir, "output directory")->default_val("sim_out");

  auto* c_exp = app.add_subcommand("export-influence",
                                   "edge list of fitted influence scores at one period");
  c_exp->add_option("--config", exp_args.config)->required();
  c_exp->add_option("--fit", exp_fit)->required();
  c_exp->add_option("--side", exp_side, "sender or receiver")->default_val("sender");
  c_exp->add_option("--period", exp_period, "period label (default: last modeled)");
  c_exp->add_option("--threshold", exp_threshold)->default_val(0.0);
  c_exp->add_option("--out", exp_args.out)->default_val("influence_edges.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_fit->parsed()) {
      const auto cfg = sir::io::load_run_config(fit_args.config);
      const auto ds = sir::io::load_dataset(cfg);
      const sir::SirFit fit = fit_dataset(cfg, ds);
      sir::SirData data{&ds.y, &ds.Z, &ds.Ws, &ds.Wr, fit.mask};
      const sir::VcovResult vcov = sir::compute_vcov(fit, data);
      sir::io::write_fit_json(fit_args.out, fit, vcov, ds);
      print_fit_summary(fit, vcov);
      std::cout << "wrote " << fit_args.out << "\n";
    } else if (c_predict->parsed()) {
      const auto cfg = sir::io::load_run_config(predict_args.config);
      const auto ds = sir::io::load_dataset(cfg);
      const auto lf = sir::io::load_fit_json(predict_fit);
      const sir::PredictorTensor x = sir::lag_log_transform(ds.y);
      const sir::Cube mu = sir::predict_mu(lf.params, ds.Z, ds.Ws, ds.Wr, x);
      sir::io::write_predictions_csv(predict_args.out, mu, ds.y);
      std::cout << "wrote " << predict_args.out << "\n";
    } else if (c_score->parsed()) {
      const auto cfg = sir::io::load_run_config(score_args.config);
      const auto ds = sir::io::load_dataset(cfg);
      auto [y, mu] = sir::io::load_predictions_csv(score_predictions, ds.y);
      const sir::ScoreReport report = sir::score_forecast(y, mu, cfg.scoring);
      sir::io::write_scores_json(score_args.out, report);
      std::cout << "cells " << report.cells << "  DS " << report.dawid_sebastiani
                << "  log " << report.logarithmic << "  brier " << report.brier
                << "  spherical " << report.spherical << "  rmse " << report.rmse
                << "\n";
    } else if (c_cv->parsed()) {
      const auto cfg = sir::io::load_run_config(cv_args.config);
      const auto ds = sir::io::load_dataset(cfg);
      sir::EvalOptions opts;
      opts.sir = cfg.estimator;
      opts.scoring = cfg.scoring;
      const int k = cv_k > 0 ? cv_k : cfg.cv.k;
      const int m = cv_m > 0 ? cv_m : cfg.cv.m;
      const unsigned seed =
          cv_seed >= 0 ? static_cast<unsigned>(cv_seed) : cfg.cv.seed;
      sir::ComparisonReport report = sir::run_cv(ds.y, ds.Z, ds.Ws, ds.Wr, k, m,
                                                 seed, opts, cfg.cv.overlap);
      for (const auto& ext : cv_external) {
        const auto eq = ext.find('=');
        if (eq == std::string::npos)
          sir::fail(sir::ErrorCode::invalid_input,
                    "--external expects name=path.csv");
        sir::attach_external_scores(
            report, ext.substr(0, eq),
            sir::io::load_external_scores(ext.substr(eq + 1)));
      }
      sir::io::write_comparison_json(cv_args.out, report, "sirnet-cv-report-v1");
      print_comparison(report);
      std::cout << "wrote " << cv_args.out << "\n";
    } else if (c_holdout->parsed()) {
      const auto cfg = sir::io::load_run_config(holdout_args.config);
      const auto ds = sir::io::load_dataset(cfg);
      sir::EvalOptions opts;
      opts.sir = cfg.estimator;
      opts.scoring = cfg.scoring;
      const auto horizons =
          holdout_horizons.empty() ? cfg.horizons : holdout_horizons;
      const sir::ComparisonReport report =
          sir::run_temporal_holdout(ds.y, ds.Z, ds.Ws, ds.Wr, horizons, opts);
      sir::io::write_comparison_json(holdout_args.out, report,
                                     "sirnet-holdout-report-v1");
      print_comparison(report);
      std::cout << "wrote " << holdout_args.out << "\n";
    } else if (c_sim->parsed()) {
      const sir::SimConfig cfg = sir::io::load_sim_config(sim_config);
      const sir::SimResult sim = sir::simulate(cfg);
      sir::io::write_sim_outputs(sim_outdir, cfg, sim);
      std::cout << "wrote events/covariates/run/truth under " << sim_outdir
                << "\n";
    } else if (c_exp->parsed()) {
      const auto cfg = sir::io::load_run_config(exp_args.config);
      const auto ds = sir::io::load_dataset(cfg);
      const auto lf = sir::io::load_fit_json(exp_fit);
      const bool sender = exp_side == "sender";
      if (!sender && exp_side != "receiver")
        sir::fail(sir::ErrorCode::invalid_input,
                  "--side must be sender or receiver");
      int m = ds.y.modeled_periods() - 1;
      if (!exp_period.empty()) {
        m = -1;
        for (int t = 1; t < ds.y.T; ++t)
          if (ds.y.period_labels[t] == exp_period) m = t - 1;
        if (m < 0)
          sir::fail(sir::ErrorCode::invalid_input,
                    "period '" + exp_period + "' is not a modeled period");
      }
      sir::io::export_influence(exp_args.out, sender ? ds.Ws : ds.Wr,
                                sender ? lf.params.alpha : lf.params.beta, m,
                                ds.y.actor_labels, exp_threshold);
      std::cout << "wrote " << exp_args.out << "\n";
    }
  } catch (const sir::SirError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
