#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "bcdpep/bcd.hpp"
#include "bcdpep/bounds.hpp"
#include "bcdpep/certificate.hpp"
#include "bcdpep/experiment.hpp"
#include "bcdpep/format.hpp"
#include "bcdpep/problem.hpp"
#include "bcdpep/sdp_export.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;

void apply_thread_cap() {
  const char* env = std::getenv("BCD_PEP_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == nullptr || *end != '\0' || v < 1) {
    std::cerr << "warning: ignoring invalid BCD_PEP_THREADS='" << env << "'\n";
    return;
  }
#ifdef _OPENMP
  omp_set_num_threads(static_cast<int>(v));
#endif
}

struct RunOptions {
  std::string instance_path;
  int dimension = 100;
  int blocks = 2;
  std::uint64_t seed = 1;
  double min_sigma = 1e-3;
  int outer_iterations = 10;
  double tol = 1e-9;
  std::string out_path;
  std::string save_instance_path;
};

int cmd_run(const RunOptions& opt) {
  bcdpep::QuadraticProblem problem =
      opt.instance_path.empty()
          ? bcdpep::random_least_squares(opt.dimension, opt.blocks, opt.seed, opt.min_sigma)
          : bcdpep::read_problem_file(opt.instance_path);
  if (!opt.save_instance_path.empty()) {
    bcdpep::write_problem_file(problem, opt.save_instance_path);
  }
  const std::vector<double> x0(static_cast<std::size_t>(problem.dimension()), 0.0);
  const bcdpep::BcdTrace trace = bcdpep::run_cyclic_bcd(problem, x0, opt.outer_iterations);

  if (opt.out_path.empty()) {
    bcdpep::write_trace_csv(trace, std::cout);
  } else {
    std::ofstream os(opt.out_path, std::ios::binary);
    if (!os) {
      std::cerr << "error: cannot open --out file " << opt.out_path << "\n";
      return kExitUsage;
    }
    bcdpep::write_trace_csv(trace, os);
  }

  const bcdpep::PepSlackReport report = bcdpep::pep_constraint_residuals(trace, problem);
  const bcdpep::PepSlackReport::Finding worst = report.worst();
  bool monotone = true;
  const int p = trace.block_count;
  for (int k = 1; k * p < static_cast<int>(trace.objective_gaps.size()); ++k) {
    if (trace.objective_gaps[static_cast<std::size_t>(k) * p] >
        trace.objective_gaps[static_cast<std::size_t>(k - 1) * p]) {
      monotone = false;
    }
  }
  std::ostream& diag = opt.out_path.empty() ? std::cerr : std::cout;
  diag << "steps=" << trace.steps() << " final_gap="
       << bcdpep::format_g17(trace.objective_gaps.back()) << "\n";
  diag << "interpolation residual min slack=" << bcdpep::format_g17(worst.slack)
       << " (family=" << worst.family << " step=" << worst.flat << " block=" << worst.block
       << "), tolerance=" << bcdpep::format_g17(-opt.tol) << "\n";
  diag << "monotone descent: " << (monotone ? "yes" : "NO") << "\n";
  if (worst.slack < -opt.tol || !monotone) {
    diag << "verification: FAIL\n";
    return kExitVerification;
  }
  diag << "verification: pass\n";
  return kExitOk;
}

struct BoundOptions {
  int n_outer = 0;
  int p = 1;
  double l_common = 1.0;
  double radius = 1.0;
  std::optional<std::int64_t> k;
  std::optional<double> l_max, l_min, l_global;
};

int cmd_bound(const BoundOptions& opt) {
  const std::int64_t k = opt.k.value_or(static_cast<std::int64_t>(opt.n_outer) + 1);
  const double nb = bcdpep::new_bound(opt.n_outer, opt.p, opt.l_common, opt.radius);
  const double beq = bcdpep::beck_bound_equal(k, opt.p, opt.l_common, opt.radius);
  std::cout << "new(N=" << opt.n_outer << ")=" << bcdpep::format_g17(nb) << "\n";
  std::cout << "beck_equal(k=" << k << ")=" << bcdpep::format_g17(beq) << "\n";
  std::cout << "ratio=" << bcdpep::format_g17(beq / nb) << "\n";
  if (opt.l_max && opt.l_min && opt.l_global) {
    const double bg =
        bcdpep::beck_bound(k, opt.p, *opt.l_max, *opt.l_min, *opt.l_global, opt.radius);
    std::cout << "beck(k=" << k << ", Lmax=" << bcdpep::format_g17(*opt.l_max)
              << ", Lmin=" << bcdpep::format_g17(*opt.l_min)
              << ", L=" << bcdpep::format_g17(*opt.l_global) << ")=" << bcdpep::format_g17(bg)
              << "\n";
  }
  return kExitOk;
}

struct CertifyOptions {
  int n_outer = 0;
  int p = 1;
  double tol = 1e-8;
  std::optional<double> t_override;
  std::string out_path;
};

int cmd_certify(const CertifyOptions& opt) {
  bcdpep::MultiplierSchedule schedule = bcdpep::lambda_schedule(opt.n_outer, opt.p);
  if (opt.t_override) {
    schedule.t = *opt.t_override;  // probe infeasible corners without touching lambda
  }
  const bcdpep::CertificateMatrix cert =
      bcdpep::build_certificate(schedule, bcdpep::equal_weights(opt.p));
  const bcdpep::PsdVerdict verdict = bcdpep::psd_check(cert.bordered, opt.tol);
  const bcdpep::MinFeasibleT mft = bcdpep::min_feasible_t(cert.two_a, schedule.tau);
  const bcdpep::RecursionCheck rec = bcdpep::recursion_check(schedule);
  const bcdpep::ClosedFormCheck cf = bcdpep::closed_form_check(schedule);

  std::cout << "schedule: N=" << opt.n_outer << " p=" << opt.p << " M=" << schedule.steps()
            << " t=" << bcdpep::format_g17(schedule.t) << " (" << schedule.t_exact.str() << ")\n";
  std::cout << "PSD: " << (verdict.psd ? "yes" : "NO")
            << ", lambda_min=" << bcdpep::format_g17(verdict.min_eigenvalue)
            << ", spectral_norm=" << bcdpep::format_g17(verdict.spectral_norm)
            << ", margin=" << bcdpep::format_g17(verdict.margin) << "\n";
  if (mft.tau_in_range) {
    std::cout << "t*=" << bcdpep::format_g17(mft.t_star)
              << " (t - t* = " << bcdpep::format_g17(schedule.t - mft.t_star) << ")\n";
  } else {
    std::cout << "t*: tau leaves range(2A), residual="
              << bcdpep::format_g17(mft.range_residual) << "\n";
  }
  std::cout << "minor recursion max abs error=" << bcdpep::format_g17(rec.max_abs_error) << "\n";
  std::cout << "closed form max rel error=" << bcdpep::format_g17(cf.max_rel_error) << "\n";

  if (!opt.out_path.empty()) {
    std::ofstream os(opt.out_path, std::ios::binary);
    if (!os) {
      std::cerr << "error: cannot open --out file " << opt.out_path << "\n";
      return kExitUsage;
    }
    bcdpep::write_certificate(schedule, cert, os);
  }

  const bool t_ok = mft.tau_in_range && mft.t_star <= schedule.t + opt.tol;
  if (!verdict.psd || !t_ok) {
    std::cout << "verification: FAIL\n";
    return kExitVerification;
  }
  std::cout << "verification: pass\n";
  return kExitOk;
}

struct ExportOptions {
  int n_outer = 0;
  int p = 1;
  std::string out_path;
};

int cmd_export_sdpa(const ExportOptions& opt) {
  const bcdpep::SdpModel model =
      bcdpep::build_sdp(opt.n_outer, opt.p, bcdpep::equal_weights(opt.p));
  bcdpep::write_sdpa_file(model, opt.out_path);
  const bcdpep::MultiplierSchedule schedule = bcdpep::lambda_schedule(opt.n_outer, opt.p);
  std::vector<double> x = schedule.lambda;
  x.push_back(schedule.t);
  const double slack = bcdpep::feasibility_slack(model, x);
  std::cout << "wrote " << opt.out_path << ": vars=" << model.num_vars << " blocks="
            << model.block_sizes[0] << " " << model.block_sizes[1]
            << " entries=" << model.entries.size() << "\n";
  std::cout << "schedule point feasibility slack=" << bcdpep::format_g17(slack) << "\n";
  return kExitOk;
}

int cmd_figure1(const bcdpep::ExperimentConfig& config) {
  const bcdpep::Figure1Result result = bcdpep::run_figure1(config);
  bcdpep::write_summary(config, result, std::cout);
  std::cout << "wrote " << result.csv_paths.size() << " csv files and " << result.summary_path
            << "\n";
  return result.ok() ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();

  CLI::App app{"cyclic block coordinate descent: bounds, dual certificate, experiments"};
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "run the method on an instance, emit a trace CSV");
  run->add_option("--instance", run_opt.instance_path, "instance file (omit to generate)");
  run->add_option("--n", run_opt.dimension, "dimension of the generated instance");
  run->add_option("--p", run_opt.blocks, "block count of the generated instance");
  run->add_option("--seed", run_opt.seed, "generator seed");
  run->add_option("--min-sigma", run_opt.min_sigma, "smallest singular value accepted");
  run->add_option("--N", run_opt.outer_iterations, "last outer iteration index (cycles 0..N run)");
  run->add_option("--tol", run_opt.tol, "interpolation residual tolerance");
  run->add_option("--out", run_opt.out_path, "trace CSV path (default: stdout)");
  run->add_option("--save-instance", run_opt.save_instance_path, "write the instance here");

  BoundOptions bound_opt;
  CLI::App* bound = app.add_subcommand("bound", "evaluate both analytic bounds");
  bound->add_option("--N", bound_opt.n_outer, "outer iteration count of the new bound")->required();
  bound->add_option("--p", bound_opt.p, "block count")->required();
  bound->add_option("--Lc", bound_opt.l_common, "common block smoothness constant");
  bound->add_option("--R", bound_opt.radius, "initial level radius R(x0)");
  bound->add_option("--k", bound_opt.k, "prior-bound iteration index (default N+1)");
  bound->add_option("--Lmax", bound_opt.l_max, "largest block constant (general prior bound)");
  bound->add_option("--Lmin", bound_opt.l_min, "smallest block constant (general prior bound)");
  bound->add_option("--L", bound_opt.l_global, "full-gradient constant (general prior bound)");

  CertifyOptions certify_opt;
  CLI::App* certify = app.add_subcommand("certify", "build and verify the dual certificate");
  certify->add_option("--N", certify_opt.n_outer, "outer iteration count")->required();
  certify->add_option("--p", certify_opt.p, "block count")->required();
  certify->add_option("--tol", certify_opt.tol, "PSD acceptance tolerance");
  certify->add_option("--t", certify_opt.t_override, "override the schedule's t value");
  certify->add_option("--out", certify_opt.out_path, "write the certificate dump here");

  ExportOptions export_opt;
  CLI::App* exp = app.add_subcommand("export-sdpa", "serialize the dual problem in SDPA format");
  exp->add_option("--N", export_opt.n_outer, "outer iteration count")->required();
  exp->add_option("--p", export_opt.p, "block count")->required();
  exp->add_option("output", export_opt.out_path, "output file path")->required();

  bcdpep::ExperimentConfig fig;
  fig.output_dir = "figure1";
  bool no_residuals = false;
  bool no_gnuplot = false;
  CLI::App* figure1 = app.add_subcommand("figure1", "convergence experiment: gaps vs both bounds");
  figure1->add_option("--n", fig.dimension, "instance dimension");
  figure1->add_option("--p", fig.block_counts, "block counts (repeatable)")->delimiter(',');
  figure1->add_option("--N", fig.cycles, "cycle count (rows 0..N)");
  figure1->add_option("--seed", fig.seeds, "seeds (repeatable)")->delimiter(',');
  figure1->add_option("--min-sigma", fig.min_sigma, "smallest singular value accepted");
  figure1->add_option("--tol", fig.slack_tolerance, "interpolation residual tolerance");
  figure1->add_option("--out", fig.output_dir, "output directory");
  figure1->add_flag("--no-residual-check", no_residuals, "skip the interpolation residual check");
  figure1->add_flag("--no-gnuplot", no_gnuplot, "skip the gnuplot script");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the offending flag to stderr
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_opt);
    if (bound->parsed()) return cmd_bound(bound_opt);
    if (certify->parsed()) return cmd_certify(certify_opt);
    if (exp->parsed()) return cmd_export_sdpa(export_opt);
    if (figure1->parsed()) {
      fig.check_residuals = !no_residuals;
      fig.emit_gnuplot = !no_gnuplot;
      return cmd_figure1(fig);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
