// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.  Each criterion is self-contained and states its tolerance
// inline; timings are wall-clock.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bcdpep/bcd.hpp"
#include "bcdpep/bounds.hpp"
#include "bcdpep/certificate.hpp"
#include "bcdpep/experiment.hpp"
#include "bcdpep/linalg.hpp"
#include "bcdpep/problem.hpp"
#include "bcdpep/sdp_export.hpp"

namespace {

namespace linalg = bcdpep::linalg;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int g_failures = 0;

void report(int k, const std::string& name, bool pass, const std::string& detail) {
  std::cout << "[acceptance] criterion " << k << " " << name << ": " << (pass ? "PASS" : "FAIL");
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << "\n" << std::flush;
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

std::string fmt_fixed(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << v;
  return os.str();
}

// ---- criterion 1: bordered certificate PSD on the (N<=15, p<=8) grid -------
void criterion_psd_grid() {
  const auto start = Clock::now();
  double worst_ratio = 0.0;  // min of lambda_min / (1 + ||S||_2); >= -1e-8 required
  bool all_psd = true;
  for (int n = 0; n <= 15; ++n) {
    for (int p = 1; p <= 8; ++p) {
      const bcdpep::MultiplierSchedule s = bcdpep::lambda_schedule(n, p);
      const bcdpep::CertificateMatrix c = bcdpep::build_certificate(s, bcdpep::equal_weights(p));
      const bcdpep::PsdVerdict v = bcdpep::psd_check(c.bordered, 1e-8);
      const double ratio = v.min_eigenvalue / (1.0 + v.spectral_norm);
      worst_ratio = std::min(worst_ratio, ratio);
      if (ratio < -1e-8) all_psd = false;
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = all_psd && elapsed < 30.0;
  report(1, "bordered certificate PSD on the N<=15, p<=8 grid", pass,
         "worst margin ratio " + fmt(worst_ratio) + ", " + fmt_fixed(elapsed) + " s (budget 30 s)");
}

// ---- criterion 2: smallest feasible corner value ---------------------------
void criterion_min_corner() {
  bool pass = true;
  double worst_excess = -1.0;  // max of t_star - t; must stay <= 1e-8
  for (int n = 0; n <= 15; ++n) {
    for (int p = 1; p <= 8; ++p) {
      const bcdpep::MultiplierSchedule s = bcdpep::lambda_schedule(n, p);
      const bcdpep::MinFeasibleT m =
          bcdpep::min_feasible_t(bcdpep::build_dual_matrix(s, bcdpep::equal_weights(p)), s.tau);
      if (!m.tau_in_range) pass = false;
      worst_excess = std::max(worst_excess, m.t_star - s.t);
      if (m.t_star > s.t + 1e-8) pass = false;
    }
  }
  const bcdpep::MultiplierSchedule one = bcdpep::lambda_schedule(0, 1);
  const bcdpep::MinFeasibleT m1 =
      bcdpep::min_feasible_t(bcdpep::build_dual_matrix(one, bcdpep::equal_weights(1)), one.tau);
  const double hand_err = std::abs(m1.t_star - 1.0 / 3.0);
  if (hand_err > 1e-12) pass = false;
  report(2, "smallest feasible corner value never exceeds the schedule", pass,
         "worst excess " + fmt(worst_excess) + ", one-step value off by " + fmt(hand_err));
}

// ---- criterion 3: certified bound closed form and exact scaling ------------
void criterion_bound_identity() {
  bool pass = bcdpep::new_bound(0, 1, 1.0, 1.0) == 1.0 / 6.0;
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<int> pick_n(0, 1000);
  std::uniform_int_distribution<int> pick_p(1, 128);
  std::uniform_real_distribution<double> pos(0.1, 10.0);
  int exact = 0;
  const int draws = 1000;
  for (int i = 0; i < draws; ++i) {
    const int n = pick_n(gen);
    const int p = pick_p(gen);
    const double lc = pos(gen);
    const double r = pos(gen);
    const double t = bcdpep::schedule_t(n, p);
    if (bcdpep::new_bound(n, p, lc, r) == 0.5 * p * lc * (r * r) * t) ++exact;
  }
  if (exact != draws) pass = false;
  report(3, "certified bound equals 0.5*p*Lc*R^2*t bit for bit", pass,
         "one-step value 1/6 and " + std::to_string(exact) + "/" + std::to_string(draws) +
             " random draws exact");
}

// ---- criterion 4: ratio limit and pointwise dominance ----------------------
void criterion_bound_ratio() {
  bool pass = true;
  double worst_rel = 0.0;
  for (int p : {1, 2, 5, 20}) {
    const double limit = 16.0 * (1.0 + static_cast<double>(p) * p * p);
    const double ratio = bcdpep::bound_ratio(100000, p, 1.0, 1.0);
    const double rel = std::abs(ratio - limit) / limit;
    worst_rel = std::max(worst_rel, rel);
    if (rel > 0.01) pass = false;
  }
  int dominated = 0, total = 0;
  for (int p : {2, 5, 20, 100}) {
    for (int n = 1; n <= 1000; ++n) {
      ++total;
      if (bcdpep::new_bound(n, p, 1.0, 1.0) <
          bcdpep::beck_bound_equal(static_cast<std::int64_t>(n) + 1, p, 1.0, 1.0))
        ++dominated;
    }
  }
  if (dominated != total) pass = false;
  report(4, "prior-to-new bound ratio reaches 16(1+p^3) and dominance is pointwise", pass,
         "worst limit deviation " + fmt(worst_rel) + " (tol 1e-2), " + std::to_string(dominated) +
             "/" + std::to_string(total) + " pairs dominated");
}

// ---- criteria 5 and 9: experiment sweep ------------------------------------
struct SweepOutcome {
  bool bounds_pass = true;
  bool slacks_pass = true;
  double max_gap_ratio = 0.0;       // gap / matched bound, over all rows
  double min_slack = 0.0;           // most negative interpolation slack
  int violations = 0;
  double elapsed = 0.0;
  std::string first_violation;
};

SweepOutcome run_sweep() {
  const auto start = Clock::now();
  SweepOutcome out;
  for (int p : {2, 5, 20, 100}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const bcdpep::QuadraticProblem prob = bcdpep::random_least_squares(100, p, seed);
      const bcdpep::FigureSeries s = bcdpep::compute_series(prob, 200, true);
      // Row 0 is the starting point, which no bound covers; compare produced
      // iterates only, matching the violation counters.
      for (std::size_t r = 1; r < s.rows.size(); ++r) {
        const bcdpep::FigureRow& row = s.rows[r];
        if (row.matched > 0.0)
          out.max_gap_ratio = std::max(out.max_gap_ratio, row.gap / row.matched);
      }
      out.violations += s.strict_violations + s.matched_violations;
      if ((s.strict_violations || s.matched_violations) && out.first_violation.empty()) {
        const bcdpep::BoundViolation& v = s.violations.front();
        out.first_violation = "p=" + std::to_string(p) + " seed=" + std::to_string(seed) +
                              " k=" + std::to_string(v.cycle) + " gap=" + fmt(v.gap) +
                              " bound=" + fmt(v.bound);
      }
      out.min_slack = std::min(out.min_slack, s.min_residual_slack);
      if (!s.monotone) out.bounds_pass = false;
    }
  }
  if (out.violations > 0) out.bounds_pass = false;
  out.elapsed = seconds_since(start);
  if (out.elapsed >= 120.0) out.bounds_pass = false;
  out.slacks_pass = out.min_slack >= -1e-9;
  return out;
}

void criterion_empirical_bounds(const SweepOutcome& sweep) {
  std::string detail = "20 seeds x p in {2,5,20,100}, n=100, 200 cycles; max gap/bound " +
                       fmt(sweep.max_gap_ratio) + ", " + fmt_fixed(sweep.elapsed) +
                       " s (budget 120 s)";
  if (!sweep.first_violation.empty()) detail += "; first violation " + sweep.first_violation;
  report(5, "empirical gaps stay below the certified bound at matched cycles",
         sweep.bounds_pass, detail);
}

// ---- criterion 6: block descent residuals ----------------------------------
void criterion_block_residuals() {
  std::mt19937_64 gen(61);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int blocks[] = {2, 3, 4};
  double min_residual = 0.0;
  int evaluations = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const int p = blocks[inst % 3];
    const bcdpep::QuadraticProblem prob =
        bcdpep::random_least_squares(12, p, 2000 + static_cast<std::uint64_t>(inst));
    std::uniform_int_distribution<int> pick_block(0, p - 1);
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<double> x(12), y;
      for (double& v : x) v = normal(gen);
      y = x;
      const int i = pick_block(gen);
      const int off = prob.partition.block_offset(i);
      const int sz = prob.partition.block_size(i);
      for (int j = off; j < off + sz; ++j) y[j] += normal(gen);
      min_residual = std::min(min_residual, bcdpep::block_descent_residual(prob, x, y, i));
      ++evaluations;
    }
  }
  report(6, "block descent residuals nonnegative on randomized moves",
         min_residual >= -1e-10,
         std::to_string(evaluations) + " evaluations, min residual " + fmt(min_residual) +
             " (tol -1e-10)");
}

// ---- criterion 7: rank-one restriction of the bilinear infimum -------------
void criterion_rank_one_restriction() {
  std::mt19937_64 gen(71);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 6);
  int cross_checked = 0;
  double worst_cross = 0.0;
  double worst_gap = 0.0;
  bool gap_pass = true;
  const int instances = 100;
  for (int inst = 0; inst < instances; ++inst) {
    const int m = dim(gen);
    const int n = dim(gen);
    // Full-rank PSD factors keep both routes bounded and the dense solve exact.
    linalg::Matrix g(m, m), f(n, n);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) g(r, c) = normal(gen);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) f(r, c) = normal(gen);
    const linalg::Matrix a_quad = linalg::gram(g);
    const linalg::Matrix b_quad = linalg::gram(f);
    std::vector<double> a_lin(n), b_lin(m);
    for (double& v : a_lin) v = normal(gen);
    for (double& v : b_lin) v = normal(gen);

    const bcdpep::QuadraticFormInfimum r =
        bcdpep::quadratic_form_infima(a_quad, b_quad, a_lin, b_lin);
    if (!r.matrix_bounded || !r.vector_bounded) {
      gap_pass = false;
      continue;
    }

    // Independent dense check of the unrestricted infimum: stack the columns
    // of X into z, H[(i,j) block] = a_quad(i,j) * b_quad, linear block i is
    // 2*b_i*a; then inf = 0.5*c^T z with H z = -c/2.
    const int nm = n * m;
    linalg::Matrix h(nm, nm);
    std::vector<double> c_vec(nm);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j)
        for (int r2 = 0; r2 < n; ++r2)
          for (int c2 = 0; c2 < n; ++c2)
            h(i * n + r2, j * n + c2) = a_quad(i, j) * b_quad(r2, c2);
      for (int r2 = 0; r2 < n; ++r2) c_vec[i * n + r2] = 2.0 * b_lin[i] * a_lin[r2];
    }
    std::vector<double> rhs(nm);
    for (int i = 0; i < nm; ++i) rhs[i] = -0.5 * c_vec[i];
    const linalg::LuFactors lu = linalg::lu_factor(h);
    if (lu.singular) {
      gap_pass = false;
      continue;
    }
    const std::vector<double> z = linalg::lu_solve(lu, rhs);
    double oracle = 0.0;
    for (int i = 0; i < nm; ++i) oracle += c_vec[i] * z[i];
    oracle *= 0.5;

    // Two independent solve routes (library route vs Kronecker normal
    // equations) agree to the same relative scale the gap criterion uses;
    // condition numbers multiply across the Kronecker factors, so demanding
    // much more than 1e-6 here would just measure conditioning of the draw.
    const double cross = std::abs(r.matrix_infimum - oracle) / (1.0 + std::abs(oracle));
    worst_cross = std::max(worst_cross, cross);
    if (cross <= 1e-6) ++cross_checked;

    const double gap = r.gap();
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-6 * (1.0 + std::abs(r.matrix_infimum))) gap_pass = false;
  }
  const std::string detail =
      "unrestricted infimum cross-check " + std::to_string(cross_checked) + "/" +
      std::to_string(instances) + " within 1e-6 (worst " + fmt(worst_cross) +
      "); restriction gap up to " + fmt(worst_gap) +
      " vs tol 1e-6: the rank-one restriction genuinely raises the infimum whenever the" +
      " linear factor is not an eigenvector of the quadratic factor";
  report(7, "rank-one restriction reproduces the full bilinear infimum", gap_pass, detail);
}

// ---- criterion 8: determinant recursion ------------------------------------
void criterion_recursion() {
  bool pass = true;
  double worst_rel = 0.0;
  for (int n = 0; n <= 10; ++n) {
    for (int p = 1; p <= 5; ++p) {
      const bcdpep::MultiplierSchedule s = bcdpep::lambda_schedule(n, p);
      const bcdpep::RecursionCheck rc = bcdpep::recursion_check(s);
      const double rel = rc.max_abs_error / (1.0 + rc.max_abs_det);
      worst_rel = std::max(worst_rel, rel);
      if (rel > 1e-10) pass = false;
      if (rc.recursion[0] != 2.0 * s.lambda[0]) pass = false;
      if (s.steps() >= 2 &&
          rc.recursion[1] != 4.0 * s.lambda[0] * s.lambda[1] -
                                 (s.lambda[1] - s.lambda[0]) * (s.lambda[1] - s.lambda[0]))
        pass = false;
    }
  }
  report(8, "leading-minor recursion matches LU determinants", pass,
         "N<=10, p<=5; worst relative error " + fmt(worst_rel) +
             " (tol 1e-10), base cases exact");
}

// ---- criterion 9: interpolation slacks on the sweep traces -----------------
void criterion_sweep_slacks(const SweepOutcome& sweep) {
  report(9, "interpolation slacks nonnegative on all experiment traces", sweep.slacks_pass,
         "min slack " + fmt(sweep.min_slack) + " (tol -1e-9)");
}

// ---- criterion 10: SDPA round trip and schedule feasibility ----------------
void criterion_sdpa() {
  bool pass = true;
  double min_slack = 0.0;
  for (int n = 0; n <= 10; ++n) {
    for (int p = 1; p <= 4; ++p) {
      const bcdpep::SdpModel model = bcdpep::build_sdp(n, p, bcdpep::equal_weights(p));
      std::ostringstream os;
      bcdpep::write_sdpa(model, os);
      std::istringstream is(os.str());
      const bcdpep::SdpModel back = bcdpep::read_sdpa(is);
      if (!(back == model)) pass = false;
      const bcdpep::MultiplierSchedule s = bcdpep::lambda_schedule(n, p);
      std::vector<double> x = s.lambda;
      x.push_back(s.t);
      const double slack = bcdpep::feasibility_slack(model, x);
      min_slack = std::min(min_slack, slack);
      if (slack < -1e-8) pass = false;
    }
  }
  report(10, "SDPA text round trip is the identity and the schedule point is feasible", pass,
         "N<=10, p<=4; min feasibility slack " + fmt(min_slack) + " (tol -1e-8)");
}

// ---- criterion 11: byte-identical experiment output ------------------------
std::map<std::string, std::string> read_tree(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream is(entry.path(), std::ios::binary);
    std::ostringstream body;
    body << is.rdbuf();
    files[entry.path().lexically_relative(dir).string()] = body.str();
  }
  return files;
}

void criterion_determinism() {
  const char* cli = std::getenv("BCDPEP_CLI");
  if (cli == nullptr || *cli == '\0') {
    report(11, "experiment output is byte-identical across two runs", false,
           "BCDPEP_CLI is not set; cannot launch the command-line binary");
    return;
  }
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "bcdpep_acceptance_figure1";
  fs::remove_all(base);
  const fs::path dir_a = base / "a";
  const fs::path dir_b = base / "b";
  const std::string common =
      std::string("\"") + cli + "\" figure1 --n 16 --p 2,4 --N 6 --seed 1,2 --out \"";
  const int rc_a = std::system((common + dir_a.string() + "\" >/dev/null 2>&1").c_str());
  const int rc_b = std::system((common + dir_b.string() + "\" >/dev/null 2>&1").c_str());
  bool pass = rc_a == 0 && rc_b == 0;
  std::string detail = "exit codes " + std::to_string(rc_a) + "/" + std::to_string(rc_b);
  if (pass) {
    const auto tree_a = read_tree(dir_a);
    const auto tree_b = read_tree(dir_b);
    if (tree_a.empty() || tree_a.size() != tree_b.size()) pass = false;
    int identical = 0;
    for (const auto& [name, body] : tree_a) {
      const auto it = tree_b.find(name);
      if (it == tree_b.end() || it->second != body) {
        pass = false;
        detail += ", file " + name + " differs";
      } else {
        ++identical;
      }
    }
    detail += ", " + std::to_string(identical) + "/" + std::to_string(tree_a.size()) +
              " files byte-identical";
  }
  fs::remove_all(base);
  report(11, "experiment output is byte-identical across two runs", pass, detail);
}

}  // namespace

int main() {
  std::cout << "[acceptance] running 11 criteria\n" << std::flush;
  criterion_psd_grid();
  criterion_min_corner();
  criterion_bound_identity();
  criterion_bound_ratio();
  const SweepOutcome sweep = run_sweep();
  criterion_empirical_bounds(sweep);
  criterion_block_residuals();
  criterion_rank_one_restriction();
  criterion_recursion();
  criterion_sweep_slacks(sweep);
  criterion_sdpa();
  criterion_determinism();
  std::cout << "[acceptance] " << (11 - g_failures) << " of 11 criteria passed\n";
  return g_failures == 0 ? 0 : 1;
}
