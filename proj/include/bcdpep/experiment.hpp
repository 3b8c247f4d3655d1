#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bcdpep/bcd.hpp"
#include "bcdpep/problem.hpp"

namespace bcdpep {

// Convergence experiment: random least-squares instances, cyclic block
// descent from x0 = 0, empirical gaps against both analytic bounds.
struct ExperimentConfig {
  int dimension = 100;
  std::vector<int> block_counts = {2, 5, 20, 100};
  int cycles = 200;  // rows k = 0..cycles, one per completed cycle
  std::vector<std::uint64_t> seeds = {1};
  double min_sigma = 1e-3;
  double slack_tolerance = 1e-9;  // interpolation-residual acceptance level
  std::string output_dir = ".";
  bool check_residuals = true;
  bool emit_gnuplot = true;

  void validate() const;  // throws std::invalid_argument on bad fields
};

// One CSV row: the gap after `cycle` full cycles and the two bounds.  The
// certificate bound printed at row k is the one proved for the point after k
// cycles (outer count k-1; row 0 repeats the first bound level).  `matched`
// is the same bound evaluated at outer count k, the reading used by the
// bound-vs-gap acceptance check.
struct FigureRow {
  int cycle = 0;
  double gap = 0.0;
  double beck = 0.0;
  double certificate = 0.0;
  double matched = 0.0;
};

struct BoundViolation {
  int cycle = 0;
  double gap = 0.0;
  double bound = 0.0;
  bool strict = false;  // true: proved alignment (outer count k-1); false: matched
};

struct FigureSeries {
  int block_count = 0;
  std::uint64_t seed = 0;
  int dimension = 0;
  double l_common = 0.0;     // max_i L_i, drives both equal-constant bounds
  double l_global = 0.0;     // full-gradient smoothness
  double l_min_block = 0.0;  // min_i L_i, enters the prior bound
  double radius = 0.0;       // R(x0)
  double optimal_value = 0.0;
  bool unequal_smoothness = false;
  std::vector<FigureRow> rows;  // size cycles + 1
  std::vector<BoundViolation> violations;
  int strict_violations = 0;
  int matched_violations = 0;
  bool monotone = true;  // gaps nonincreasing across rows
  bool residuals_checked = false;
  double min_residual_slack = 0.0;
  PepSlackReport::Finding worst_residual;

  bool passes(double slack_tolerance) const;
};

FigureSeries compute_series(const QuadraticProblem& problem, int cycles,
                            bool check_residuals);

// "k,gap,beck,new" rows preceded by '#' metadata; 17-significant-digit
// decimals, LF endings, no timestamps (byte-identical across reruns).
void write_series_csv(const FigureSeries& s, std::ostream& os);

struct Figure1Result {
  std::vector<FigureSeries> series;  // config order: p-major, seed-minor
  std::vector<std::string> csv_paths;
  std::string summary_path;
  std::string gnuplot_path;  // empty when not emitted
  int total_strict_violations = 0;
  int total_matched_violations = 0;
  bool residuals_ok = true;
  bool monotone_ok = true;

  bool ok() const {
    return total_strict_violations == 0 && total_matched_violations == 0 &&
           residuals_ok && monotone_ok;
  }
};

// Generates one instance per (p, seed), runs the sweep (pairs in parallel),
// writes figure1_p{p}_seed{seed}.csv per pair plus summary.txt and an
// optional gnuplot script into output_dir.
Figure1Result run_figure1(const ExperimentConfig& config);

void write_summary(const ExperimentConfig& config, const Figure1Result& r,
                   std::ostream& os);

}  // namespace bcdpep
