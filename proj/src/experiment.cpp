#include "bcdpep/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bcdpep/bounds.hpp"
#include "bcdpep/format.hpp"

namespace bcdpep {

void ExperimentConfig::validate() const {
  if (dimension < 1) throw std::invalid_argument("ExperimentConfig: dimension must be >= 1");
  if (cycles < 1) throw std::invalid_argument("ExperimentConfig: cycles must be >= 1");
  if (seeds.empty()) throw std::invalid_argument("ExperimentConfig: seeds must be nonempty");
  if (block_counts.empty()) {
    throw std::invalid_argument("ExperimentConfig: block_counts must be nonempty");
  }
  for (int p : block_counts) {
    if (p < 1 || dimension % p != 0) {
      throw std::invalid_argument("ExperimentConfig: every block count must divide the dimension");
    }
  }
  if (!(min_sigma > 0.0)) throw std::invalid_argument("ExperimentConfig: min_sigma must be positive");
  if (!(slack_tolerance > 0.0)) {
    throw std::invalid_argument("ExperimentConfig: slack_tolerance must be positive");
  }
}

bool FigureSeries::passes(double slack_tolerance) const {
  const bool residuals_ok = !residuals_checked || min_residual_slack >= -slack_tolerance;
  return strict_violations == 0 && matched_violations == 0 && monotone && residuals_ok;
}

FigureSeries compute_series(const QuadraticProblem& problem, int cycles,
                            bool check_residuals) {
  if (cycles < 1) throw std::invalid_argument("compute_series: cycles must be >= 1");
  const int p = problem.partition.block_count();
  FigureSeries s;
  s.block_count = p;
  s.seed = problem.seed;
  s.dimension = problem.dimension();

  linalg::Vector x0(static_cast<std::size_t>(problem.dimension()), 0.0);
  const BcdTrace trace = run_cyclic_bcd(problem, x0, cycles - 1);

  s.l_common = trace.common_smoothness;
  s.l_global = problem.global_smoothness;
  s.l_min_block =
      *std::min_element(problem.block_smoothness.begin(), problem.block_smoothness.end());
  s.radius = trace.radius;
  s.optimal_value = problem.optimal_value;
  s.unequal_smoothness = trace.unequal_smoothness;

  s.rows.reserve(static_cast<std::size_t>(cycles) + 1);
  for (int k = 0; k <= cycles; ++k) {
    FigureRow row;
    row.cycle = k;
    row.gap = std::max(trace.objective_gaps[static_cast<std::size_t>(k) * p], 0.0);
    row.beck = beck_bound(k, p, s.l_common, s.l_min_block, s.l_global, s.radius);
    row.certificate = new_bound(std::max(k - 1, 0), p, s.l_common, s.radius);
    row.matched = new_bound(k, p, s.l_common, s.radius);
    if (k >= 1 && row.gap > row.certificate) {
      ++s.strict_violations;
      s.violations.push_back(BoundViolation{k, row.gap, row.certificate, true});
    }
    if (k >= 1 && row.gap > row.matched) {
      ++s.matched_violations;
      s.violations.push_back(BoundViolation{k, row.gap, row.matched, false});
    }
    if (k >= 1 && row.gap > s.rows.back().gap) s.monotone = false;
    s.rows.push_back(row);
  }

  if (check_residuals) {
    const PepSlackReport report = pep_constraint_residuals(trace, problem);
    s.residuals_checked = true;
    s.worst_residual = report.worst();
    s.min_residual_slack = s.worst_residual.slack;
  }
  return s;
}

void write_series_csv(const FigureSeries& s, std::ostream& os) {
  os << "# cyclic block descent convergence series\n";
  os << "# n=" << s.dimension << " p=" << s.block_count << " seed=" << s.seed
     << " cycles=" << (s.rows.size() - 1) << "\n";
  os << "# L_common=" << format_g17(s.l_common) << " L_global=" << format_g17(s.l_global)
     << " L_min_block=" << format_g17(s.l_min_block) << " R0=" << format_g17(s.radius)
     << " f_star=" << format_g17(s.optimal_value) << "\n";
  os << "# steps use the per-block constants; both bounds use the common constant\n";
  os << "# L_common = max over blocks (conservative substitution when blocks differ: "
     << (s.unequal_smoothness ? "yes" : "no") << ")\n";
  os << "# new at row k is the certificate bound proved for the point after k cycles\n";
  os << "# (outer count k-1; row 0 repeats the k=1 level)\n";
  os << "k,gap,beck,new\n";
  for (const FigureRow& row : s.rows) {
    os << row.cycle << "," << format_g17(row.gap) << "," << format_g17(row.beck) << ","
       << format_g17(row.certificate) << "\n";
  }
}

namespace {

std::string series_filename(const FigureSeries& s) {
  std::ostringstream name;
  name << "figure1_p" << s.block_count << "_seed" << s.seed << ".csv";
  return name.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << content;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::string join_seeds(const std::vector<std::uint64_t>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::string gnuplot_script(const Figure1Result& r) {
  std::ostringstream os;
  os << "# gnuplot script for the convergence series (cosmetic; data is in the CSVs)\n";
  os << "set datafile separator ','\n";
  os << "set logscale y\n";
  os << "set xlabel 'cycle k'\n";
  os << "set ylabel 'objective gap'\n";
  os << "set key outside\n";
  os << "plot \\\n";
  for (std::size_t i = 0; i < r.series.size(); ++i) {
    const FigureSeries& s = r.series[i];
    const std::string file = series_filename(s);
    const std::string tag = "p=" + std::to_string(s.block_count) + " seed=" + std::to_string(s.seed);
    os << "  '" << file << "' using 1:2 with lines title 'gap " << tag << "', \\\n";
    os << "  '" << file << "' using 1:4 with lines dashtype 2 title 'new " << tag << "', \\\n";
    os << "  '" << file << "' using 1:3 with lines dashtype 3 title 'prior " << tag << "'"
       << (i + 1 < r.series.size() ? ", \\" : "") << "\n";
  }
  return os.str();
}

}  // namespace

void write_summary(const ExperimentConfig& config, const Figure1Result& r, std::ostream& os) {
  os << "figure1 summary\n";
  os << "config: n=" << config.dimension << " cycles=" << config.cycles << " p="
     << join_ints(config.block_counts) << " seeds=" << join_seeds(config.seeds)
     << " min_sigma=" << format_g17(config.min_sigma) << "\n";
  for (const FigureSeries& s : r.series) {
    os << "series p=" << s.block_count << " seed=" << s.seed << ": final_gap="
       << format_g17(s.rows.back().gap) << " final_new=" << format_g17(s.rows.back().certificate)
       << " strict_violations=" << s.strict_violations << " matched_violations="
       << s.matched_violations << " monotone=" << (s.monotone ? "yes" : "no");
    if (s.residuals_checked) {
      os << " min_residual_slack=" << format_g17(s.min_residual_slack) << " worst_family="
         << s.worst_residual.family << " at_step=" << s.worst_residual.flat << " block="
         << s.worst_residual.block;
    }
    os << "\n";
    for (const BoundViolation& v : s.violations) {
      os << "violation p=" << s.block_count << " seed=" << s.seed << " k=" << v.cycle
         << " gap=" << format_g17(v.gap) << " bound=" << format_g17(v.bound) << " alignment="
         << (v.strict ? "proved" : "matched") << "\n";
    }
  }
  os << "total strict violations: " << r.total_strict_violations << "\n";
  os << "total matched violations: " << r.total_matched_violations << "\n";
  os << "monotone descent: " << (r.monotone_ok ? "pass" : "FAIL") << "\n";
  if (std::any_of(r.series.begin(), r.series.end(),
                  [](const FigureSeries& s) { return s.residuals_checked; })) {
    os << "interpolation residuals (tolerance " << format_g17(-config.slack_tolerance)
       << "): " << (r.residuals_ok ? "pass" : "FAIL") << "\n";
  } else {
    os << "interpolation residuals: skipped\n";
  }
  os << "result: " << (r.ok() ? "PASS" : "FAIL") << "\n";
}

Figure1Result run_figure1(const ExperimentConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);

  struct Job {
    int p;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (int p : config.block_counts) {
    for (std::uint64_t seed : config.seeds) jobs.push_back(Job{p, seed});
  }

  Figure1Result result;
  result.series.resize(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  const int job_count = static_cast<int>(jobs.size());
#pragma omp parallel for schedule(dynamic) if (job_count > 1)
  for (int j = 0; j < job_count; ++j) {
    try {
      const QuadraticProblem problem = random_least_squares(
          config.dimension, jobs[static_cast<std::size_t>(j)].p,
          jobs[static_cast<std::size_t>(j)].seed, config.min_sigma);
      result.series[static_cast<std::size_t>(j)] =
          compute_series(problem, config.cycles, config.check_residuals);
    } catch (...) {
      errors[static_cast<std::size_t>(j)] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (const FigureSeries& s : result.series) {
    result.total_strict_violations += s.strict_violations;
    result.total_matched_violations += s.matched_violations;
    if (!s.monotone) result.monotone_ok = false;
    if (s.residuals_checked && s.min_residual_slack < -config.slack_tolerance) {
      result.residuals_ok = false;
    }
  }

  const std::filesystem::path dir(config.output_dir);
  for (const FigureSeries& s : result.series) {
    std::ostringstream body;
    write_series_csv(s, body);
    const std::filesystem::path path = dir / series_filename(s);
    write_file(path, body.str());
    result.csv_paths.push_back(path.string());
  }
  {
    std::ostringstream body;
    write_summary(config, result, body);
    const std::filesystem::path path = dir / "summary.txt";
    write_file(path, body.str());
    result.summary_path = path.string();
  }
  if (config.emit_gnuplot) {
    const std::filesystem::path path = dir / "figure1.gnuplot";
    write_file(path, gnuplot_script(result));
    result.gnuplot_path = path.string();
  }
  return result;
}

}  // namespace bcdpep
