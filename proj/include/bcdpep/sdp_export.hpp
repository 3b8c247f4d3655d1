#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bcdpep/certificate.hpp"
#include "bcdpep/linalg.hpp"
#include "bcdpep/rational.hpp"

namespace bcdpep {

// One nonzero of a constraint matrix in SDPA sparse conventions: var 0 is the
// constant matrix, vars 1..num_vars the decision variables; block, row, col
// are 1-based with row <= col (upper triangle).
struct SdpEntry {
  int var = 0;
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
  friend bool operator==(const SdpEntry&, const SdpEntry&) = default;
};

// Linear SDP "minimize c^T x s.t. sum_i x_i F_i - F_0 >= 0" for the dual
// bound problem: variables x = (lambda_1..lambda_M, t); block 1 is the
// bordered certificate matrix (order M+2, affine in x since tau is affine in
// lambda); block 2 is diagonal (order 2M+1) holding lambda >= 0 and
// tau(lambda) >= 0. The objective is t alone; the bound scaling
// 0.5*p*L_c*R^2 stays in file metadata because it is instance data.
struct SdpModel {
  int num_vars = 0;
  std::vector<int> block_sizes;   // {M+2, -(2M+1)}, negative = diagonal
  std::vector<double> objective;  // size num_vars
  std::vector<SdpEntry> entries;  // sorted by (var, block, row, col)
  int outer_iterations = -1;      // N, carried in file metadata
  int block_count = -1;           // p
  friend bool operator==(const SdpModel&, const SdpModel&) = default;
};

SdpModel build_sdp(int n_outer, int p, const std::vector<Rational>& weights);

void write_sdpa(const SdpModel& m, std::ostream& os);
void write_sdpa_file(const SdpModel& m, const std::string& path);
// Strict inverse of write_sdpa; errors carry the offending line number.
SdpModel read_sdpa(std::istream& is);
SdpModel read_sdpa_file(const std::string& path);

// Evaluate the affine maps at x = (lambda, t).
linalg::Matrix materialize_psd_block(const SdpModel& m, std::span<const double> x);
linalg::Vector materialize_diag_block(const SdpModel& m, std::span<const double> x);
// min(lambda_min of the PSD block, smallest diagonal entry): >= 0 means x is
// feasible.
double feasibility_slack(const SdpModel& m, std::span<const double> x);

}  // namespace bcdpep
