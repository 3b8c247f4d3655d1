#include "bcdpep/sdp_export.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "bcdpep/format.hpp"

namespace bcdpep {
namespace {

void validate_weights(int p, const std::vector<Rational>& weights) {
  if (static_cast<int>(weights.size()) != p) {
    throw std::invalid_argument("build_sdp: weights size must equal block count");
  }
  Rational sum(0);
  for (const Rational& w : weights) {
    if (w <= Rational(0)) {
      throw std::invalid_argument("build_sdp: weights must be positive");
    }
    sum = sum + w;
  }
  if (sum != Rational(1)) {
    throw std::invalid_argument("build_sdp: weights must sum to one");
  }
}

struct EntryKey {
  int var, block, row, col;
  bool operator<(const EntryKey& o) const {
    return std::tie(var, block, row, col) < std::tie(o.var, o.block, o.row, o.col);
  }
};

}  // namespace

SdpModel build_sdp(int n_outer, int p, const std::vector<Rational>& weights) {
  if (n_outer < 0) throw std::invalid_argument("build_sdp: outer iteration count must be >= 0");
  if (p < 1) throw std::invalid_argument("build_sdp: block count must be >= 1");
  validate_weights(p, weights);

  const int m = (n_outer + 1) * p;  // step count; lambda vars are 1..m, t is m+1
  SdpModel model;
  model.num_vars = m + 1;
  model.block_sizes = {m + 2, -(2 * m + 1)};
  model.objective.assign(model.num_vars, 0.0);
  model.objective.back() = 1.0;
  model.outer_iterations = n_outer;
  model.block_count = p;

  // Step coefficients: c_q multiplies tau_q wherever tau_q enters the
  // certificate matrix.  Block q-1 (0-based) is the one updated at step q;
  // step 0 reuses the first block's weight.
  std::vector<Rational> coeff(m + 1, Rational(0));
  coeff[0] = Rational(p) * weights[0];
  for (int q = 1; q <= m; ++q) coeff[q] = Rational(p) * weights[(q - 1) % p];

  std::vector<SdpEntry> out;
  auto emit = [&out](int var, int row0, int col0, int block, const Rational& v) {
    if (v == Rational(0)) return;
    out.push_back(SdpEntry{var, block, row0 + 1, col0 + 1, v.to_double()});
  };
  // S = sum_i x_i F_i - F_0, so constants land in F_0 with flipped sign.
  auto emit_const = [&emit](int row0, int col0, int block, const Rational& v) {
    emit(0, row0, col0, block, Rational(0) - v);
  };

  // PSD block (block 1), upper triangle of the bordered certificate matrix.
  // Diagonal: entry (q,q) collapses to (c_q + c_{q+1}) * lambda_{q+1} for
  // q < m and to the constant c_m at (m,m); the lambda_q terms cancel exactly.
  emit(1, 0, 0, 1, coeff[1] + coeff[0]);
  for (int q = 1; q < m; ++q) emit(q + 1, q, q, 1, coeff[q] + coeff[q + 1]);
  emit_const(m, m, 1, coeff[m]);
  // Off-diagonal (a,b), a < b: value c_{a+1} * tau_b with
  // tau_b = lambda_{b+1} - lambda_b for b < m and tau_m = 1 - lambda_m.
  for (int b = 1; b <= m; ++b) {
    for (int a = 0; a < b; ++a) {
      const Rational& c = coeff[a + 1];
      if (b < m) {
        emit(b + 1, a, b, 1, c);
        emit(b, a, b, 1, Rational(0) - c);
      } else {
        emit_const(a, b, 1, c);
        emit(m, a, b, 1, Rational(0) - c);
      }
    }
  }
  // Border column holds tau itself; the corner holds t.
  emit(1, 0, m + 1, 1, Rational(1));
  for (int a = 1; a < m; ++a) {
    emit(a + 1, a, m + 1, 1, Rational(1));
    emit(a, a, m + 1, 1, Rational(-1));
  }
  emit_const(m, m + 1, 1, Rational(1));
  emit(m, m, m + 1, 1, Rational(-1));
  emit(m + 1, m + 1, m + 1, 1, Rational(1));

  // Diagonal block (block 2): positions 1..m carry lambda_q >= 0, positions
  // m+1+q carry tau_q >= 0.
  for (int q = 1; q <= m; ++q) emit(q, q - 1, q - 1, 2, Rational(1));
  emit(1, m, m, 2, Rational(1));
  for (int q = 1; q < m; ++q) {
    emit(q + 1, m + q, m + q, 2, Rational(1));
    emit(q, m + q, m + q, 2, Rational(-1));
  }
  emit_const(2 * m, 2 * m, 2, Rational(1));
  emit(m, 2 * m, 2 * m, 2, Rational(-1));

  std::sort(out.begin(), out.end(), [](const SdpEntry& x, const SdpEntry& y) {
    return EntryKey{x.var, x.block, x.row, x.col} < EntryKey{y.var, y.block, y.row, y.col};
  });
  model.entries = std::move(out);
  return model;
}

void write_sdpa(const SdpModel& m, std::ostream& os) {
  os << "\" dual bound problem: minimize t subject to the certificate matrix\n";
  os << "\" being PSD and the multiplier schedule being a valid simplex\n";
  os << "\" meta outer_iterations=" << m.outer_iterations
     << " block_count=" << m.block_count << "\n";
  os << "\" scale: bound = 0.5 * p * Lc * R0^2 * objective\n";
  os << m.num_vars << "\n";
  os << m.block_sizes.size() << "\n";
  for (std::size_t i = 0; i < m.block_sizes.size(); ++i) {
    os << (i ? " " : "") << m.block_sizes[i];
  }
  os << "\n";
  for (int i = 0; i < m.num_vars; ++i) {
    os << (i ? " " : "") << format_g17(m.objective[i]);
  }
  os << "\n";
  for (const SdpEntry& e : m.entries) {
    os << e.var << " " << e.block << " " << e.row << " " << e.col << " "
       << format_g17(e.value) << "\n";
  }
}

void write_sdpa_file(const SdpModel& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_sdpa_file: cannot open " + path);
  write_sdpa(m, os);
  if (!os) throw std::runtime_error("write_sdpa_file: write failed for " + path);
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw std::runtime_error("sdpa parse error at line " + std::to_string(line) + ": " + what);
}

// SDPA header lines allow , { } ( ) as separators.
std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
  }
  return s;
}

bool is_comment(const std::string& line) {
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '"' || c == '*';
  }
  return true;  // blank lines are ignored like comments
}

long parse_int_token(const std::string& tok, int line, const std::string& field) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    parse_fail(line, "field '" + field + "' is not an integer: '" + tok + "'");
  }
  if (pos != tok.size()) {
    parse_fail(line, "field '" + field + "' has trailing characters: '" + tok + "'");
  }
  return v;
}

double parse_double_token(const std::string& tok, int line, const std::string& field) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    parse_fail(line, "field '" + field + "' is not a number: '" + tok + "'");
  }
  if (pos != tok.size()) {
    parse_fail(line, "field '" + field + "' has trailing characters: '" + tok + "'");
  }
  return v;
}

}  // namespace

SdpModel read_sdpa(std::istream& is) {
  SdpModel model;
  std::string line;
  int line_no = 0;
  int stage = 0;  // 0=vars, 1=nblocks, 2=sizes, 3=objective, 4=entries
  std::size_t n_blocks = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (is_comment(line)) {
      std::istringstream meta(line);
      std::string quote, tag;
      if (meta >> quote >> tag && quote == "\"" && tag == "meta") {
        std::string kv;
        while (meta >> kv) {
          const std::size_t eq = kv.find('=');
          if (eq == std::string::npos) continue;
          const std::string key = kv.substr(0, eq);
          const std::string val = kv.substr(eq + 1);
          if (key == "outer_iterations") {
            model.outer_iterations = static_cast<int>(parse_int_token(val, line_no, key));
          } else if (key == "block_count") {
            model.block_count = static_cast<int>(parse_int_token(val, line_no, key));
          }
        }
      }
      continue;
    }
    std::istringstream ss(sanitize(line));
    std::vector<std::string> toks;
    for (std::string t; ss >> t;) toks.push_back(t);
    switch (stage) {
      case 0: {
        if (toks.size() != 1) parse_fail(line_no, "expected a single variable count");
        const long v = parse_int_token(toks[0], line_no, "variable count");
        if (v < 1) parse_fail(line_no, "variable count must be >= 1");
        model.num_vars = static_cast<int>(v);
        stage = 1;
        break;
      }
      case 1: {
        if (toks.size() != 1) parse_fail(line_no, "expected a single block count");
        const long v = parse_int_token(toks[0], line_no, "block count");
        if (v < 1) parse_fail(line_no, "block count must be >= 1");
        n_blocks = static_cast<std::size_t>(v);
        stage = 2;
        break;
      }
      case 2: {
        if (toks.size() != n_blocks) parse_fail(line_no, "expected one size per block");
        for (std::size_t i = 0; i < toks.size(); ++i) {
          const long v = parse_int_token(toks[i], line_no, "block size");
          if (v == 0) parse_fail(line_no, "block size must be nonzero");
          model.block_sizes.push_back(static_cast<int>(v));
        }
        stage = 3;
        break;
      }
      case 3: {
        if (static_cast<int>(toks.size()) != model.num_vars) {
          parse_fail(line_no, "expected one objective value per variable");
        }
        for (std::size_t i = 0; i < toks.size(); ++i) {
          model.objective.push_back(parse_double_token(toks[i], line_no, "objective value"));
        }
        stage = 4;
        break;
      }
      default: {
        if (toks.size() != 5) parse_fail(line_no, "expected 'var block row col value'");
        SdpEntry e;
        const long var = parse_int_token(toks[0], line_no, "var");
        if (var < 0 || var > model.num_vars) parse_fail(line_no, "var out of range");
        e.var = static_cast<int>(var);
        const long blk = parse_int_token(toks[1], line_no, "block");
        if (blk < 1 || blk > static_cast<long>(model.block_sizes.size())) {
          parse_fail(line_no, "block out of range");
        }
        e.block = static_cast<int>(blk);
        const int size = model.block_sizes[static_cast<std::size_t>(blk - 1)];
        const int order = size > 0 ? size : -size;
        const long row = parse_int_token(toks[2], line_no, "row");
        const long col = parse_int_token(toks[3], line_no, "col");
        if (row < 1 || row > order) parse_fail(line_no, "row out of range");
        if (col < 1 || col > order) parse_fail(line_no, "col out of range");
        if (row > col) parse_fail(line_no, "entries must be upper triangular");
        if (size < 0 && row != col) parse_fail(line_no, "diagonal block entry must have row == col");
        e.row = static_cast<int>(row);
        e.col = static_cast<int>(col);
        e.value = parse_double_token(toks[4], line_no, "value");
        if (!std::isfinite(e.value)) parse_fail(line_no, "value must be finite");
        model.entries.push_back(e);
        break;
      }
    }
  }
  if (stage != 4) parse_fail(line_no, "file ended before the objective line");
  return model;
}

SdpModel read_sdpa_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_sdpa_file: cannot open " + path);
  return read_sdpa(is);
}

namespace {

void check_shape(const SdpModel& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.num_vars) {
    throw std::invalid_argument("materialize: variable vector has wrong size");
  }
  if (m.block_sizes.size() != 2 || m.block_sizes[0] < 1 || m.block_sizes[1] > -1) {
    throw std::invalid_argument("materialize: expected one PSD and one diagonal block");
  }
}

}  // namespace

linalg::Matrix materialize_psd_block(const SdpModel& m, std::span<const double> x) {
  check_shape(m, x);
  const int order = m.block_sizes[0];
  linalg::Matrix s(order, order);
  for (const SdpEntry& e : m.entries) {
    if (e.block != 1) continue;
    const double v = e.var == 0 ? -e.value : x[static_cast<std::size_t>(e.var - 1)] * e.value;
    s(e.row - 1, e.col - 1) += v;
    if (e.row != e.col) s(e.col - 1, e.row - 1) += v;
  }
  return s;
}

linalg::Vector materialize_diag_block(const SdpModel& m, std::span<const double> x) {
  check_shape(m, x);
  const int order = -m.block_sizes[1];
  linalg::Vector d(static_cast<std::size_t>(order), 0.0);
  for (const SdpEntry& e : m.entries) {
    if (e.block != 2) continue;
    const double v = e.var == 0 ? -e.value : x[static_cast<std::size_t>(e.var - 1)] * e.value;
    d[static_cast<std::size_t>(e.row - 1)] += v;
  }
  return d;
}

double feasibility_slack(const SdpModel& m, std::span<const double> x) {
  const linalg::Matrix s = materialize_psd_block(m, x);
  const linalg::Vector d = materialize_diag_block(m, x);
  const linalg::SymEigen eig = linalg::sym_eigen(s);
  double slack = eig.values.front();
  for (double v : d) slack = std::min(slack, v);
  return slack;
}

}  // namespace bcdpep
