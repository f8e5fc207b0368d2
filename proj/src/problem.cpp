#include "certiqp/problem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>

namespace certiqp {

namespace {

double inf_norm(const DenseMatrix& A) {
  double m = 0.0;
  for (double t : A.data()) m = std::max(m, std::fabs(t));
  return m;
}

void check_qp_data(const DenseMatrix& Q, const DenseVector& c,
                   const DenseMatrix& A, const DenseVector& b) {
  const int nz = static_cast<int>(c.size());
  const int nb = static_cast<int>(b.size());
  if (nz < 1) throw InvalidProblem("problem: n_z must be >= 1");
  if (Q.rows() != nz || Q.cols() != nz) {
    throw InvalidProblem("problem: Q must be n_z x n_z");
  }
  if (A.rows() != nb || (nb > 0 && A.cols() != nz)) {
    throw InvalidProblem("problem: A must be n_b x n_z");
  }
  if (!all_finite(Q) || !all_finite(c) || !all_finite(A) || !all_finite(b)) {
    throw InvalidProblem("problem: data must be finite");
  }
}

// Symmetry within 1e-12 * max(1, ||Q||_inf), then exact averaging.
void symmetrize(DenseMatrix& Q) {
  const double tol = 1e-12 * std::max(1.0, inf_norm(Q));
  for (int i = 0; i < Q.rows(); ++i) {
    for (int j = i + 1; j < Q.cols(); ++j) {
      if (std::fabs(Q(i, j) - Q(j, i)) > tol) {
        throw InvalidProblem("problem: Q is not symmetric");
      }
      const double avg = 0.5 * (Q(i, j) + Q(j, i));
      Q(i, j) = avg;
      Q(j, i) = avg;
    }
  }
}

void check_psd_or_throw(const DenseMatrix& Q) {
  const double tol = 1e-10 * std::max(1.0, inf_norm(Q));
  if (!psd_within(Q, tol)) {
    throw InvalidProblem("problem: Q is not positive semidefinite");
  }
}

}  // namespace

bool psd_within(const DenseMatrix& S, double tol) {
  const int m = S.rows();
  DenseMatrix L(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      double acc = S(i, j);
      if (i == j) acc += tol;
      for (int k = 0; k < j; ++k) acc -= L(i, k) * L(j, k);
      if (i == j) {
        if (acc <= 0.0) return false;
        L(i, i) = std::sqrt(acc);
      } else {
        L(i, j) = acc / L(j, j);
      }
    }
  }
  return true;
}

ConvexQp make_convex_qp(DenseMatrix Q, DenseVector c, DenseMatrix A,
                        DenseVector b, bool check_psd) {
  check_qp_data(Q, c, A, b);
  symmetrize(Q);
  if (check_psd) check_psd_or_throw(Q);
  // an empty constraint block still records the column count
  if (b.empty()) A = DenseMatrix(0, static_cast<int>(c.size()));
  return ConvexQp{std::move(Q), std::move(c), std::move(A), std::move(b)};
}

StandardQp make_standard_qp(DenseMatrix Q, DenseVector c, DenseMatrix A,
                            DenseVector b, bool check_psd) {
  check_qp_data(Q, c, A, b);
  symmetrize(Q);
  if (check_psd) check_psd_or_throw(Q);
  if (b.empty()) A = DenseMatrix(0, static_cast<int>(c.size()));
  return StandardQp{std::move(Q), std::move(c), std::move(A), std::move(b)};
}

ConvexQp split_free_variables(const StandardQp& p) {
  const int nz = p.nz();
  const int nb = p.nb();
  DenseMatrix Qs(2 * nz, 2 * nz);
  for (int i = 0; i < nz; ++i) {
    for (int j = 0; j < nz; ++j) {
      const double q = p.Q(i, j);
      Qs(i, j) = q;
      Qs(i, nz + j) = -q;
      Qs(nz + i, j) = -q;
      Qs(nz + i, nz + j) = q;
    }
  }
  DenseVector cs(2 * nz);
  for (int i = 0; i < nz; ++i) {
    cs[i] = p.c[i];
    cs[nz + i] = -p.c[i];
  }
  DenseMatrix As(nb, 2 * nz);
  for (int i = 0; i < nb; ++i) {
    for (int j = 0; j < nz; ++j) {
      As(i, j) = p.A(i, j);
      As(i, nz + j) = -p.A(i, j);
    }
  }
  return ConvexQp{std::move(Qs), std::move(cs), std::move(As), p.b};
}

SplitRecovery recover_split(const DenseVector& z_split, int nz_orig) {
  if (static_cast<int>(z_split.size()) != 2 * nz_orig) {
    throw DimensionMismatch("recover_split: expected length 2*n_z");
  }
  SplitRecovery r;
  r.z.resize(nz_orig);
  r.z_plus.resize(nz_orig);
  r.z_minus.resize(nz_orig);
  for (int i = 0; i < nz_orig; ++i) {
    const double zp = z_split[i];
    const double zm = z_split[nz_orig + i];
    const double common = std::min(zp, zm);
    r.z_plus[i] = zp - common;
    r.z_minus[i] = zm - common;
    r.z[i] = r.z_plus[i] - r.z_minus[i];
  }
  return r;
}

BoxReduction from_box_inequality(const DenseMatrix& Q, const DenseVector& c,
                                 const DenseVector& lb, const DenseVector& ub,
                                 const DenseMatrix& A_le,
                                 const DenseVector& b_le) {
  const int nz = static_cast<int>(c.size());
  const int nle = static_cast<int>(b_le.size());
  if (static_cast<int>(lb.size()) != nz || static_cast<int>(ub.size()) != nz) {
    throw DimensionMismatch("from_box_inequality: lb/ub must have length n_z");
  }
  if (A_le.rows() != nle || (nle > 0 && A_le.cols() != nz)) {
    throw DimensionMismatch("from_box_inequality: A_le must be n_le x n_z");
  }
  for (int i = 0; i < nz; ++i) {
    if (!(lb[i] < ub[i])) {
      throw BoundsInverted("from_box_inequality: lb[" + std::to_string(i) +
                           "] >= ub[" + std::to_string(i) + "]");
    }
  }

  const DenseVector Qlb = matvec(Q, lb);
  DenseVector cs(nz);
  for (int i = 0; i < nz; ++i) cs[i] = c[i] + Qlb[i];

  const int nb = nz + nle;
  DenseMatrix A(nb, nz);
  DenseVector b(nb);
  for (int i = 0; i < nz; ++i) {
    A(i, i) = -1.0;  // -z' >= lb - ub  <=>  z <= ub
    b[i] = lb[i] - ub[i];
  }
  const DenseVector Alb = nle > 0 ? matvec(A_le, lb) : DenseVector{};
  for (int i = 0; i < nle; ++i) {
    for (int j = 0; j < nz; ++j) A(nz + i, j) = -A_le(i, j);
    b[nz + i] = Alb[i] - b_le[i];
  }

  BoxReduction r;
  r.qp = make_convex_qp(DenseMatrix(Q), std::move(cs), std::move(A),
                        std::move(b), /*check_psd=*/false);
  r.shift = lb;
  r.objective_offset = 0.5 * dot(lb, Qlb) + dot(c, lb);
  return r;
}

BoxReduction from_box_inequality(const DenseMatrix& Q, const DenseVector& c,
                                 const DenseVector& lb,
                                 const DenseVector& ub) {
  return from_box_inequality(Q, c, lb, ub, DenseMatrix(), DenseVector{});
}

Equilibration equilibrate(const ConvexQp& p) {
  const int nz = p.nz();
  const int nb = p.nb();
  Equilibration eq;
  eq.qp = p;
  double obj_max = 0.0;
  for (int i = 0; i < nz; ++i) {
    obj_max = std::max(obj_max, std::fabs(p.c[i]));
    for (int j = 0; j < nz; ++j)
      obj_max = std::max(obj_max, std::fabs(p.Q(i, j)));
  }
  eq.objective_scale = obj_max > 0.0 ? 1.0 / obj_max : 1.0;
  if (eq.objective_scale != 1.0) {
    for (int i = 0; i < nz; ++i) {
      eq.qp.c[i] *= eq.objective_scale;
      for (int j = 0; j < nz; ++j) eq.qp.Q(i, j) *= eq.objective_scale;
    }
  }
  for (int i = 0; i < nb; ++i) {
    double row_max = std::fabs(p.b[i]);
    for (int j = 0; j < nz; ++j)
      row_max = std::max(row_max, std::fabs(p.A(i, j)));
    if (row_max == 0.0) continue;
    const double s = 1.0 / row_max;
    eq.qp.b[i] *= s;
    for (int j = 0; j < nz; ++j) eq.qp.A(i, j) *= s;
  }
  return eq;
}

LcpData assemble_lcp(const ConvexQp& p) {
  const int nz = p.nz();
  const int nb = p.nb();
  const int n = nz + nb;
  LcpData lcp;
  lcp.nz = nz;
  lcp.nb = nb;
  lcp.M = DenseMatrix(n, n);
  lcp.q.resize(n);
  for (int i = 0; i < nz; ++i) {
    for (int j = 0; j < nz; ++j) lcp.M(i, j) = p.Q(i, j);
    for (int j = 0; j < nb; ++j) lcp.M(i, nz + j) = -p.A(j, i);
    lcp.q[i] = p.c[i];
  }
  for (int i = 0; i < nb; ++i) {
    for (int j = 0; j < nz; ++j) lcp.M(nz + i, j) = p.A(i, j);
    lcp.q[nz + i] = -p.b[i];
  }
  return lcp;
}

double objective_value(const ConvexQp& p, const DenseVector& z) {
  return 0.5 * dot(z, matvec(p.Q, z)) + dot(p.c, z);
}

// --- problem file parsing -------------------------------------------------

ParseError::ParseError(const std::string& msg, int line_no)
    : std::runtime_error(
          line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg : msg),
      line(line_no) {}

namespace {

// Whitespace tokenizer that strips '#' comments and tracks line numbers.
class Tokenizer {
 public:
  explicit Tokenizer(std::istream& in) : in_(in) {}

  std::optional<std::string> next() {
    while (pos_ >= line_.size()) {
      if (!std::getline(in_, line_)) return std::nullopt;
      ++line_no_;
      const auto hash = line_.find('#');
      if (hash != std::string::npos) line_.resize(hash);
      pos_ = 0;
      skip_ws();
    }
    const std::size_t start = pos_;
    while (pos_ < line_.size() && !std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    std::string tok = line_.substr(start, pos_ - start);
    skip_ws();
    return tok;
  }

  int line_no() const { return line_no_; }

 private:
  void skip_ws() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
  }

  std::istream& in_;
  std::string line_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

int parse_count(Tokenizer& tok, const std::string& what) {
  auto t = tok.next();
  if (!t) throw ParseError("expected " + what, tok.line_no());
  try {
    std::size_t used = 0;
    const int v = std::stoi(*t, &used);
    if (used != t->size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected integer for " + what + ", got '" + *t + "'",
                     tok.line_no());
  }
}

double parse_real(Tokenizer& tok, const std::string& what) {
  auto t = tok.next();
  if (!t) throw ParseError("expected number in " + what, tok.line_no());
  try {
    std::size_t used = 0;
    const double v = std::stod(*t, &used);
    if (used != t->size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected number in " + what + ", got '" + *t + "'",
                     tok.line_no());
  }
}

DenseVector parse_vector(Tokenizer& tok, int len, const std::string& what) {
  DenseVector v(len);
  for (int i = 0; i < len; ++i) v[i] = parse_real(tok, what);
  return v;
}

DenseMatrix parse_matrix(Tokenizer& tok, int rows, int cols,
                         const std::string& what) {
  DenseMatrix A(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) A(i, j) = parse_real(tok, what);
  }
  return A;
}

}  // namespace

ProblemInput read_problem(std::istream& in) {
  Tokenizer tok(in);

  auto key = tok.next();
  if (!key || *key != "n_z") throw ParseError("expected 'n_z'", tok.line_no());
  const int nz = parse_count(tok, "n_z");
  if (nz < 1) throw ParseError("n_z must be >= 1", tok.line_no());
  key = tok.next();
  if (!key || *key != "n_b") throw ParseError("expected 'n_b'", tok.line_no());
  const int nb = parse_count(tok, "n_b");
  if (nb < 0) throw ParseError("n_b must be >= 0", tok.line_no());

  std::optional<DenseMatrix> Q, A, A_le;
  std::optional<DenseVector> c, b, lb, ub, b_le;
  while (auto section = tok.next()) {
    const int at = tok.line_no();
    auto dup = [&](bool already) {
      if (already) throw ParseError("duplicate section '" + *section + "'", at);
    };
    if (*section == "Q") {
      dup(Q.has_value());
      Q = parse_matrix(tok, nz, nz, "Q");
    } else if (*section == "c") {
      dup(c.has_value());
      c = parse_vector(tok, nz, "c");
    } else if (*section == "A") {
      dup(A.has_value());
      A = parse_matrix(tok, nb, nz, "A");
    } else if (*section == "b") {
      dup(b.has_value());
      b = parse_vector(tok, nb, "b");
    } else if (*section == "lb") {
      dup(lb.has_value());
      lb = parse_vector(tok, nz, "lb");
    } else if (*section == "ub") {
      dup(ub.has_value());
      ub = parse_vector(tok, nz, "ub");
    } else if (*section == "A_le") {
      dup(A_le.has_value());
      A_le = parse_matrix(tok, nb, nz, "A_le");
    } else if (*section == "b_le") {
      dup(b_le.has_value());
      b_le = parse_vector(tok, nb, "b_le");
    } else {
      throw ParseError("unknown section '" + *section + "'", at);
    }
  }

  const int end = tok.line_no();
  if (!Q) throw ParseError("missing section Q", end);
  if (!c) throw ParseError("missing section c", end);

  const bool box = lb.has_value() || ub.has_value();
  ProblemInput out;
  try {
    if (box) {
      if (!lb || !ub) throw ParseError("box mode needs both lb and ub", end);
      if (A || b) {
        throw ParseError("box mode uses A_le/b_le, not A/b", end);
      }
      if (A_le.has_value() != b_le.has_value()) {
        throw ParseError("A_le and b_le must appear together", end);
      }
      if (nb > 0 && !A_le) {
        throw ParseError("n_b > 0 but no A_le/b_le sections", end);
      }
      BoxReduction red =
          A_le ? from_box_inequality(*Q, *c, *lb, *ub, *A_le, *b_le)
               : from_box_inequality(*Q, *c, *lb, *ub);
      out.qp = std::move(red.qp);
      out.shift = std::move(red.shift);
      out.objective_offset = red.objective_offset;
      out.box_mode = true;
    } else {
      if (A_le || b_le) {
        throw ParseError("A_le/b_le require box mode (lb and ub)", end);
      }
      if (nb > 0 && (!A || !b)) {
        throw ParseError("missing section A or b", end);
      }
      out.qp = make_convex_qp(std::move(*Q), std::move(*c),
                              A ? std::move(*A) : DenseMatrix(),
                              b ? std::move(*b) : DenseVector{});
      out.shift.assign(nz, 0.0);
      out.objective_offset = 0.0;
      out.box_mode = false;
    }
  } catch (const InvalidProblem& e) {
    throw ParseError(e.what(), end);
  } catch (const BoundsInverted& e) {
    throw ParseError(e.what(), end);
  }
  return out;
}

ProblemInput read_problem_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open problem file: " + path, 0);
  return read_problem(f);
}

}  // namespace certiqp
