#include "wl1/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wl1/conic.hpp"
#include "wl1/errors.hpp"

namespace wl1 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Thin SVD split into range and null-space bases.
struct Reduced {
  Matrix U;       // n x r
  Matrix V;       // N x r
  Matrix V_null;  // N x (N - r)
  Vector sigma;   // r
  Index rank = 0;
};

Reduced reduce(const Matrix& A) {
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  Reduced r;
  const double tol = s.size() > 0 ? static_cast<double>(std::max(A.rows(), A.cols())) *
                                        std::numeric_limits<double>::epsilon() * s[0]
                                  : 0.0;
  while (r.rank < s.size() && s[r.rank] > tol) ++r.rank;
  r.U = svd.matrixU().leftCols(r.rank);
  r.V = svd.matrixV().leftCols(r.rank);
  r.V_null = svd.matrixV().rightCols(A.cols() - r.rank);
  r.sigma = s.head(r.rank);
  return r;
}

// Orthonormal basis of the column span of M.
Matrix span_basis(const Matrix& M) {
  if (M.cols() == 0) return Matrix(M.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  const double tol = static_cast<double>(std::max(M.rows(), M.cols())) *
                     std::numeric_limits<double>::epsilon() * (s.size() ? s[0] : 0.0);
  Index r = 0;
  while (r < s.size() && s[r] > tol) ++r;
  return svd.matrixU().leftCols(r);
}

std::vector<Index> positive_weights(const Vector& w) {
  std::vector<Index> pos;
  for (Index i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) pos.push_back(i);
  }
  return pos;
}

std::vector<Index> zero_weights(const Vector& w) {
  std::vector<Index> z;
  for (Index i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) z.push_back(i);
  }
  return z;
}

// min w'u  s.t.  |x0 + B xi| <= u on positive-weight coordinates, plus
// `extra` caller-filled rows after the 2|pos| absolute-value rows.
struct AbsForm {
  conic::Problem p;
  std::vector<Index> pos;
  Index nxi = 0;

  AbsForm(const Vector& x0, const Matrix& B, const Vector& w, Index extra) : pos(positive_weights(w)) {
    nxi = B.cols();
    const Index nu = static_cast<Index>(pos.size());
    const Index rows = 2 * nu + extra;
    p.c = Vector::Zero(nxi + nu);
    p.G = Matrix::Zero(rows, nxi + nu);
    p.h = Vector::Zero(rows);
    for (Index k = 0; k < nu; ++k) {
      const Index i = pos[k];
      p.c[nxi + k] = w[i];
      p.G.row(2 * k).head(nxi) = B.row(i);
      p.G(2 * k, nxi + k) = -1.0;
      p.h[2 * k] = -x0[i];
      p.G.row(2 * k + 1).head(nxi) = -B.row(i);
      p.G(2 * k + 1, nxi + k) = -1.0;
      p.h[2 * k + 1] = x0[i];
    }
    p.cones.lp = 2 * nu;
  }

  Index abs_rows() const { return 2 * static_cast<Index>(pos.size()); }

  // z1 - z2 on positive-weight coordinates, zero elsewhere: equals B'-image of the dual.
  Vector subgradient(const Vector& z, Index N) const {
    Vector g = Vector::Zero(N);
    for (std::size_t k = 0; k < pos.size(); ++k) g[pos[k]] = z[2 * k] - z[2 * k + 1];
    return g;
  }
};

struct ConicOutcome {
  Vector xi;
  Vector z;
  int iterations = 0;
};

ConicOutcome run_conic(const conic::Problem& p, const SolverOptions& opts) {
  ConicOutcome out;
  if (p.G.rows() == 0 || p.c.size() == 0) {
    out.xi = Vector::Zero(p.c.size());
    out.z = Vector::Zero(p.G.rows());
    return out;
  }
  conic::Settings s;
  s.max_iters = std::min(opts.max_iters, 200);
  const auto res = conic::solve(p, s);
  out.xi = res.x;
  out.z = res.z;
  out.iterations = res.iterations;
  return out;
}

struct EqualityOutcome {
  Vector x;
  Vector lambda;  // dual for A x = y_hat
  int iterations = 0;
};

// min ||x||_{1,w} s.t. A x = y_hat with y_hat in range(A), via x = x_p + V_null xi.
EqualityOutcome solve_equality(const Reduced& R, const Vector& y_hat, const Vector& w,
                               const SolverOptions& opts) {
  EqualityOutcome out;
  const Vector x_p = R.V * (R.U.transpose() * y_hat).cwiseQuotient(R.sigma);
  AbsForm form(x_p, R.V_null, w, 0);
  const auto res = run_conic(form.p, opts);
  out.x = x_p + R.V_null * res.xi.head(form.nxi);
  out.iterations = res.iterations;
  const Vector g = form.subgradient(res.z, w.size());
  out.lambda = R.U * (R.V.transpose() * g).cwiseQuotient(R.sigma);
  return out;
}

void check_inputs(const ProblemInstance& inst, const WeightVector& w) {
  if (w.size() != inst.cols()) {
    throw ParameterError("weight vector length " + std::to_string(w.size()) +
                         " does not match N = " + std::to_string(inst.cols()));
  }
}

RecoveryReport finish(const ProblemInstance& inst, const WeightVector& w, const SolverOptions& opts,
                      Vector x_hat, const Vector& hint, int iterations, bool infeasible) {
  RecoveryReport rep;
  rep.certificate = optimality_certificate(inst, w, x_hat, hint);
  rep.x_hat = std::move(x_hat);
  rep.objective = rep.certificate.objective;
  rep.feas_violation = rep.certificate.feas_violation;
  rep.iterations = iterations;
  if (infeasible) {
    rep.status = SolveStatus::Infeasible;
  } else if (rep.feas_violation <= opts.feas_tol &&
             rep.certificate.gap <= opts.opt_tol * (1.0 + rep.objective)) {
    rep.status = SolveStatus::Optimal;
  } else {
    rep.status = SolveStatus::MaxIters;
  }
  return rep;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(feas_tol > 0.0 && feas_tol <= 1e-2)) throw ParameterError("feas_tol must lie in (0, 1e-2]");
  if (!(opt_tol > 0.0 && opt_tol <= 1e-2)) throw ParameterError("opt_tol must lie in (0, 1e-2]");
  if (max_iters < 1) throw ParameterError("max_iters must be >= 1");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::Infeasible: return "Infeasible";
  }
  return "?";
}

RecoveryReport solve_weighted_bp(const ProblemInstance& inst, const WeightVector& w,
                                 const SolverOptions& opts) {
  opts.validate();
  if (inst.noise_set != NoiseSet::L2Ball) throw ParameterError("solve_weighted_bp needs an l2 instance");
  check_inputs(inst, w);
  const Reduced R = reduce(inst.A);
  const Vector y_hat = R.U * (R.U.transpose() * inst.y);
  const double dist = (inst.y - y_hat).norm();
  const double eps = inst.radius;
  const double scale = std::max(1.0, inst.y.norm());

  if (eps < dist - 1e-12 * scale || eps == 0.0) {
    const auto eq = solve_equality(R, y_hat, w.values(), opts);
    return finish(inst, w, opts, eq.x, eq.lambda, eq.iterations, eps < dist - 1e-12 * scale);
  }
  const double slack = std::sqrt(std::max(0.0, eps * eps - dist * dist));
  if (slack <= 1e-10 * scale) {
    const auto eq = solve_equality(R, y_hat, w.values(), opts);
    return finish(inst, w, opts, eq.x, eq.lambda, eq.iterations, false);
  }

  // Variables (x, u); ||y_hat - A x||_2 <= slack is equivalent to the original ball.
  const Index N = inst.cols();
  const Index n = inst.rows();
  AbsForm form(Vector::Zero(N), Matrix::Identity(N, N), w.values(), n + 1);
  const Index off = form.abs_rows();
  form.p.h[off] = slack;
  form.p.G.block(off + 1, 0, n, N) = inst.A;
  form.p.h.segment(off + 1, n) = y_hat;
  form.p.cones.soc.push_back(n + 1);
  const auto res = run_conic(form.p, opts);
  const Vector lambda = -res.z.segment(off + 1, n);
  return finish(inst, w, opts, res.xi.head(N), lambda, res.iterations, false);
}

RecoveryReport solve_weighted_ds(const ProblemInstance& inst, const WeightVector& w,
                                 const SolverOptions& opts) {
  opts.validate();
  if (inst.noise_set != NoiseSet::DantzigBox) throw ParameterError("solve_weighted_ds needs a ds instance");
  check_inputs(inst, w);
  const Vector b = inst.A.transpose() * inst.y;
  const double eps = inst.radius;

  if (eps <= 1e-12 * std::max(1.0, b.lpNorm<Eigen::Infinity>())) {
    const Reduced R = reduce(inst.A);
    const Vector y_hat = R.U * (R.U.transpose() * inst.y);
    const auto eq = solve_equality(R, y_hat, w.values(), opts);
    const Vector mu = R.V * (R.U.transpose() * eq.lambda).cwiseQuotient(R.sigma);
    return finish(inst, w, opts, eq.x, mu, eq.iterations, false);
  }

  const Index N = inst.cols();
  const Matrix Q = inst.A.transpose() * inst.A;
  AbsForm form(Vector::Zero(N), Matrix::Identity(N, N), w.values(), 2 * N);
  const Index off = form.abs_rows();
  form.p.G.block(off, 0, N, N) = -Q;
  form.p.h.segment(off, N) = Vector::Constant(N, eps) - b;
  form.p.G.block(off + N, 0, N, N) = Q;
  form.p.h.segment(off + N, N) = Vector::Constant(N, eps) + b;
  form.p.cones.lp += 2 * N;
  const auto res = run_conic(form.p, opts);
  const Vector mu = res.z.segment(off, N) - res.z.segment(off + N, N);
  return finish(inst, w, opts, res.xi.head(N), mu, res.iterations, false);
}

RecoveryReport solve_weighted(const ProblemInstance& inst, const WeightVector& w,
                              const SolverOptions& opts) {
  return inst.noise_set == NoiseSet::L2Ball ? solve_weighted_bp(inst, w, opts)
                                            : solve_weighted_ds(inst, w, opts);
}

Certificate optimality_certificate(const ProblemInstance& inst, const WeightVector& w,
                                   const Vector& x_hat, const std::optional<Vector>& dual_hint) {
  check_inputs(inst, w);
  check_signal(x_hat, "x_hat");
  if (x_hat.size() != inst.cols()) throw ParameterError("x_hat length does not match N");
  const bool l2 = inst.noise_set == NoiseSet::L2Ball;
  const Vector& wv = w.values();
  const double eps = inst.radius;

  Certificate cert;
  cert.objective = weighted_l1_norm(x_hat, w);

  // Dual pairing: objective >= (B'lambda)'x = lambda'c - (radius term) whenever |B'lambda| <= w.
  const Matrix B = l2 ? inst.A : Matrix(inst.A.transpose() * inst.A);
  const Vector c = l2 ? inst.y : Vector(inst.A.transpose() * inst.y);
  const Vector residual = c - B * x_hat;
  cert.feas_violation = l2 ? std::max(0.0, residual.norm() - eps)
                           : std::max(0.0, residual.lpNorm<Eigen::Infinity>() - eps);

  Matrix range_basis;  // l2 only: lambda is restricted to range(A)
  double effective_radius = eps;
  if (l2) {
    range_basis = span_basis(inst.A);
    const double dist = (inst.y - range_basis * (range_basis.transpose() * inst.y)).norm();
    if (eps < dist - 1e-12 * std::max(1.0, inst.y.norm())) {
      cert.dual_bound = kInf;
      cert.gap = -kInf;
      cert.dual = Vector::Zero(B.rows());
      return cert;
    }
    effective_radius = std::sqrt(std::max(0.0, eps * eps - dist * dist));
  }

  const auto zero = zero_weights(wv);
  Matrix zero_cols(B.rows(), static_cast<Index>(zero.size()));
  for (std::size_t j = 0; j < zero.size(); ++j) zero_cols.col(static_cast<Index>(j)) = B.col(zero[j]);
  const Matrix zero_basis = span_basis(zero_cols);

  auto evaluate = [&](Vector lambda, double& bound) {
    if (lambda.size() != B.rows() || !lambda.allFinite()) return Vector();
    if (l2) lambda = range_basis * (range_basis.transpose() * lambda);
    if (zero_basis.cols() > 0) lambda -= zero_basis * (zero_basis.transpose() * lambda);
    const Vector v = B.transpose() * lambda;
    double s = kInf;
    for (Index i = 0; i < v.size(); ++i) {
      if (wv[i] > 0.0 && v[i] != 0.0) s = std::min(s, wv[i] / std::abs(v[i]));
    }
    const double value = lambda.dot(c) - effective_radius * (l2 ? lambda.norm() : lambda.lpNorm<1>());
    if (value <= 0.0 || !std::isfinite(s)) {
      bound = 0.0;
      return Vector(Vector::Zero(B.rows()));
    }
    bound = s * value;
    return Vector(s * lambda);
  };

  std::vector<Vector> candidates;
  if (dual_hint) candidates.push_back(*dual_hint);

  // KKT reconstruction from x_hat alone: B_S' lambda = w_S sign(x_S), B_Z' lambda = 0.
  const double thr = 1e-7 * std::max(1.0, x_hat.lpNorm<Eigen::Infinity>());
  std::vector<Index> rows;
  std::vector<double> rhs;
  for (Index i = 0; i < x_hat.size(); ++i) {
    if (wv[i] > 0.0 && std::abs(x_hat[i]) > thr) {
      rows.push_back(i);
      rhs.push_back(wv[i] * (x_hat[i] > 0 ? 1.0 : -1.0));
    } else if (!(wv[i] > 0.0)) {
      rows.push_back(i);
      rhs.push_back(0.0);
    }
  }
  if (!rows.empty()) {
    Matrix K(static_cast<Index>(rows.size()), B.rows());
    for (std::size_t j = 0; j < rows.size(); ++j) K.row(static_cast<Index>(j)) = B.col(rows[j]).transpose();
    const Vector r = Eigen::Map<const Vector>(rhs.data(), static_cast<Index>(rhs.size()));
    candidates.push_back(K.completeOrthogonalDecomposition().solve(r));
  }
  if (l2 && residual.norm() > 0.0) candidates.push_back(residual);

  cert.dual_bound = 0.0;
  cert.dual = Vector::Zero(B.rows());
  for (const auto& cand : candidates) {
    double bound = 0.0;
    Vector scaled = evaluate(cand, bound);
    if (scaled.size() > 0 && bound > cert.dual_bound) {
      cert.dual_bound = bound;
      cert.dual = std::move(scaled);
    }
  }
  cert.gap = cert.objective - cert.dual_bound;
  return cert;
}

ConeDiagnostic cone_diagnostic(const Vector& x, const Vector& x_hat, const IndexSet& T0,
                               const IndexSet& T_tilde, double omega) {
  check_signal(x, "x");
  check_signal(x_hat, "x_hat");
  if (x.size() != x_hat.size()) throw ParameterError("x and x_hat lengths differ");
  if (!(omega >= 0.0 && omega <= 1.0)) throw ParameterError("omega must lie in [0,1]");
  const Index n = x.size();
  T0.check_range(n);
  T_tilde.check_range(n);
  const Vector h = x_hat - x;
  const IndexSet T0c = T0.complement(n);
  const IndexSet sym = set_difference(set_union(T0, T_tilde), set_intersection(T0, T_tilde));
  ConeDiagnostic d;
  d.lhs = l1_norm_on(h, T0c);
  d.rhs = omega * l1_norm_on(h, T0) + (1.0 - omega) * l1_norm_on(h, sym) +
          2.0 * (omega * l1_norm_on(x, T0c) +
                 (1.0 - omega) * l1_norm_on(x, set_difference(T0c, T_tilde)));
  d.holds = d.lhs <= d.rhs + 1e-8;
  return d;
}

}  // namespace wl1
