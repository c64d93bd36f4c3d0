#include "wl1/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wl1/errors.hpp"

namespace wl1::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Visits the orthant block, then every second-order block, with (offset, size).
template <class LpFn, class SocFn>
void for_each_block(const Cones& cones, LpFn&& lp, SocFn&& soc) {
  if (cones.lp > 0) lp(Index{0}, cones.lp);
  Index off = cones.lp;
  for (std::size_t j = 0; j < cones.soc.size(); ++j) {
    soc(j, off, cones.soc[j]);
    off += cones.soc[j];
  }
}

Vector jordan_product(const Cones& cones, const Vector& u, const Vector& v) {
  Vector out(u.size());
  for_each_block(
      cones,
      [&](Index off, Index n) {
        out.segment(off, n) = u.segment(off, n).cwiseProduct(v.segment(off, n));
      },
      [&](std::size_t, Index off, Index n) {
        out[off] = u.segment(off, n).dot(v.segment(off, n));
        out.segment(off + 1, n - 1) =
            u[off] * v.segment(off + 1, n - 1) + v[off] * u.segment(off + 1, n - 1);
      });
  return out;
}

// Solves lambda o u = r for u.
Vector jordan_divide(const Cones& cones, const Vector& lambda, const Vector& r) {
  Vector out(r.size());
  for_each_block(
      cones,
      [&](Index off, Index n) {
        out.segment(off, n) = r.segment(off, n).cwiseQuotient(lambda.segment(off, n));
      },
      [&](std::size_t, Index off, Index n) {
        const double l0 = lambda[off];
        const auto l1 = lambda.segment(off + 1, n - 1);
        const double r0 = r[off];
        const auto r1 = r.segment(off + 1, n - 1);
        const double det = l0 * l0 - l1.squaredNorm();
        const double u0 = (l0 * r0 - l1.dot(r1)) / det;
        out[off] = u0;
        out.segment(off + 1, n - 1) = (r1 - u0 * l1) / l0;
      });
  return out;
}

void add_identity(const Cones& cones, Vector& u, double a) {
  for_each_block(
      cones, [&](Index off, Index n) { u.segment(off, n).array() += a; },
      [&](std::size_t, Index off, Index) { u[off] += a; });
}

// Smallest "eigenvalue" of u with respect to K.
double cone_min_value(const Cones& cones, const Vector& u) {
  double m = kInf;
  for_each_block(
      cones, [&](Index off, Index n) { m = std::min(m, u.segment(off, n).minCoeff()); },
      [&](std::size_t, Index off, Index n) {
        m = std::min(m, u[off] - u.segment(off + 1, n - 1).norm());
      });
  return m;
}

double max_step(const Cones& cones, const Vector& u, const Vector& d) {
  double alpha = kInf;
  for_each_block(
      cones,
      [&](Index off, Index n) {
        for (Index i = off; i < off + n; ++i) {
          if (d[i] < 0.0) alpha = std::min(alpha, -u[i] / d[i]);
        }
      },
      [&](std::size_t, Index off, Index n) {
        alpha = std::min(alpha, soc_max_step(u.segment(off, n), d.segment(off, n)));
      });
  return alpha;
}

void shift_into_cone(const Cones& cones, Vector& u) {
  const double m = cone_min_value(cones, u);
  if (m <= 0.0) add_identity(cones, u, 1.0 - m);
}

struct Scaling {
  Vector lp_d;  // W = diag(sqrt(s / z)) on the orthant
  std::vector<SocScaling> soc;
  Vector lambda;

  Scaling(const Cones& cones, const Vector& s, const Vector& z) : lambda(s.size()) {
    for_each_block(
        cones,
        [&](Index off, Index n) {
          lp_d = (s.segment(off, n).cwiseQuotient(z.segment(off, n))).cwiseSqrt();
          lambda.segment(off, n) = (s.segment(off, n).cwiseProduct(z.segment(off, n))).cwiseSqrt();
        },
        [&](std::size_t, Index off, Index n) {
          soc.push_back(SocScaling::compute(s.segment(off, n), z.segment(off, n)));
          lambda.segment(off, n) = soc.back().apply(z.segment(off, n));
        });
  }

  Vector apply(const Cones& cones, const Vector& u) const {
    Vector out(u.size());
    for_each_block(
        cones,
        [&](Index off, Index n) { out.segment(off, n) = lp_d.cwiseProduct(u.segment(off, n)); },
        [&](std::size_t j, Index off, Index n) {
          out.segment(off, n) = soc[j].apply(u.segment(off, n));
        });
    return out;
  }

  Vector apply_inverse(const Cones& cones, const Vector& u) const {
    Vector out(u.size());
    for_each_block(
        cones,
        [&](Index off, Index n) { out.segment(off, n) = u.segment(off, n).cwiseQuotient(lp_d); },
        [&](std::size_t j, Index off, Index n) {
          out.segment(off, n) = soc[j].apply_inverse(u.segment(off, n));
        });
    return out;
  }

  // W^{-1} G, block by block.
  Matrix scale_rows(const Cones& cones, const Matrix& G) const {
    Matrix M(G.rows(), G.cols());
    for_each_block(
        cones,
        [&](Index off, Index n) {
          M.middleRows(off, n) = lp_d.cwiseInverse().asDiagonal() * G.middleRows(off, n);
        },
        [&](std::size_t j, Index off, Index n) {
          const auto& sc = soc[j];
          Vector jv = sc.v;
          jv.tail(n - 1) *= -1.0;
          auto B = G.middleRows(off, n);
          Matrix JB = B;
          JB.bottomRows(n - 1) *= -1.0;
          const Eigen::RowVectorXd proj = jv.transpose() * B;
          M.middleRows(off, n) = (2.0 * jv * proj - JB) / sc.eta;
        });
    return M;
  }
};

struct Direction {
  Vector dx, ds, dz, ds_scaled, dz_scaled;
};

class NewtonSystem {
 public:
  NewtonSystem(const Problem& p, const Scaling& w, int refine_steps)
      : p_(p), w_(w), M_(w.scale_rows(p.cones, p.G)), refine_(refine_steps) {
    const Index n = p.G.cols();
    H_ = Matrix::Zero(n, n);
    H_.selfadjointView<Eigen::Lower>().rankUpdate(M_.transpose());
    double scale = 1.0;
    for (Index i = 0; i < n; ++i) scale = std::max(scale, H_(i, i));
    Matrix reg = H_;
    reg.diagonal().array() += 1e-13 * scale;
    llt_.compute(reg);
    if (llt_.info() != Eigen::Success) {
      reg.diagonal().array() += 1e-9 * scale;
      llt_.compute(reg);
    }
  }

  Direction solve(const Vector& bx, const Vector& bz, const Vector& bc) const {
    const Cones& cones = p_.cones;
    Direction d;
    const Vector u = jordan_divide(cones, w_.lambda, bc);
    const Vector btilde_scaled = w_.apply_inverse(cones, bz - w_.apply(cones, u));
    const Vector rhs = bx + M_.transpose() * btilde_scaled;
    d.dx = llt_.solve(rhs);
    for (int it = 0; it < refine_; ++it) {
      const Vector r = rhs - H_.selfadjointView<Eigen::Lower>() * d.dx;
      d.dx += llt_.solve(r);
    }
    d.dz_scaled = M_ * d.dx - btilde_scaled;
    d.dz = w_.apply_inverse(cones, d.dz_scaled);
    d.ds_scaled = u - d.dz_scaled;
    d.ds = w_.apply(cones, d.ds_scaled);
    return d;
  }

 private:
  const Problem& p_;
  const Scaling& w_;
  Matrix M_;
  Matrix H_;
  Eigen::LLT<Matrix> llt_;
  int refine_;
};

struct Measures {
  double pres, dres, gap, pobj, dobj;
};

Measures measure(const Problem& p, const Vector& x, const Vector& s, const Vector& z) {
  Measures m;
  m.pres = (p.G * x + s - p.h).norm() / std::max(1.0, p.h.norm());
  m.dres = (p.G.transpose() * z + p.c).norm() / std::max(1.0, p.c.norm());
  m.gap = s.dot(z);
  m.pobj = p.c.dot(x);
  m.dobj = -p.h.dot(z);
  return m;
}

double merit(const Measures& m) {
  return std::max({m.pres, m.dres, m.gap / (1.0 + std::abs(m.pobj))});
}

}  // namespace

Index Cones::dim() const {
  Index d = lp;
  for (Index q : soc) d += q;
  return d;
}

Index Cones::degree() const { return lp + static_cast<Index>(soc.size()); }

SocScaling SocScaling::compute(const Vector& s, const Vector& z) {
  const Index n = s.size();
  const double sres = s[0] * s[0] - s.tail(n - 1).squaredNorm();
  const double zres = z[0] * z[0] - z.tail(n - 1).squaredNorm();
  if (!(sres > 0.0 && zres > 0.0)) throw DomainError("NT scaling requires interior points");
  const Vector sb = s / std::sqrt(sres);
  Vector zb = z / std::sqrt(zres);
  const double gamma = std::sqrt((1.0 + sb.dot(zb)) / 2.0);
  zb.tail(n - 1) *= -1.0;
  const Vector wbar = (sb + zb) / (2.0 * gamma);
  SocScaling sc;
  sc.eta = std::pow(sres / zres, 0.25);
  sc.v = wbar;
  sc.v[0] += 1.0;
  sc.v /= std::sqrt(2.0 * (wbar[0] + 1.0));
  return sc;
}

Vector SocScaling::apply(const Vector& u) const {
  Vector ju = u;
  ju.tail(u.size() - 1) *= -1.0;
  return eta * (2.0 * v.dot(u) * v - ju);
}

Vector SocScaling::apply_inverse(const Vector& u) const {
  Vector jv = v;
  jv.tail(v.size() - 1) *= -1.0;
  Vector ju = u;
  ju.tail(u.size() - 1) *= -1.0;
  return (2.0 * jv.dot(u) * jv - ju) / eta;
}

double soc_max_step(const Vector& u, const Vector& d) {
  const Index n = u.size();
  const double a = d[0] * d[0] - d.tail(n - 1).squaredNorm();
  const double b = u[0] * d[0] - u.tail(n - 1).dot(d.tail(n - 1));
  const double c = u[0] * u[0] - u.tail(n - 1).squaredNorm();
  // q(alpha) = a alpha^2 + 2 b alpha + c, q(0) = c > 0; first positive root exits the cone.
  double best = kInf;
  auto consider = [&](double root) {
    if (root > 0.0) best = std::min(best, root);
  };
  if (a == 0.0) {
    if (b < 0.0) consider(-c / (2.0 * b));
  } else {
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -(b + std::copysign(sq, b));
      if (q != 0.0) {
        consider(c / q);
        consider(q / a);
      }
    }
  }
  if (d[0] < 0.0) best = std::min(best, -u[0] / d[0]);
  return best;
}

Result solve(const Problem& p, const Settings& settings) {
  const Cones& cones = p.cones;
  const Index m = cones.dim();
  const Index n = p.G.cols();
  if (p.G.rows() != m || p.h.size() != m || p.c.size() != n) {
    throw ParameterError("conic problem dimensions are inconsistent");
  }

  Result res;
  // Starting point: least-squares primal and least-norm dual, shifted into K.
  {
    Matrix F = p.G.transpose() * p.G;
    double scale = 1.0;
    for (Index i = 0; i < n; ++i) scale = std::max(scale, F(i, i));
    F.diagonal().array() += 1e-10 * scale;
    Eigen::LDLT<Matrix> ldlt(F);
    res.x = ldlt.solve(p.G.transpose() * p.h);
    res.s = p.h - p.G * res.x;
    res.z = -p.G * ldlt.solve(p.c);
    shift_into_cone(cones, res.s);
    shift_into_cone(cones, res.z);
  }

  const double degree = static_cast<double>(cones.degree());
  Result best = res;
  double best_merit = kInf;
  int stalls = 0;

  for (int iter = 0;; ++iter) {
    const Measures ms = measure(p, res.x, res.s, res.z);
    res.iterations = iter;
    res.primal_res = ms.pres;
    res.dual_res = ms.dres;
    res.gap = ms.gap;
    res.primal_obj = ms.pobj;
    res.dual_obj = ms.dobj;
    const double mer = merit(ms);
    if (mer < best_merit) {
      best_merit = mer;
      best = res;
      stalls = 0;
    } else {
      ++stalls;
    }
    if (ms.pres <= settings.feas_tol && ms.dres <= settings.feas_tol &&
        ms.gap <= settings.gap_tol * (1.0 + std::abs(ms.pobj))) {
      res.status = Status::Optimal;
      return res;
    }
    if (iter >= settings.max_iters) {
      best.status = Status::MaxIters;
      return best;
    }
    if (stalls >= 5) {
      best.status = Status::Stalled;
      return best;
    }

    const Vector rx = p.G.transpose() * res.z + p.c;
    const Vector rz = p.G * res.x + res.s - p.h;
    const Scaling w(cones, res.s, res.z);
    const NewtonSystem kkt(p, w, settings.refine_steps);
    const Vector ll = jordan_product(cones, w.lambda, w.lambda);

    const Direction aff = kkt.solve(-rx, -rz, -ll);
    const double a_aff =
        std::min({1.0, max_step(cones, w.lambda, aff.ds_scaled), max_step(cones, w.lambda, aff.dz_scaled)});
    const double mu = ms.gap / degree;
    const double sigma = std::clamp(std::pow(1.0 - a_aff, 3), 0.0, 1.0);

    Vector bc = -ll - jordan_product(cones, aff.ds_scaled, aff.dz_scaled);
    add_identity(cones, bc, sigma * mu);
    const Direction dir = kkt.solve(-rx, -rz, bc);
    const double a_max =
        std::min(max_step(cones, w.lambda, dir.ds_scaled), max_step(cones, w.lambda, dir.dz_scaled));
    double alpha = std::min(1.0, settings.step_fraction * a_max);
    if (!dir.dx.allFinite()) alpha = 0.0;
    // Rounding can push a long step onto the boundary; back off until interior.
    while (alpha > 1e-12 && (cone_min_value(cones, res.s + alpha * dir.ds) <= 0.0 ||
                             cone_min_value(cones, res.z + alpha * dir.dz) <= 0.0)) {
      alpha *= 0.5;
    }
    if (!(alpha > 1e-12)) {
      best.status = Status::Stalled;
      return best;
    }
    res.x += alpha * dir.dx;
    res.s += alpha * dir.ds;
    res.z += alpha * dir.dz;
  }
}

}  // namespace wl1::conic
