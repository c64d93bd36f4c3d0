#include "wl1/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wl1/errors.hpp"
#include "wl1/io.hpp"

namespace wl1 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_support_params(double omega, double rho, double alpha) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw ParameterError("omega must lie in [0,1]");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ParameterError("rho must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0,1]");
}

void check_delta(double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ParameterError("delta must be >= 0");
}

}  // namespace

double gamma_factor(double omega, double rho, double alpha) {
  check_support_params(omega, rho, alpha);
  const double radicand = 1.0 + rho - 2.0 * alpha * rho;
  if (radicand < 0.0) throw ParameterError("1 + rho - 2 alpha rho is negative");
  return omega + (1.0 - omega) * std::sqrt(radicand);
}

SparsityD sparsity_d(double omega, double rho, double alpha) {
  check_support_params(omega, rho, alpha);
  const double a = std::max(alpha, 1.0 - alpha) * rho;
  const double d = omega == 1.0 ? 1.0 : 1.0 - alpha * rho + a;
  return {d, a};
}

GeometryParams GeometryParams::make(double t, double omega, double rho, double alpha) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ParameterError("t must be positive");
  GeometryParams g;
  g.t = t;
  g.omega = omega;
  g.rho = rho;
  g.alpha = alpha;
  g.gamma = gamma_factor(omega, rho, alpha);
  const auto [d, a] = sparsity_d(omega, rho, alpha);
  g.d = d;
  g.a = a;
  return g;
}

double ric_threshold(const GeometryParams& g) {
  if (!(g.t > g.d)) {
    throw DomainError("threshold undefined: t = " + std::to_string(g.t) +
                      " must exceed d = " + std::to_string(g.d));
  }
  const double td = g.t - g.d;
  return std::sqrt(td / (td + g.gamma * g.gamma));
}

namespace {

// Shared pieces of D0, D1, D0': q = t-d+gamma^2 and the gap q*(threshold - delta).
struct Pieces {
  double td;
  double q;
  double gap;
};

Pieces pieces(const GeometryParams& g, double delta) {
  check_delta(delta);
  const double threshold = ric_threshold(g);
  if (!(delta < threshold)) {
    throw DomainError("constants diverge: delta = " + std::to_string(delta) +
                      " is not below the threshold " + std::to_string(threshold));
  }
  const double td = g.t - g.d;
  const double q = td + g.gamma * g.gamma;
  return {td, q, q * (threshold - delta)};
}

}  // namespace

StabilityConstants stability_constants_l2(const GeometryParams& g, double delta) {
  const auto p = pieces(g, delta);
  const double D0 = std::sqrt(2.0 * p.td * p.q * (1.0 + delta)) / p.gap;
  const double D1 = (std::sqrt(2.0) * delta * g.gamma + std::sqrt(p.gap * delta)) / p.gap +
                    1.0 / std::sqrt(g.d);
  return {D0, D1};
}

StabilityConstants stability_constants_ds(const GeometryParams& g, double delta, Index k) {
  if (k < 1) throw ParameterError("k must be positive");
  const auto p = pieces(g, delta);
  const double tk = static_cast<double>(bracket_int(g.t * static_cast<double>(k)));
  const double D0 = std::sqrt(2.0 * p.td * p.q * tk) / p.gap;
  return {D0, stability_constants_l2(g, delta).D1};
}

long long bracket_int(double xi) {
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw ParameterError("bracket_int needs xi >= 0");
  const double r = std::round(xi);
  if (std::abs(xi - r) <= 1e-9 * std::max(1.0, xi)) return static_cast<long long>(r);
  return static_cast<long long>(std::ceil(xi));
}

CzConstants cz_constants(double t, double delta, Index k) {
  if (!(t > 1.0)) throw DomainError("cz constants need t > 1");
  if (k < 1) throw ParameterError("k must be positive");
  check_delta(delta);
  const double threshold = std::sqrt((t - 1.0) / t);
  if (!(delta < threshold)) {
    throw DomainError("constants diverge: delta must be below sqrt((t-1)/t)");
  }
  const double denom = t * (threshold - delta);
  CzConstants c;
  c.C0 = std::sqrt(2.0 * t * (t - 1.0) * (1.0 + delta)) / denom;
  c.C1 = (std::sqrt(2.0) * delta + std::sqrt(denom * delta)) / denom + 1.0;
  c.C0_ds = std::sqrt(2.0 * t * t * (t - 1.0) * static_cast<double>(k)) / denom;
  c.C1_ds = c.C1;
  return c;
}

double fmsy_threshold(double a, double omega, double rho, double alpha) {
  const double g2 = std::pow(gamma_factor(omega, rho, alpha), 2);
  return (a - g2) / (a + g2);
}

FmsyConstants fmsy_constants(double a, double delta_ak, double delta_a1k, double omega,
                             double rho, double alpha) {
  if (!(a > 0.0)) throw ParameterError("a must be positive");
  check_delta(delta_ak);
  check_delta(delta_a1k);
  if (!(delta_a1k < 1.0)) throw DomainError("delta_(a+1)k must be below 1");
  const double ratio = gamma_factor(omega, rho, alpha) / std::sqrt(a);
  const double lower = std::sqrt(1.0 - delta_a1k);
  const double upper = std::sqrt(1.0 + delta_ak);
  const double denom = lower - ratio * upper;
  if (!(denom > 0.0)) throw DomainError("comparison constants diverge: denominator <= 0");
  return {(1.0 + ratio) / denom, (lower + upper) / std::sqrt(a) / denom};
}

double dirac_2k_threshold(double omega, double rho, double alpha) {
  return 1.0 / (std::sqrt(2.0) * gamma_factor(omega, rho, alpha) + 1.0);
}

double gaussian_noise_radius(RadiusKind kind, Index dim, double sigma) {
  if (dim < 2) throw ParameterError("noise radius needs dimension >= 2");
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be >= 0");
  const double n = static_cast<double>(dim);
  if (kind == RadiusKind::L2) return sigma * std::sqrt(n + 2.0 * std::sqrt(n * std::log(n)));
  return sigma * std::sqrt(2.0 * std::log(n));
}

double weighted_tail(const Vector& x, const IndexSet& T0, const IndexSet& T_tilde,
                     double omega) {
  const Index n = x.size();
  T0.check_range(n);
  T_tilde.check_range(n);
  const IndexSet off = T0.complement(n);
  const IndexSet off_both = set_difference(off, T_tilde);
  return omega * l1_norm_on(x, off) + (1.0 - omega) * l1_norm_on(x, off_both);
}

double error_bound_rhs(const GeometryParams& g, double delta, Index k, double eps,
                       const Vector& x, const IndexSet& T0, const IndexSet& T_tilde,
                       NoiseSet kind) {
  if (!(eps >= 0.0)) throw ParameterError("eps must be >= 0");
  check_signal(x, "x");
  const auto c = kind == NoiseSet::L2Ball ? stability_constants_l2(g, delta)
                                          : stability_constants_ds(g, delta, k);
  const double tail = weighted_tail(x, T0, T_tilde, g.omega);
  return c.D0 * (2.0 * eps) + c.D1 * 2.0 * tail / std::sqrt(static_cast<double>(k));
}

std::size_t SweepTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ParameterError("no column named '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

SweepTable figure_sweep(const SweepSpec& spec) {
  if (spec.omega_steps < 1) throw ParameterError("omega_steps must be >= 1");
  if (spec.alphas.empty()) throw ParameterError("alpha grid is empty");
  SweepTable table;
  table.columns = {"omega", "alpha", "delta_t_omega", "D0", "D1"};
  if (spec.comparison) {
    table.columns.insert(table.columns.end(), {"delta_a_omega", "C0pp", "C1pp"});
  }
  for (double alpha : spec.alphas) {
    for (int i = 0; i < spec.omega_steps; ++i) {
      const double omega =
          spec.omega_steps == 1
              ? spec.omega_min
              : spec.omega_min + (spec.omega_max - spec.omega_min) * i / (spec.omega_steps - 1);
      const auto g = GeometryParams::make(spec.t, omega, spec.rho, alpha);
      std::vector<double> row{omega, alpha, kInf, kInf, kInf};
      if (g.t > g.d) {
        row[2] = ric_threshold(g);
        if (spec.delta < row[2]) {
          const auto c = stability_constants_l2(g, spec.delta);
          row[3] = c.D0;
          row[4] = c.D1;
        }
      }
      if (spec.comparison) {
        const auto& cmp = *spec.comparison;
        row.push_back(fmsy_threshold(cmp.a, omega, spec.rho, alpha));
        try {
          const auto c = fmsy_constants(cmp.a, cmp.delta_ak, cmp.delta_a1k, omega, spec.rho, alpha);
          row.push_back(c.C0pp);
          row.push_back(c.C1pp);
        } catch (const DomainError&) {
          row.push_back(kInf);
          row.push_back(kInf);
        }
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

void write_csv(std::ostream& os, const SweepTable& table) {
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    os << (j ? "," : "") << table.columns[j];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      os << (j ? "," : "") << format_double(row[j]);
    }
    os << '\n';
  }
}

}  // namespace wl1
