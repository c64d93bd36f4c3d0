#pragma once

// Closed-form recovery thresholds and stability constants for weighted l1
// minimization with a support estimate of size rho*k and accuracy alpha.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wl1/model.hpp"

namespace wl1 {

/// gamma = omega + (1 - omega) * sqrt(1 + rho - 2 alpha rho)
double gamma_factor(double omega, double rho, double alpha);

struct SparsityD {
  double d;
  double a;
};

/// a = max(alpha, 1 - alpha) rho; d = 1 when omega = 1, else 1 - alpha rho + a.
SparsityD sparsity_d(double omega, double rho, double alpha);

/// Derived geometry that drives every threshold and constant.
struct GeometryParams {
  double t = 0.0;
  double omega = 1.0;
  double rho = 0.0;
  double alpha = 0.0;
  double gamma = 1.0;
  double d = 1.0;
  double a = 0.0;

  static GeometryParams make(double t, double omega, double rho, double alpha);
};

/// delta_t^omega = sqrt((t-d)/(t-d+gamma^2)). Requires t > d.
double ric_threshold(const GeometryParams& g);

struct StabilityConstants {
  double D0;
  double D1;
};

/// (D0, D1) for the l2-ball noise set. Throws DomainError when delta >= threshold.
StabilityConstants stability_constants_l2(const GeometryParams& g, double delta);

/// (D0', D1') for the Dantzig noise set; uses [[tk]].
StabilityConstants stability_constants_ds(const GeometryParams& g, double delta, Index k);

/// Smallest integer >= xi (xi itself when integral up to 1e-9 relative).
long long bracket_int(double xi);

struct CzConstants {
  double C0;
  double C1;
  double C0_ds;
  double C1_ds;
};

/// Constants of the unweighted sharp RIP bound (t > 1, delta < sqrt((t-1)/t)).
CzConstants cz_constants(double t, double delta, Index k);

/// (a - gamma^2) / (a + gamma^2); nonpositive when a <= gamma^2.
double fmsy_threshold(double a, double omega, double rho, double alpha);

struct FmsyConstants {
  double C0pp;
  double C1pp;
};

/// Stability constants of the (a+1)k-order comparison result.
/// Throws DomainError when the shared denominator is not positive.
FmsyConstants fmsy_constants(double a, double delta_ak, double delta_a1k, double omega,
                             double rho, double alpha);

/// 1 / (sqrt(2) gamma + 1)
double dirac_2k_threshold(double omega, double rho, double alpha);

enum class RadiusKind { L2, DS };

/// sigma sqrt(n + 2 sqrt(n ln n)) for L2, sigma sqrt(2 ln N) for DS. Natural logs.
double gaussian_noise_radius(RadiusKind kind, Index dim, double sigma);

/// omega ||x_{T0^c}||_1 + (1 - omega) ||x_{T~^c ∩ T0^c}||_1
double weighted_tail(const Vector& x, const IndexSet& T0, const IndexSet& T_tilde, double omega);

/// Full right-hand side of the stable-recovery bound for the chosen noise set:
/// D0 (2 eps) + D1 * 2 * weighted_tail / sqrt(k).
double error_bound_rhs(const GeometryParams& g, double delta, Index k, double eps,
                       const Vector& x, const IndexSet& T0, const IndexSet& T_tilde,
                       NoiseSet kind);

/// Parameters of an (omega, alpha) sweep.
struct SweepSpec {
  double t = 4.0;
  double rho = 1.0;
  double delta = 0.1;
  std::vector<double> alphas{0.5, 0.7, 0.9};
  int omega_steps = 101;
  double omega_min = 0.0;
  double omega_max = 1.0;
  /// When set, adds delta_a_omega, C0pp, C1pp columns.
  struct Comparison {
    double a = 3.0;
    double delta_ak = 0.05;
    double delta_a1k = 0.1;
  };
  std::optional<Comparison> comparison;
};

/// Rectangular table; entries that diverge are +inf.
struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

SweepTable figure_sweep(const SweepSpec& spec);

/// Writes the table as CSV; infinite values are written as "inf".
void write_csv(std::ostream& os, const SweepTable& table);

}  // namespace wl1
