#pragma once

// Accretive extensions of S = -d^2/dx^2 + V on L^2(0, inf), with V bounded
// and V >= eps > 0. The minimal operator has domain H^2_0; its Kreĭn-von
// Neumann form domain is H^1 = H^1_0 + span{eta}, where eta is the decaying
// solution of eta'' = V eta with eta(0) = 1.

#include <optional>
#include <string>
#include <vector>

#include "dissext/decision.hpp"
#include "dissext/funcexpr.hpp"

namespace dissext {

class PotentialSpec {
 public:
  enum class Kind { constant, expression, grid };

  static PotentialSpec constant(double value);
  /// Real expression on the half-line, bounded: every term has alpha >= 0
  /// and either beta < 0 or (alpha, beta) = (0, 0).
  static PotentialSpec expression(FuncExpr v, double lower, double upper);
  /// Sampled potential, constant beyond the last node.
  static PotentialSpec grid(GridFunction v, double lower, double upper);

  Kind kind() const { return kind_; }
  double lower_bound() const { return lower_; }
  double upper_bound() const { return upper_; }
  double operator()(double x) const;

  double constant_value() const { return constant_; }
  const FuncExpr& expr() const { return expr_; }
  const GridFunction& samples() const { return grid_; }

 private:
  PotentialSpec() = default;
  void validate_samples(const std::vector<double>& xs) const;

  Kind kind_ = Kind::constant;
  double constant_ = 0.0;
  FuncExpr expr_;
  GridFunction grid_;
  double lower_ = 0.0;
  double upper_ = 0.0;
};

struct EtaSolution {
  std::vector<double> nodes;       // uniform on [0, L]
  std::vector<double> eta;         // eta(0) = 1
  std::vector<double> eta_prime;   // m * eta
  std::vector<double> riccati;     // m = eta' / eta
  double eta_prime_0 = 0.0;
  double truncation_L = 0.0;
  double step = 0.0;
  double seed_sensitivity = 0.0;   // |m(0; seed) - m(0; perturbed seed)|
  double step_error = 0.0;         // |m(0; h) - m(0; h/2)|
  double tolerance_achieved = 0.0; // max of the two above
  double residual = 0.0;           // Numerov defect / (h^2 max|eta|)

  GridFunction as_grid() const;
};

/// Decaying solution of eta'' = V eta, eta(0) = 1. Integrates the Riccati
/// variable m = eta'/eta backward from m(L) = -sqrt(V(L)) with RK4 (stable
/// for the decaying branch), carrying log eta along. L defaults to
/// 40/sqrt(eps) and must satisfy sqrt(eps) L >= 20.
EtaSolution solve_eta(const PotentialSpec& v, std::optional<double> L = {},
                      double tol = 1e-10);

/// ||f'||^2 + <f, V f> for f in H^1_0(0, inf).
double friedrichs_form(const FuncExpr& f, const PotentialSpec& v);

/// ||f'||^2 + <f, V f> + eta'(0) |f(0)|^2 for f in H^1(0, inf).
double krein_form(const FuncExpr& f, double eta_prime_0, const PotentialSpec& v);

/// Kreĭn form of the computed eta itself (composite Simpson on its grid).
double krein_form(const EtaSolution& eta, const PotentialSpec& v);

struct AccretivityReport {
  double lhs = 0.0;  // Re(conj(v(0)) l'(0)) - eta'(0)/4 |v(0)|^2
  double rhs = 0.0;  // 1/4 (||v' - l'||^2 + int V |v - l|^2)
  double margin = 0.0;
  double band = 0.0;
  Decision decision = Decision::boundary;
  cplx v0{};
  cplx ell_prime_0{};
  double eta_prime_0 = 0.0;
};

/// Decides whether A_{v,l} (domain H^2_0 + span{v}, v -> i(-l'' + V l)) is
/// maximally dissipative, i.e. -i A_{v,l} maximally accretive. Requires
/// v in H^1 with (v(0), v'(0)) != 0 and l in H^2 with l(0) = 0; throws
/// DomainViolation naming the failed membership otherwise.
AccretivityReport accretive_check(const FuncExpr& v, const FuncExpr& ell,
                                  const PotentialSpec& pot, double eta_prime_0,
                                  double relative_band = 1e-9);

/// Same, solving for eta'(0) first.
AccretivityReport accretive_check(const FuncExpr& v, const FuncExpr& ell,
                                  const PotentialSpec& pot);

/// margin(c) = a0 + a1 c + a2 c^2 along l = c w for fixed v.
struct QuadraticMargin {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double operator()(double c) const { return a0 + c * (a1 + c * a2); }
  /// Closed interval where the margin is >= 0, if bounded and nonempty.
  std::optional<std::pair<double, double>> positivity_interval() const;
};

QuadraticMargin margin_along(const FuncExpr& v, const FuncExpr& w, const PotentialSpec& pot,
                             double eta_prime_0);

struct MaximalityNote {
  int defect_dimension = 1;
  std::string statement;
};

/// Defect index of the minimal operator: always 1 under the standing
/// hypotheses (limit-circle at 0, limit-point at infinity, V >= eps).
MaximalityNote maximality_note(const PotentialSpec& v);

}  // namespace dissext
