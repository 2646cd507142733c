#include "dissext/schrodinger.hpp"

#include <algorithm>
#include <cmath>

#include "dissext/errors.hpp"
#include "dissext/quadrature.hpp"

namespace dissext {

namespace {

constexpr double kSampleSlack = 1e-12;

void require_half_line(const FuncExpr& f, const char* name) {
  if (f.interval().a != 0.0 || !f.interval().infinite())
    throw InvalidInput(std::string(name) + " must be defined on (0, inf)", name);
}

// H^1(0, inf) membership by exponent analysis.
void require_h1(const FuncExpr& f, const char* name) {
  require_half_line(f, name);
  if (!f.square_integrable())
    throw DomainViolation(std::string(name) + " is not in L^2(0, inf)");
  if (!differentiate(f).square_integrable())
    throw DomainViolation(std::string(name) + "' is not in L^2(0, inf), so " + name +
                          " is not in H^1");
}

double coefficient_scale(const FuncExpr& f) {
  double s = 0.0;
  for (const auto& t : f.terms()) s = std::max(s, std::abs(t.c));
  return s;
}

bool negligible(cplx value, double scale) { return std::abs(value) <= 1e-12 * std::max(scale, 1e-300); }

double potential_integral(const FuncExpr& f, const PotentialSpec& v) {
  switch (v.kind()) {
    case PotentialSpec::Kind::constant:
      return v.constant_value() * integrate_abs2(f, 0.0);
    case PotentialSpec::Kind::expression:
      return inner_product(f, v.expr() * f, 0.0).real();
    case PotentialSpec::Kind::grid: {
      if (f.is_zero()) return 0.0;
      double beta = -kInfinity;
      for (const auto& t : f.terms()) beta = std::max(beta, t.beta);
      const double lead = endpoint_exponent(f, Endpoint::zero).exponent;
      const ComplexIntegrand g = [&](double x) { return cplx(v(x) * std::norm(f(x)), 0.0); };
      return quadrature_halfline(g, 0.0, -2.0 * beta, std::max(2.0 * lead, 0.0)).value.real();
    }
  }
  return 0.0;
}

struct RiccatiRun {
  std::vector<double> m;
  std::vector<double> log_eta;  // unnormalized
};

RiccatiRun integrate_backward(const PotentialSpec& v, double L, int steps, double seed) {
  const double h = L / steps;
  RiccatiRun run;
  run.m.assign(steps + 1, 0.0);
  run.log_eta.assign(steps + 1, 0.0);
  double m = seed;
  double s = 0.0;
  run.m[steps] = m;
  for (int i = steps; i > 0; --i) {
    const double x = i * h;
    const double vx = v(x), vmid = v(x - 0.5 * h), vend = v(x - h);
    const double k1m = vx - m * m, k1s = m;
    const double m2 = m - 0.5 * h * k1m;
    const double k2m = vmid - m2 * m2, k2s = m2;
    const double m3 = m - 0.5 * h * k2m;
    const double k3m = vmid - m3 * m3, k3s = m3;
    const double m4 = m - h * k3m;
    const double k4m = vend - m4 * m4, k4s = m4;
    m -= h / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
    s -= h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
    run.m[i - 1] = m;
    run.log_eta[i - 1] = s;
  }
  return run;
}

}  // namespace

PotentialSpec PotentialSpec::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw InvalidInput("constant potential must be finite and > 0", "potential");
  PotentialSpec p;
  p.kind_ = Kind::constant;
  p.constant_ = value;
  p.lower_ = value;
  p.upper_ = value;
  return p;
}

PotentialSpec PotentialSpec::expression(FuncExpr v, double lower, double upper) {
  require_half_line(v, "potential");
  if (!(lower > 0.0) || !(upper >= lower))
    throw InvalidInput("potential bounds must satisfy 0 < lower <= upper", "potential");
  for (const auto& t : v.terms()) {
    const bool bounded = t.alpha >= 0.0 && (t.beta < 0.0 || (t.beta == 0.0 && t.alpha == 0.0));
    if (!bounded) throw InvalidInput("potential term is unbounded on (0, inf)", "potential");
    if (std::abs(t.c.imag()) > 0.0) throw InvalidInput("potential must be real", "potential");
  }
  PotentialSpec p;
  p.kind_ = Kind::expression;
  p.expr_ = std::move(v);
  p.lower_ = lower;
  p.upper_ = upper;
  std::vector<double> xs;
  for (int i = 0; i <= 4000; ++i) xs.push_back(0.025 * i);
  p.validate_samples(xs);
  return p;
}

PotentialSpec PotentialSpec::grid(GridFunction v, double lower, double upper) {
  if (!(lower > 0.0) || !(upper >= lower))
    throw InvalidInput("potential bounds must satisfy 0 < lower <= upper", "potential");
  for (const auto& y : v.values())
    if (std::abs(y.imag()) > 0.0) throw InvalidInput("potential must be real", "potential");
  if (v.nodes().front() < 0.0) throw InvalidInput("potential nodes must be >= 0", "potential");
  PotentialSpec p;
  p.kind_ = Kind::grid;
  p.grid_ = std::move(v);
  p.lower_ = lower;
  p.upper_ = upper;
  p.validate_samples(p.grid_.nodes());
  return p;
}

void PotentialSpec::validate_samples(const std::vector<double>& xs) const {
  for (double x : xs) {
    const double y = (*this)(x);
    if (!(y >= lower_ * (1.0 - kSampleSlack)) || !(y <= upper_ * (1.0 + kSampleSlack)))
      throw InvalidInput("potential value " + std::to_string(y) + " at x = " + std::to_string(x) +
                             " lies outside [lower, upper]",
                         "potential");
  }
}

double PotentialSpec::operator()(double x) const {
  switch (kind_) {
    case Kind::constant: return constant_;
    case Kind::expression: return expr_(x).real();
    case Kind::grid: return grid_(x).real();
  }
  return 0.0;
}

GridFunction EtaSolution::as_grid() const {
  std::vector<cplx> vals(eta.begin(), eta.end());
  return GridFunction(nodes, std::move(vals));
}

EtaSolution solve_eta(const PotentialSpec& v, std::optional<double> L_opt, double tol) {
  const double eps = v.lower_bound();
  const double L = L_opt.value_or(40.0 / std::sqrt(eps));
  if (!(L > 0.0)) throw InvalidInput("truncation L must be > 0", "truncation_L");
  if (std::sqrt(eps) * L < 20.0)
    throw TruncationTooSmall("truncation too short: sqrt(eps) * L = " +
                                 std::to_string(std::sqrt(eps) * L) + " < 20",
                             std::sqrt(eps) * L);

  const double seed = -std::sqrt(v(L));
  const double h0 = std::min(2e-3, 0.05 / std::sqrt(v.upper_bound()));
  int steps = static_cast<int>(std::ceil(L / h0));
  steps += steps % 2;

  RiccatiRun run;
  double step_error = kInfinity;
  for (int attempt = 0; attempt < 5; ++attempt) {
    run = integrate_backward(v, L, steps, seed);
    const RiccatiRun half = integrate_backward(v, L, 2 * steps, seed);
    step_error = std::abs(run.m[0] - half.m[0]);
    if (step_error <= tol) break;
    steps *= 2;
  }
  if (step_error > tol)
    throw ToleranceNotMet("eta: step refinement did not reach tolerance", step_error);

  const double sens = std::max(std::abs(integrate_backward(v, L, steps, 2.0 * seed).m[0] - run.m[0]),
                               std::abs(integrate_backward(v, L, steps, 0.5 * seed).m[0] - run.m[0]));
  if (sens > tol)
    throw TruncationTooSmall("eta: Riccati solution has not stabilized (seed sensitivity " +
                                 std::to_string(sens) + ")",
                             sens);

  EtaSolution sol;
  const double h = L / steps;
  sol.truncation_L = L;
  sol.step = h;
  sol.seed_sensitivity = sens;
  sol.step_error = step_error;
  sol.tolerance_achieved = std::max(sens, step_error);
  sol.riccati = std::move(run.m);
  sol.nodes.resize(steps + 1);
  sol.eta.resize(steps + 1);
  sol.eta_prime.resize(steps + 1);
  const double s0 = run.log_eta[0];
  for (int i = 0; i <= steps; ++i) {
    sol.nodes[i] = i * h;
    sol.eta[i] = std::exp(run.log_eta[i] - s0);
    sol.eta_prime[i] = sol.riccati[i] * sol.eta[i];
  }
  sol.eta[0] = 1.0;
  sol.eta_prime[0] = sol.riccati[0];
  sol.eta_prime_0 = sol.riccati[0];

  double defect = 0.0;
  for (int i = 1; i < steps; ++i) {
    const double fm = v(sol.nodes[i - 1]) * sol.eta[i - 1];
    const double f0 = v(sol.nodes[i]) * sol.eta[i];
    const double fp = v(sol.nodes[i + 1]) * sol.eta[i + 1];
    const double d = sol.eta[i + 1] - 2.0 * sol.eta[i] + sol.eta[i - 1] -
                     h * h / 12.0 * (fp + 10.0 * f0 + fm);
    defect = std::max(defect, std::abs(d));
  }
  sol.residual = defect / (h * h);
  return sol;
}

double friedrichs_form(const FuncExpr& f, const PotentialSpec& v) {
  require_h1(f, "f");
  if (!negligible(value_at_zero(f), coefficient_scale(f)))
    throw DomainViolation("f(0) != 0: f is not in H^1_0(0, inf)");
  return integrate_abs2(differentiate(f), 0.0) + potential_integral(f, v);
}

double krein_form(const FuncExpr& f, double eta_prime_0, const PotentialSpec& v) {
  require_h1(f, "f");
  const cplx f0 = value_at_zero(f);
  return integrate_abs2(differentiate(f), 0.0) + potential_integral(f, v) +
         eta_prime_0 * std::norm(f0);
}

double krein_form(const EtaSolution& eta, const PotentialSpec& v) {
  const std::size_t n = eta.nodes.size();
  if (n < 3 || n % 2 == 0) throw InvalidInput("eta grid must have an odd number of nodes >= 3");
  const double h = eta.step;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double g = eta.eta_prime[i] * eta.eta_prime[i] + v(eta.nodes[i]) * eta.eta[i] * eta.eta[i];
    acc += w * g;
  }
  return acc * h / 3.0 + eta.eta_prime_0 * eta.eta[0] * eta.eta[0];
}

AccretivityReport accretive_check(const FuncExpr& v, const FuncExpr& ell, const PotentialSpec& pot,
                                  double eta_prime_0, double relative_band) {
  require_h1(v, "v");
  const FuncExpr dv = differentiate(v);
  const cplx v0 = value_at_zero(v);
  if (negligible(v0, coefficient_scale(v))) {
    cplx dv0;
    try {
      dv0 = value_at_zero(dv);
    } catch (const DomainViolation&) {
      throw DomainViolation(
          "v(0) = 0 and v' is unbounded at 0: v is outside H^2, this case is unsupported");
    }
    if (negligible(dv0, coefficient_scale(dv)))
      throw DomainViolation("v(0) = v'(0) = 0: v lies in H^2_0 (or is unsupported)");
  }

  require_h1(ell, "l");
  const FuncExpr dl = differentiate(ell);
  if (!differentiate(dl).square_integrable())
    throw DomainViolation("l'' is not in L^2(0, inf): l is outside the Friedrichs domain");
  if (!negligible(value_at_zero(ell), coefficient_scale(ell)))
    throw DomainViolation("l(0) != 0: l is outside the Friedrichs domain");
  const cplx dl0 = value_at_zero(dl);

  AccretivityReport rep;
  rep.v0 = v0;
  rep.ell_prime_0 = dl0;
  rep.eta_prime_0 = eta_prime_0;
  rep.lhs = (std::conj(v0) * dl0).real() - eta_prime_0 / 4.0 * std::norm(v0);
  rep.rhs = 0.25 * (integrate_abs2(dv - dl, 0.0) + potential_integral(v - ell, pot));
  rep.margin = rep.lhs - rep.rhs;
  rep.band = relative_band * std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  rep.decision = classify(rep.margin, rep.band);
  return rep;
}

AccretivityReport accretive_check(const FuncExpr& v, const FuncExpr& ell, const PotentialSpec& pot) {
  return accretive_check(v, ell, pot, solve_eta(pot).eta_prime_0);
}

QuadraticMargin margin_along(const FuncExpr& v, const FuncExpr& w, const PotentialSpec& pot,
                             double eta_prime_0) {
  const double m0 = accretive_check(v, w * 0.0, pot, eta_prime_0).margin;
  const double mp = accretive_check(v, w, pot, eta_prime_0).margin;
  const double mm = accretive_check(v, w * -1.0, pot, eta_prime_0).margin;
  QuadraticMargin q;
  q.a0 = m0;
  q.a1 = 0.5 * (mp - mm);
  q.a2 = 0.5 * (mp + mm) - m0;
  return q;
}

std::optional<std::pair<double, double>> QuadraticMargin::positivity_interval() const {
  if (!(a2 < 0.0)) return std::nullopt;  // unbounded or degenerate
  const double disc = a1 * a1 - 4.0 * a2 * a0;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  // stable root pair
  const double q = -0.5 * (a1 + std::copysign(sq, a1));
  double r1 = q / a2;
  double r2 = q != 0.0 ? a0 / q : r1;
  if (r1 > r2) std::swap(r1, r2);
  return std::make_pair(r1, r2);
}

MaximalityNote maximality_note(const PotentialSpec& v) {
  MaximalityNote note;
  note.defect_dimension = 1;
  note.statement =
      "S = -d^2/dx^2 + V with " + std::to_string(v.lower_bound()) +
      " <= V <= " + std::to_string(v.upper_bound()) +
      " is limit-circle at 0 and limit-point at infinity, so dim ker(S* +- i) = "
      "dim ker(S* + 1) = dim ker(A* - i) = 1 for A = iS; maximal dissipative extensions "
      "add exactly one dimension to H^2_0.";
  return note;
}

}  // namespace dissext
