#include "dissext/first_order.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dissext/errors.hpp"
#include "dissext/quadrature.hpp"

namespace dissext {

namespace {

const cplx kI(0.0, 1.0);

void require_unit_interval(const FuncExpr& f, const char* name) {
  if (f.interval().a != 0.0 || f.interval().b != 1.0)
    throw InvalidInput(std::string(name) + " must be defined on (0, 1)", name);
}

double coefficient_scale(const FuncExpr& f) {
  double s = 0.0;
  for (const auto& t : f.terms()) s = std::max(s, std::abs(t.c));
  return s;
}

}  // namespace

SingularParams::SingularParams(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw InvalidInput("gamma must be a finite number > 0", "gamma");
}

WStarMembership wstar_domain_test(const FuncExpr& v, const SingularParams& p) {
  require_unit_interval(v, "v");
  if (!v.square_integrable()) throw DomainViolation("v is not in L^2(0, 1)");

  WStarMembership m;
  m.v_leading = endpoint_exponent(v, Endpoint::zero).exponent;
  m.v_at_one = v(1.0);
  m.c = m.v_at_one;
  // h(1) = 0 pins the coefficient of x^(gamma+1/2) to v(1)
  m.h = v.times_power(0.5) - FuncExpr::term(v.interval(), m.c, p.gamma() + 0.5);
  m.h_leading = endpoint_exponent(m.h, Endpoint::zero).exponent;
  m.h_prime_leading = endpoint_exponent(differentiate(m.h), Endpoint::zero).exponent;

  const bool vanishes_at_zero = m.h_leading > 0.0;
  const bool derivative_l2 = m.h_prime_leading > -0.5;
  m.h_H10_ok = m.h.is_zero() || (vanishes_at_zero && derivative_l2);
  m.in_domain = m.h_H10_ok;

  std::ostringstream why;
  if (m.h.is_zero()) {
    why << "sqrt(x) v = v(1) x^(gamma+1/2) exactly";
  } else if (!vanishes_at_zero) {
    why << "h = sqrt(x) v - v(1) x^(gamma+1/2) does not vanish at 0 (leading exponent "
        << m.h_leading << ")";
  } else if (!derivative_l2) {
    why << "h' has leading exponent " << m.h_prime_leading
        << " <= -1/2 at 0, so h is not in H^1_0(0, 1)";
  } else {
    why << "h = sqrt(x) v - v(1) x^(gamma+1/2) lies in H^1_0(0, 1)";
  }
  m.reason = why.str();
  return m;
}

bool in_h10(const FuncExpr& v) {
  require_unit_interval(v, "v");
  if (v.is_zero()) return true;
  if (!(endpoint_exponent(v, Endpoint::zero).exponent > 0.0)) return false;
  if (std::abs(v(1.0)) > 1e-12 * coefficient_scale(v)) return false;
  return endpoint_exponent(differentiate(v), Endpoint::zero).exponent > -0.5;
}

std::array<FuncExpr, 3> condition_pieces(const FuncExpr& v, const FuncExpr& ell,
                                         const SingularParams& p) {
  const double g = p.gamma();
  const double inv_sqrt_g = 1.0 / std::sqrt(g);
  return {
      ell.times_power(0.5) * inv_sqrt_g,
      -kI * differentiate(v.times_power(0.5) * inv_sqrt_g),
      kI * ((2.0 * g + 1.0) / (2.0 * std::sqrt(g))) * v.times_power(-0.5),
  };
}

FuncExpr wstar_part(const FuncExpr& v, const SingularParams& p) {
  const auto pieces = condition_pieces(v, FuncExpr::zero(v.interval()), p);
  return pieces[1] + pieces[2];
}

DissipativityReport dissipativity_check(const FuncExpr& v, const FuncExpr& ell,
                                        const SingularParams& p,
                                        const DissipativityOptions& opt) {
  require_unit_interval(ell, "l");
  if (!ell.square_integrable()) throw DomainViolation("l is not in L^2(0, 1)");

  DissipativityReport rep;
  rep.membership = wstar_domain_test(v, p);
  if (!rep.membership.in_domain)
    throw NotInWStarDomain("v is not in the domain of W*: " + rep.membership.reason);
  if (in_h10(v))
    throw DomainViolation("v lies in H^1_0(0, 1) = D(A); it does not extend the domain");

  rep.lhs = inner_product(v, ell).imag();

  const auto pieces = condition_pieces(v, ell, p);
  const FuncExpr integrand = pieces[0] + pieces[1] + pieces[2];
  if (opt.path == IntegrationPath::quadrature) {
    double lowest = kInfinity;
    for (const auto& piece : pieces)
      if (!piece.is_zero())
        lowest = std::min(lowest, endpoint_exponent(piece, Endpoint::zero).exponent);
    double s = 2.0 * lowest;
    if (!(s > -1.0)) s = 2.0 * endpoint_exponent(integrand, Endpoint::zero).exponent;
    if (!std::isfinite(s)) s = 0.0;
    if (!(s > -1.0))
      throw NonIntegrableSingularity("condition integrand is not square integrable at 0", s);
    const ComplexIntegrand f = [&](double x) {
      const cplx sum = pieces[0](x) + pieces[1](x) + pieces[2](x);
      return cplx(std::norm(sum), 0.0);
    };
    rep.rhs = 0.25 * quadrature_graded(f, 0.0, 1.0, s).value.real();
    rep.path_used = IntegrationPath::quadrature;
  } else {
    rep.rhs = 0.25 * integrate_abs2(integrand, 0.0, opt.path);
    rep.path_used = opt.path;
  }
  rep.margin = rep.lhs - rep.rhs;
  rep.band = opt.relative_band * std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  rep.decision = classify(rep.margin, rep.band);
  return rep;
}

ExtensionDescriptor build_extension(const FuncExpr& v, const FuncExpr& ell,
                                    const SingularParams& p) {
  ExtensionDescriptor d;
  d.report = dissipativity_check(v, ell, p);
  if (d.report.decision == Decision::not_dissipative) {
    std::ostringstream msg;
    msg << "condition fails: Im<v, l> = " << d.report.lhs << " < " << d.report.rhs;
    throw ConditionFailed(msg.str());
  }
  d.gamma = p.gamma();
  d.v = v;
  d.ell = ell;
  d.boundary = d.report.decision == Decision::boundary;
  d.domain = "H^1_0(0,1) + span{v}";
  return d;
}

FuncExpr defect_kernel(const SingularParams& p) {
  return FuncExpr::term(unit_interval(), 1.0, p.gamma(), 1.0);
}

FuncExpr defect_residual(const FuncExpr& k, const SingularParams& p) {
  return kI * differentiate(k) - (kI * p.gamma()) * k.times_power(-1.0) - kI * k;
}

}  // namespace dissext
