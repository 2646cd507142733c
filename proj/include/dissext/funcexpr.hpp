#pragma once

#include <complex>
#include <limits>
#include <map>
#include <vector>

namespace dissext {

using cplx = std::complex<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Open interval (a, b) with 0 <= a < b <= inf.
struct Interval {
  double a = 0.0;
  double b = 1.0;
  bool infinite() const { return b == kInfinity; }
};

Interval unit_interval();
Interval half_line();

/// One term c * x^alpha * exp(beta x).
struct Term {
  cplx c;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Finite sum of power-exponential terms on an interval. Like terms are
/// merged on construction and negligible coefficients dropped, so exact
/// cancellations produce an exactly zero expression.
class FuncExpr {
 public:
  FuncExpr() = default;
  FuncExpr(Interval iv, std::vector<Term> terms);

  static FuncExpr zero(Interval iv) { return FuncExpr(iv, {}); }
  /// c * x^alpha * exp(beta x)
  static FuncExpr term(Interval iv, cplx c, double alpha, double beta = 0.0);

  const Interval& interval() const { return interval_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  cplx operator()(double x) const;

  /// Every term is square integrable near 0 (alpha > -1/2 when a = 0) and
  /// at infinity (beta < 0 when b = inf). Evaluated after Taylor merging
  /// at 0, so cancelling leading terms do not count against it.
  bool square_integrable() const;

  FuncExpr operator+(const FuncExpr& o) const;
  FuncExpr operator-(const FuncExpr& o) const;
  FuncExpr operator*(const FuncExpr& o) const;
  FuncExpr operator*(cplx s) const;
  FuncExpr operator-() const { return *this * cplx(-1.0); }
  /// x^p * f
  FuncExpr times_power(double p) const;
  FuncExpr conj() const;

 private:
  void normalize();

  Interval interval_{};
  std::vector<Term> terms_;
};

inline FuncExpr operator*(cplx s, const FuncExpr& f) { return f * s; }

/// Termwise exact derivative. The result may leave L^2 near 0; that is
/// allowed here and checked where it is integrated.
FuncExpr differentiate(const FuncExpr& f);

/// Taylor expansion at 0+: coefficients of x^e for every exponent e up to
/// max_exponent (exp(beta x) expanded), keyed by exponent. Coefficients that
/// cancel to below 1e-13 of the input scale are dropped.
std::map<double, cplx> taylor_at_zero(const FuncExpr& f, double max_exponent);

struct LeadingTerm {
  double exponent = kInfinity;  // +inf for the zero function
  cplx coefficient{};
};

enum class Endpoint { zero, one };

/// At 0: smallest exponent with a nonzero merged coefficient. At 1: the
/// value f(1) with exponent 0.
LeadingTerm endpoint_exponent(const FuncExpr& f, Endpoint at);

/// Limit of f at 0+. Throws DomainViolation if f is unbounded there.
cplx value_at_zero(const FuncExpr& f);

enum class IntegrationPath { automatic, closed_form, quadrature };

/// Integral of x^p |f|^2 over the interval.
double integrate_abs2(const FuncExpr& f, double p,
                      IntegrationPath path = IntegrationPath::automatic);

/// Integral of x^p conj(f) g over the common interval.
cplx inner_product(const FuncExpr& f, const FuncExpr& g, double p = 0.0,
                   IntegrationPath path = IntegrationPath::automatic);

/// Closed form of the integral of x^mu exp(sigma x) over iv, when one of
/// the supported evaluations applies (power rule, Gamma function on the
/// half-line, convergent series on bounded intervals). Throws
/// NonIntegrableSingularity if divergent; returns false in `ok` when no
/// closed form is available.
double power_exp_integral(double mu, double sigma, const Interval& iv, bool& ok);

/// Piecewise-linear sampled function.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(std::vector<double> nodes, std::vector<cplx> values);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<cplx>& values() const { return values_; }
  std::size_t size() const { return nodes_.size(); }
  /// Linear interpolation; constant extrapolation outside the nodes.
  cplx operator()(double x) const;

 private:
  std::vector<double> nodes_;
  std::vector<cplx> values_;
};

}  // namespace dissext
