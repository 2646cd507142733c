#include "dissext/funcexpr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dissext/errors.hpp"
#include "dissext/quadrature.hpp"

namespace dissext {

namespace {

constexpr double kExponentTol = 1e-12;
constexpr double kCancelTol = 1e-13;
constexpr int kTaylorReach = 40;

bool same_exponent(double x, double y) { return std::abs(x - y) <= kExponentTol; }

void require_same_interval(const Interval& x, const Interval& y) {
  if (x.a != y.a || x.b != y.b)
    throw InvalidInput("function expressions live on different intervals");
}

// Adds `c` at exponent `e`, tracking the largest contribution per slot.
struct MergeSlot {
  cplx sum{};
  double scale = 0.0;
};

void accumulate(std::map<double, MergeSlot>& slots, double e, cplx c) {
  auto it = slots.lower_bound(e - kExponentTol);
  if (it == slots.end() || !same_exponent(it->first, e)) it = slots.emplace(e, MergeSlot{}).first;
  it->second.sum += c;
  it->second.scale = std::max(it->second.scale, std::abs(c));
}

}  // namespace

Interval unit_interval() { return {0.0, 1.0}; }
Interval half_line() { return {0.0, kInfinity}; }

FuncExpr::FuncExpr(Interval iv, std::vector<Term> terms)
    : interval_(iv), terms_(std::move(terms)) {
  if (!(iv.a >= 0.0) || !(iv.b > iv.a))
    throw InvalidInput("interval must satisfy 0 <= a < b <= inf");
  for (const auto& t : terms_)
    if (!std::isfinite(t.c.real()) || !std::isfinite(t.c.imag()) || !std::isfinite(t.alpha) ||
        !std::isfinite(t.beta))
      throw InvalidInput("function term has a non-finite parameter");
  normalize();
}

FuncExpr FuncExpr::term(Interval iv, cplx c, double alpha, double beta) {
  return FuncExpr(iv, {Term{c, alpha, beta}});
}

void FuncExpr::normalize() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& x, const Term& y) {
    if (!same_exponent(x.alpha, y.alpha)) return x.alpha < y.alpha;
    return x.beta < y.beta;
  });
  std::vector<Term> merged;
  double scale = 0.0;
  for (const auto& t : terms_) {
    if (!merged.empty() && same_exponent(merged.back().alpha, t.alpha) &&
        same_exponent(merged.back().beta, t.beta)) {
      merged.back().c += t.c;
      scale = std::max(scale, std::abs(t.c));
    } else {
      if (!merged.empty() && std::abs(merged.back().c) <= kCancelTol * scale) merged.pop_back();
      merged.push_back(t);
      scale = std::abs(t.c);
    }
  }
  if (!merged.empty() && std::abs(merged.back().c) <= kCancelTol * scale) merged.pop_back();
  std::erase_if(merged, [](const Term& t) { return t.c == cplx(0.0); });
  terms_ = std::move(merged);
}

cplx FuncExpr::operator()(double x) const {
  cplx s = 0.0;
  for (const auto& t : terms_) s += t.c * std::pow(x, t.alpha) * std::exp(t.beta * x);
  return s;
}

bool FuncExpr::square_integrable() const {
  if (terms_.empty()) return true;
  if (interval_.infinite())
    for (const auto& t : terms_)
      if (!(t.beta < 0.0)) return false;
  if (interval_.a == 0.0) return endpoint_exponent(*this, Endpoint::zero).exponent > -0.5;
  return true;
}

FuncExpr FuncExpr::operator+(const FuncExpr& o) const {
  require_same_interval(interval_, o.interval_);
  std::vector<Term> t = terms_;
  t.insert(t.end(), o.terms_.begin(), o.terms_.end());
  return FuncExpr(interval_, std::move(t));
}

FuncExpr FuncExpr::operator-(const FuncExpr& o) const { return *this + (-o); }

FuncExpr FuncExpr::operator*(const FuncExpr& o) const {
  require_same_interval(interval_, o.interval_);
  std::vector<Term> t;
  t.reserve(terms_.size() * o.terms_.size());
  for (const auto& x : terms_)
    for (const auto& y : o.terms_) t.push_back({x.c * y.c, x.alpha + y.alpha, x.beta + y.beta});
  return FuncExpr(interval_, std::move(t));
}

FuncExpr FuncExpr::operator*(cplx s) const {
  std::vector<Term> t = terms_;
  for (auto& x : t) x.c *= s;
  return FuncExpr(interval_, std::move(t));
}

FuncExpr FuncExpr::times_power(double p) const {
  std::vector<Term> t = terms_;
  for (auto& x : t) x.alpha += p;
  return FuncExpr(interval_, std::move(t));
}

FuncExpr FuncExpr::conj() const {
  std::vector<Term> t = terms_;
  for (auto& x : t) x.c = std::conj(x.c);
  return FuncExpr(interval_, std::move(t));
}

FuncExpr differentiate(const FuncExpr& f) {
  std::vector<Term> out;
  for (const auto& t : f.terms()) {
    if (t.alpha != 0.0) out.push_back({t.c * t.alpha, t.alpha - 1.0, t.beta});
    if (t.beta != 0.0) out.push_back({t.c * t.beta, t.alpha, t.beta});
  }
  return FuncExpr(f.interval(), std::move(out));
}

std::map<double, cplx> taylor_at_zero(const FuncExpr& f, double max_exponent) {
  std::map<double, MergeSlot> slots;
  for (const auto& t : f.terms()) {
    cplx c = t.c;
    for (int j = 0; t.alpha + j <= max_exponent + kExponentTol; ++j) {
      if (j > 0) {
        if (t.beta == 0.0) break;
        c *= t.beta / j;
      }
      accumulate(slots, t.alpha + j, c);
    }
  }
  std::map<double, cplx> out;
  for (const auto& [e, slot] : slots)
    if (std::abs(slot.sum) > kCancelTol * slot.scale) out.emplace(e, slot.sum);
  return out;
}

LeadingTerm endpoint_exponent(const FuncExpr& f, Endpoint at) {
  if (at == Endpoint::one) return {0.0, f(1.0)};
  if (f.is_zero()) return {};
  double lowest = kInfinity;
  for (const auto& t : f.terms()) lowest = std::min(lowest, t.alpha);
  for (int reach = 2; reach <= kTaylorReach; reach *= 2) {
    const auto series = taylor_at_zero(f, lowest + reach);
    if (!series.empty()) return {series.begin()->first, series.begin()->second};
  }
  // every coefficient cancels to the reach of the expansion
  return {};
}

cplx value_at_zero(const FuncExpr& f) {
  const auto lead = endpoint_exponent(f, Endpoint::zero);
  if (lead.exponent > kExponentTol) return 0.0;
  if (same_exponent(lead.exponent, 0.0)) return lead.coefficient;
  throw DomainViolation("function is unbounded at 0 (leading exponent " +
                        std::to_string(lead.exponent) + ")");
}

double power_exp_integral(double mu, double sigma, const Interval& iv, bool& ok) {
  ok = true;
  const double a = iv.a;
  const double b = iv.b;
  if (sigma == 0.0) {
    if (iv.infinite())
      throw NonIntegrableSingularity("integrand does not decay at infinity", sigma);
    if (std::abs(mu + 1.0) < 1e-14) {
      if (a == 0.0) throw NonIntegrableSingularity("integral of 1/x diverges at 0", mu);
      return std::log(b / a);
    }
    if (a == 0.0 && mu < -1.0)
      throw NonIntegrableSingularity("power singularity at 0 is not integrable", mu);
    return (std::pow(b, mu + 1.0) - std::pow(a, mu + 1.0)) / (mu + 1.0);
  }
  if (a == 0.0 && !(mu > -1.0))
    throw NonIntegrableSingularity("power singularity at 0 is not integrable", mu);
  if (iv.infinite()) {
    if (!(sigma < 0.0))
      throw NonIntegrableSingularity("integrand does not decay at infinity", sigma);
    if (a == 0.0) return std::tgamma(mu + 1.0) / std::pow(-sigma, mu + 1.0);
    ok = false;
    return 0.0;
  }
  if (!(sigma > 0.0 || std::abs(sigma) * b <= 2.0)) {
    ok = false;
    return 0.0;
  }
  // F(x) = x^{mu+1} sum_j (sigma x)^j / (j! (mu + 1 + j))
  auto primitive = [&](double x) {
    if (x == 0.0) return 0.0;
    double term = 1.0;
    double sum = 0.0;
    for (int j = 0; j < 1000; ++j) {
      if (j > 0) term *= sigma * x / j;
      const double denom = mu + 1.0 + j;
      if (std::abs(denom) < 1e-14) {
        ok = false;
        return 0.0;
      }
      sum += term / denom;
      if (j > std::abs(sigma * x) && std::abs(term / denom) < 1e-17 * std::abs(sum)) break;
    }
    return std::pow(x, mu + 1.0) * sum;
  };
  const double fb = primitive(b);
  const double fa = primitive(a);
  return ok ? fb - fa : 0.0;
}

namespace {

cplx integrate_product(const FuncExpr& f, const FuncExpr& g, double p, IntegrationPath path) {
  require_same_interval(f.interval(), g.interval());
  const Interval iv = f.interval();
  if (f.is_zero() || g.is_zero()) return 0.0;

  double near_zero_exponent = 0.0;
  if (iv.a == 0.0) {
    near_zero_exponent = endpoint_exponent(f, Endpoint::zero).exponent +
                         endpoint_exponent(g, Endpoint::zero).exponent + p;
    if (!(near_zero_exponent > -1.0))
      throw NonIntegrableSingularity(
          "integrand behaves like x^" + std::to_string(near_zero_exponent) + " at 0",
          near_zero_exponent);
  }
  double decay = 0.0;
  if (iv.infinite()) {
    double bf = -kInfinity, bg = -kInfinity;
    for (const auto& t : f.terms()) bf = std::max(bf, t.beta);
    for (const auto& t : g.terms()) bg = std::max(bg, t.beta);
    decay = -(bf + bg);
    if (!(decay > 0.0))
      throw NonIntegrableSingularity("integrand does not decay at infinity", -decay);
  }

  if (path != IntegrationPath::quadrature) {
    cplx total = 0.0;
    bool available = true;
    for (const auto& s : f.terms()) {
      for (const auto& t : g.terms()) {
        const double mu = p + s.alpha + t.alpha;
        if (iv.a == 0.0 && !(mu > -1.0)) {
          // individually divergent pieces that cancel: closed form unusable
          available = false;
          break;
        }
        bool ok = false;
        const double val = power_exp_integral(mu, s.beta + t.beta, iv, ok);
        if (!ok) {
          available = false;
          break;
        }
        total += std::conj(s.c) * t.c * val;
      }
      if (!available) break;
    }
    if (available) return total;
    if (path == IntegrationPath::closed_form)
      throw InvalidInput("no closed form available for this integrand");
  }

  const ComplexIntegrand integrand = [&](double x) {
    return std::pow(x, p) * std::conj(f(x)) * g(x);
  };
  const double s = iv.a == 0.0 ? near_zero_exponent : 0.0;
  if (iv.infinite()) return quadrature_halfline(integrand, iv.a, decay, s).value;
  return quadrature_graded(integrand, iv.a, iv.b, s).value;
}

}  // namespace

double integrate_abs2(const FuncExpr& f, double p, IntegrationPath path) {
  return integrate_product(f, f, p, path).real();
}

cplx inner_product(const FuncExpr& f, const FuncExpr& g, double p, IntegrationPath path) {
  return integrate_product(f, g, p, path);
}

GridFunction::GridFunction(std::vector<double> nodes, std::vector<cplx> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  if (nodes_.size() != values_.size())
    throw InvalidInput("grid function: nodes and values differ in length");
  if (nodes_.empty()) throw InvalidInput("grid function: no nodes");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1]))
      throw InvalidInput("grid function: nodes must be strictly increasing");
}

cplx GridFunction::operator()(double x) const {
  if (x <= nodes_.front()) return values_.front();
  if (x >= nodes_.back()) return values_.back();
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
  const double t = (x - nodes_[i - 1]) / (nodes_[i] - nodes_[i - 1]);
  return (1.0 - t) * values_[i - 1] + t * values_[i];
}

}  // namespace dissext
