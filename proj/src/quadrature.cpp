#include "dissext/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "dissext/errors.hpp"

namespace dissext {

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw InvalidInput("gauss_legendre: need n >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

namespace {

const GaussLegendreRule& cached_rule(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
  return it->second;
}

std::complex<double> panel_sum(const ComplexIntegrand& f, double lo, double hi, int split,
                               const GaussLegendreRule& rule) {
  std::complex<double> total = 0.0;
  const double width = (hi - lo) / split;
  for (int s = 0; s < split; ++s) {
    const double a = lo + s * width;
    const double half = width / 2.0;
    const double mid = a + half;
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    total += half * acc;
  }
  return total;
}

bool within(std::complex<double> q1, std::complex<double> q2, const QuadratureOptions& opt) {
  return std::abs(q1 - q2) <= std::max(opt.relative_tolerance * std::abs(q2),
                                       opt.absolute_tolerance);
}

}  // namespace

QuadratureResult quadrature_graded(const ComplexIntegrand& f, double a, double b,
                                   double singular_exponent, const QuadratureOptions& opt) {
  if (!(b > a)) throw InvalidInput("quadrature_graded: need b > a");
  if (!(singular_exponent > -1.0))
    throw NonIntegrableSingularity("quadrature_graded: endpoint exponent must exceed -1",
                                   singular_exponent);
  if (!(opt.ratio > 0.0 && opt.ratio < 1.0))
    throw InvalidInput("quadrature_graded: grading ratio must lie in (0, 1)");

  // panel breakpoints t_0 = b > t_1 > ... > t_depth > a
  std::vector<double> breaks{b};
  double tail = 0.0;
  for (int j = 1; j <= opt.max_depth; ++j) {
    const double t = a + (b - a) * std::pow(opt.ratio, j);
    if (!(t > a)) break;
    breaks.push_back(t);
    tail = std::abs(f(t)) * (t - a) / (singular_exponent + 1.0);
    if (j >= 4 && tail < opt.tail_tolerance) break;
  }
  const double inner = breaks.back();
  const auto tail_piece = f(inner) * (inner - a) / (singular_exponent + 1.0);

  const auto& rule = cached_rule(opt.order);
  auto sum_at = [&](int split) {
    std::complex<double> q = tail_piece;
    for (std::size_t j = 0; j + 1 < breaks.size(); ++j)
      q += panel_sum(f, breaks[j + 1], breaks[j], split, rule);
    return q;
  };

  auto coarse = sum_at(1);
  for (int split = 2; split <= 64; split *= 2) {
    const auto fine = sum_at(split);
    if (within(coarse, fine, opt))
      return {fine, std::abs(fine - coarse), static_cast<int>(breaks.size()) - 1, 0.0};
    coarse = fine;
  }
  throw ToleranceNotMet("quadrature_graded: refinement did not converge",
                        std::abs(coarse - sum_at(32)));
}

double quadrature_graded(const RealIntegrand& f, double a, double b, double singular_exponent,
                         const QuadratureOptions& opt) {
  const ComplexIntegrand g = [&f](double x) { return std::complex<double>(f(x), 0.0); };
  return quadrature_graded(g, a, b, singular_exponent, opt).value.real();
}

QuadratureResult quadrature_halfline(const ComplexIntegrand& f, double a, double decay_rate,
                                     double singular_exponent, const QuadratureOptions& opt) {
  if (!(decay_rate > 0.0))
    throw NonIntegrableSingularity("quadrature_halfline: integrand must decay exponentially",
                                   decay_rate);
  QuadratureResult head = quadrature_graded(f, a, a + 1.0, singular_exponent, opt);

  double L = a + 1.0 + 40.0 / decay_rate;
  while (std::abs(f(L)) / decay_rate > 0.1 * opt.tail_tolerance && L < 1e6)
    L = a + 2.0 * (L - a);
  const double tail_bound = std::abs(f(L)) / decay_rate;
  if (tail_bound > opt.tail_tolerance)
    throw ToleranceNotMet("quadrature_halfline: tail does not decay below tolerance", tail_bound);

  const double width = std::min(1.0, 2.0 / decay_rate);
  const int panels = static_cast<int>(std::ceil((L - a - 1.0) / width));
  const double step = (L - a - 1.0) / panels;
  const auto& rule = cached_rule(opt.order);
  auto sum_at = [&](int split) {
    std::complex<double> q = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double lo = a + 1.0 + p * step;
      q += panel_sum(f, lo, lo + step, split, rule);
    }
    return q;
  };
  auto coarse = sum_at(1);
  for (int split = 2; split <= 32; split *= 2) {
    const auto fine = sum_at(split);
    if (within(coarse, fine, opt)) {
      head.value += fine;
      head.error_estimate += std::abs(fine - coarse) + tail_bound;
      head.truncation = L;
      return head;
    }
    coarse = fine;
  }
  throw ToleranceNotMet("quadrature_halfline: refinement did not converge", 0.0);
}

}  // namespace dissext
