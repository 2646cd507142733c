#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace dissext {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule, nodes by Newton iteration on the Legendre recurrence.
GaussLegendreRule gauss_legendre(int n);

using RealIntegrand = std::function<double(double)>;
using ComplexIntegrand = std::function<std::complex<double>(double)>;

struct QuadratureOptions {
  int order = 20;                // Gauss points per panel
  double ratio = 0.5;            // geometric grading ratio toward the singular end
  double tail_tolerance = 1e-12; // absolute bound on the unresolved end piece
  double relative_tolerance = 1e-9;
  double absolute_tolerance = 1e-12;
  int max_depth = 1000;
};

struct QuadratureResult {
  std::complex<double> value;
  double error_estimate = 0.0;  // |difference between two refinement levels|
  int depth = 0;                // number of graded panels
  double truncation = 0.0;      // half-line cutoff, 0 for finite intervals
};

/// Composite Gauss-Legendre on [a, b] with panels shrinking geometrically
/// toward a, where the integrand behaves like (x - a)^singular_exponent
/// (exponent > -1). The unresolved piece [a, a + delta] is replaced by its
/// power-law extrapolation and delta is pushed below tail_tolerance. The
/// result is accepted once two panel refinements agree to the relative
/// tolerance; otherwise ToleranceNotMet.
QuadratureResult quadrature_graded(const ComplexIntegrand& f, double a, double b,
                                   double singular_exponent,
                                   const QuadratureOptions& opt = {});

double quadrature_graded(const RealIntegrand& f, double a, double b,
                         double singular_exponent, const QuadratureOptions& opt = {});

/// Integral over [a, inf) of an integrand decaying at least like
/// exp(-decay_rate x) (times a power). Truncated at L with the analytic
/// exponential tail bound below tail_tolerance.
QuadratureResult quadrature_halfline(const ComplexIntegrand& f, double a, double decay_rate,
                                     double singular_exponent,
                                     const QuadratureOptions& opt = {});

}  // namespace dissext
