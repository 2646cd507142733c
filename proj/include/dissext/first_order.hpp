#pragma once

// Maximal dissipative extensions of A = i d/dx + i gamma/x on L^2(0, 1),
// D(A) = H^1_0(0, 1), gamma > 0. The imaginary part is multiplication by
// gamma/x, and an extension adding span{v} with v -> l is dissipative iff
// v lies in D(W*) = {v : sqrt(x) v in H^1_0 + span{x^(gamma+1/2)}} and
//
//   Im<v, l> >= 1/4 int_0^1 | sqrt(x/gamma) l - i (sqrt(x/gamma) v)'
//                             + i (2 gamma + 1)/(2 sqrt(gamma x)) v |^2 dx.

#include <array>
#include <string>

#include "dissext/decision.hpp"
#include "dissext/funcexpr.hpp"

namespace dissext {

class SingularParams {
 public:
  explicit SingularParams(double gamma);
  double gamma() const { return gamma_; }

 private:
  double gamma_;
};

struct WStarMembership {
  bool in_domain = false;
  cplx c{};               // coefficient of x^(gamma+1/2) in sqrt(x) v; equals v(1)
  bool h_H10_ok = false;  // h = sqrt(x) v - c x^(gamma+1/2) lies in H^1_0(0, 1)
  FuncExpr h;
  double v_leading = 0.0;        // leading exponent of v at 0
  double h_leading = 0.0;        // leading exponent of h at 0 (inf if h = 0)
  double h_prime_leading = 0.0;  // leading exponent of h' at 0
  cplx v_at_one{};
  std::string reason;
};

/// Symbolic membership test for D(W*). v must be in L^2(0, 1)
/// (DomainViolation otherwise); out-of-domain is reported, not thrown.
WStarMembership wstar_domain_test(const FuncExpr& v, const SingularParams& p);

/// v in H^1_0(0, 1): v(0+) = 0, v(1) = 0, v' in L^2.
bool in_h10(const FuncExpr& v);

/// -(W* v) = -i (sqrt(x/gamma) v)' + i (2 gamma + 1)/(2 sqrt(gamma x)) v,
/// assembled and merged symbolically.
FuncExpr wstar_part(const FuncExpr& v, const SingularParams& p);

/// The three summands of the condition integrand, unmerged:
/// sqrt(x/gamma) l, -i (sqrt(x/gamma) v)', i (2 gamma + 1)/(2 sqrt(gamma x)) v.
std::array<FuncExpr, 3> condition_pieces(const FuncExpr& v, const FuncExpr& ell,
                                         const SingularParams& p);

struct DissipativityOptions {
  IntegrationPath path = IntegrationPath::automatic;
  double relative_band = 1e-9;
};

struct DissipativityReport {
  double lhs = 0.0;  // Im<v, l>
  double rhs = 0.0;  // 1/4 int |...|^2
  double margin = 0.0;
  double band = 0.0;
  Decision decision = Decision::boundary;
  WStarMembership membership;
  IntegrationPath path_used = IntegrationPath::automatic;
};

/// Throws NotInWStarDomain if v is outside D(W*), DomainViolation if v is
/// in H^1_0 (no extension) or l is outside L^2, NonIntegrableSingularity
/// if the right side diverges. The symbolic path merges the pieces before
/// integrating; the quadrature path sums them pointwise and integrates on
/// a mesh graded toward 0.
DissipativityReport dissipativity_check(const FuncExpr& v, const FuncExpr& ell,
                                        const SingularParams& p,
                                        const DissipativityOptions& opt = {});

/// A_{v,l}: D = H^1_0(0, 1) + span{v}, f + t v -> A f + t l.
struct ExtensionDescriptor {
  double gamma = 0.0;
  FuncExpr v;
  FuncExpr ell;
  DissipativityReport report;
  bool boundary = false;       // equality case of the condition
  int added_dimension = 1;     // dim D(B)/D(A)
  int defect_dimension = 1;    // dim ker(A* - i)
  bool maximal = true;
  std::string domain;
};

/// Throws ConditionFailed when the condition does not hold.
ExtensionDescriptor build_extension(const FuncExpr& v, const FuncExpr& ell,
                                    const SingularParams& p);

/// x^gamma e^x, spanning ker(A* - i).
FuncExpr defect_kernel(const SingularParams& p);

/// (A* - i) k = i k' - i (gamma/x) k - i k, merged symbolically.
FuncExpr defect_residual(const FuncExpr& k, const SingularParams& p);

}  // namespace dissext
