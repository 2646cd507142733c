#pragma once

// Finite-dimensional extension criterion.
//
// A dissipative operator A is given on a proper subspace D of C^n by an
// orthonormal domain basis and its images. An extension B adds a complement
// subspace V together with B's action on it. B is dissipative on D + V iff
//
//   K = R - 1/4 M* M  is positive semidefinite,
//
// where, with VA the matrix of the form f -> Im<f, Af> on D,
//   WA  = A VA^{-1/2}                       (n x d)
//   M   = VA^{-1/2} D* BV - WA* V           (d x k)
//   R   = (V* BV - BV* V) / 2i              (k x k)
// provided VA >= epsilon > 0. The same decision is available from the raw
// Gram matrix of f -> Im<f, Bf> on D + V (oracle_check), and the two are
// tied by 1/4 M* M = C* VA^{-1} C, C being the cross block of that Gram
// matrix.

#include <optional>

#include "dissext/decision.hpp"
#include "dissext/linalg.hpp"

namespace dissext {

/// Tolerance on orthonormality / orthogonality invariants of the bases.
inline constexpr double kBasisTolerance = 1e-10;

/// A linear map defined on a proper subspace of C^n.
class PartialOperator {
 public:
  /// domain_basis: n x d with orthonormal columns; domain_action: n x d,
  /// column j is A applied to basis vector j. Requires 1 <= d < n.
  PartialOperator(ComplexMatrix domain_basis, ComplexMatrix domain_action);

  Eigen::Index ambient_dim() const { return basis_.rows(); }
  Eigen::Index domain_dim() const { return basis_.cols(); }
  const ComplexMatrix& domain_basis() const { return basis_; }
  const ComplexMatrix& domain_action() const { return action_; }

 private:
  ComplexMatrix basis_;
  ComplexMatrix action_;
};

/// Complement subspace and the extension's action on it, normalized to an
/// orthonormal basis orthogonal to the domain.
class ExtensionSpec {
 public:
  /// Accepts any complement whose span meets the domain trivially. The
  /// basis is re-based onto the orthogonal complement of the domain: a
  /// column v = Dc + w becomes w with Bw = Bv - A(Dc), then orthonormalized.
  ExtensionSpec(const PartialOperator& op, const ComplexMatrix& complement,
                const ComplexMatrix& complement_action);

  Eigen::Index dim() const { return basis_.cols(); }
  const ComplexMatrix& complement_basis() const { return basis_; }
  const ComplexMatrix& complement_action() const { return action_; }
  /// k x k matrix T with (re-based basis) = (projected input basis) * T;
  /// maps coordinates in the re-based basis back to input coordinates.
  const ComplexMatrix& rebase_transform() const { return transform_; }
  /// True when the input was already orthonormal and orthogonal to D.
  bool was_rebased() const { return rebased_; }

 private:
  ComplexMatrix basis_;
  ComplexMatrix action_;
  ComplexMatrix transform_;
  bool rebased_ = false;
};

/// d x d matrix of q_A on the domain:
/// (VA)_ij = (<d_i, A d_j> - <A d_i, d_j>) / 2i.
ComplexMatrix assemble_form_matrix(const PartialOperator& op);

/// min eig(VA) >= epsilon.
bool check_strict_positivity(const ComplexMatrix& va, double epsilon);

/// 1e-6 * ||VA||_2.
double default_epsilon(const ComplexMatrix& va);

struct CriterionAssembly {
  ComplexMatrix VA;
  ComplexMatrix VA_inv_sqrt;
  ComplexMatrix WA;       // n x d
  ComplexMatrix WA_star;  // d x n
  ComplexMatrix M;        // d x k
  ComplexMatrix R;        // k x k
  ComplexMatrix C;        // d x k
  RealVector va_spectrum;
  double epsilon = 0.0;

  /// R - 1/4 M* M.
  ComplexMatrix criterion_matrix() const;
  /// max |1/4 M*M - C* VA^{-1} C| entrywise.
  double schur_identity_error() const;
};

/// Throws StrictPositivityViolated when min eig(VA) < epsilon. epsilon
/// defaults to default_epsilon(VA).
CriterionAssembly assemble_criterion(const PartialOperator& op,
                                     const ExtensionSpec& ext,
                                     std::optional<double> epsilon = {});

struct CheckReport {
  Decision decision = Decision::boundary;
  double criterion_margin = 0.0;  // min eig of R - 1/4 M* M
  double oracle_margin = 0.0;     // min eig of the full Gram matrix
  Decision oracle_decision = Decision::boundary;
  double epsilon_used = 0.0;
  double band = 0.0;
  bool agreement = true;
  RealVector va_spectrum;
  double m_norm = 0.0;
  double r_norm = 0.0;
  double schur_identity_error = 0.0;
};

/// Criterion decision with the oracle computed alongside. band defaults to
/// kBoundaryBand * max(||R||, ||1/4 M*M||) for the criterion and
/// default_band(G) for the oracle.
CheckReport criterion_check(const PartialOperator& op, const ExtensionSpec& ext,
                            std::optional<double> epsilon = {},
                            std::optional<double> band = {});

/// (d+k) x (d+k) Gram matrix of f -> Im<f, Bf> in the basis [D V].
ComplexMatrix oracle_gram(const PartialOperator& op, const ExtensionSpec& ext);

/// min eig of oracle_gram: B dissipative iff >= 0. Needs no positivity
/// hypothesis.
double oracle_check(const PartialOperator& op, const ExtensionSpec& ext);

/// The f in the domain minimizing Im<f + v, B(f + v)> for v = V * coords,
/// returned as an ambient vector: f = D VA^{-1/2} g with g = (i/2) M coords.
ComplexVector minimizing_witness(const PartialOperator& op,
                                 const CriterionAssembly& assembly,
                                 const ComplexVector& complement_coords);

/// Im<x, Bx> for x = D * domain_coords + V * complement_coords.
double form_value(const PartialOperator& op, const ExtensionSpec& ext,
                  const ComplexVector& domain_coords,
                  const ComplexVector& complement_coords);

}  // namespace dissext
