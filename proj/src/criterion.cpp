#include "dissext/criterion.hpp"

#include <string>

#include "dissext/errors.hpp"

namespace dissext {

namespace {

const cplx kTwoI(0.0, 2.0);

ComplexMatrix hermitian_part_of_cross(const ComplexMatrix& x, const ComplexMatrix& y,
                                      const ComplexMatrix& ax, const ComplexMatrix& by) {
  // (<x_i, B y_j> - <A x_i, y_j>) / 2i
  return (x.adjoint() * by - ax.adjoint() * y) / kTwoI;
}

}  // namespace

PartialOperator::PartialOperator(ComplexMatrix domain_basis, ComplexMatrix domain_action)
    : basis_(std::move(domain_basis)), action_(std::move(domain_action)) {
  require_finite(basis_, "domain_basis");
  require_finite(action_, "domain_action");
  const auto n = basis_.rows();
  const auto d = basis_.cols();
  if (d < 1) throw InvalidInput("domain must be at least one-dimensional", "domain_basis");
  if (n <= d)
    throw InvalidInput("domain must be a proper subspace (need n > d)", "domain_basis");
  if (action_.rows() != n || action_.cols() != d)
    throw InvalidInput("domain_action must be " + std::to_string(n) + "x" +
                           std::to_string(d),
                       "domain_action");
  const double err = orthonormality_error(basis_);
  if (err > kBasisTolerance)
    throw InvalidInput("domain_basis columns are not orthonormal (error " +
                           std::to_string(err) + ")",
                       "domain_basis");
}

ExtensionSpec::ExtensionSpec(const PartialOperator& op, const ComplexMatrix& complement,
                             const ComplexMatrix& complement_action) {
  require_finite(complement, "complement_basis");
  require_finite(complement_action, "complement_action");
  const auto n = op.ambient_dim();
  const auto k = complement.cols();
  if (k < 1)
    throw InvalidInput("an extension needs a complement of dimension >= 1",
                       "complement_basis");
  if (complement.rows() != n)
    throw InvalidInput("complement_basis must have " + std::to_string(n) + " rows",
                       "complement_basis");
  if (complement_action.rows() != n || complement_action.cols() != k)
    throw InvalidInput("complement_action must match complement_basis shape",
                       "complement_action");
  if (op.domain_dim() + k > n)
    throw InvalidInput("domain plus complement exceed the ambient dimension",
                       "complement_basis");

  const ComplexMatrix& D = op.domain_basis();
  const ComplexMatrix coeffs = D.adjoint() * complement;
  const bool orthogonal = coeffs.size() == 0 || coeffs.cwiseAbs().maxCoeff() <= kBasisTolerance;
  if (orthogonal && orthonormality_error(complement) <= kBasisTolerance) {
    basis_ = complement;
    action_ = complement_action;
    transform_ = ComplexMatrix::Identity(k, k);
    return;
  }

  rebased_ = true;
  const ComplexMatrix w = complement - D * coeffs;
  const ComplexMatrix bw = complement_action - op.domain_action() * coeffs;
  Eigen::HouseholderQR<ComplexMatrix> qr(w);
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, k);
  const ComplexMatrix r = q.adjoint() * w;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double scale = std::max(1.0, complement.col(j).norm());
    if (std::abs(r(j, j)) <= 1e-10 * scale)
      throw InvalidInput("complement_basis column " + std::to_string(j) +
                             " is linearly dependent on the domain or other columns",
                         "complement_basis");
  }
  transform_ = r.triangularView<Eigen::Upper>().solve(ComplexMatrix::Identity(k, k));
  basis_ = w * transform_;
  action_ = bw * transform_;
}

ComplexMatrix assemble_form_matrix(const PartialOperator& op) {
  return imaginary_part(op.domain_basis().adjoint() * op.domain_action());
}

bool check_strict_positivity(const ComplexMatrix& va, double epsilon) {
  return psd_margin(va) >= epsilon;
}

double default_epsilon(const ComplexMatrix& va) {
  const auto dec = decompose_hermitian(va);
  return 1e-6 * dec.eigenvalues.cwiseAbs().maxCoeff();
}

ComplexMatrix CriterionAssembly::criterion_matrix() const {
  ComplexMatrix k = R - 0.25 * (M.adjoint() * M);
  return (k + k.adjoint()) / 2.0;
}

double CriterionAssembly::schur_identity_error() const {
  const ComplexMatrix lhs = 0.25 * (M.adjoint() * M);
  const ComplexMatrix rhs = C.adjoint() * VA.llt().solve(C);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

CriterionAssembly assemble_criterion(const PartialOperator& op, const ExtensionSpec& ext,
                                     std::optional<double> epsilon) {
  if (ext.complement_basis().rows() != op.ambient_dim())
    throw InvalidInput("extension does not match the operator's ambient space");
  CriterionAssembly a;
  a.VA = assemble_form_matrix(op);
  const auto dec = decompose_hermitian(a.VA);
  a.va_spectrum = dec.eigenvalues;
  a.epsilon = epsilon.value_or(1e-6 * dec.eigenvalues.cwiseAbs().maxCoeff());
  if (!(a.epsilon > 0.0)) {
    // VA == 0: no positive epsilon can be met
    throw StrictPositivityViolated(dec.eigenvalues(0), a.epsilon);
  }
  a.VA_inv_sqrt = inv_sqrt_pd(a.VA, a.epsilon);

  const ComplexMatrix& D = op.domain_basis();
  const ComplexMatrix& V = ext.complement_basis();
  const ComplexMatrix& BV = ext.complement_action();
  a.WA = op.domain_action() * a.VA_inv_sqrt;
  a.WA_star = a.WA.adjoint();
  a.M = a.VA_inv_sqrt * (D.adjoint() * BV) - a.WA_star * V;
  a.R = imaginary_part(V.adjoint() * BV);
  a.C = hermitian_part_of_cross(D, V, op.domain_action(), BV);
  return a;
}

ComplexMatrix oracle_gram(const PartialOperator& op, const ExtensionSpec& ext) {
  const auto d = op.domain_dim();
  const auto k = ext.dim();
  ComplexMatrix basis(op.ambient_dim(), d + k);
  basis << op.domain_basis(), ext.complement_basis();
  ComplexMatrix image(op.ambient_dim(), d + k);
  image << op.domain_action(), ext.complement_action();
  return imaginary_part(basis.adjoint() * image);
}

double oracle_check(const PartialOperator& op, const ExtensionSpec& ext) {
  return psd_margin(oracle_gram(op, ext));
}

CheckReport criterion_check(const PartialOperator& op, const ExtensionSpec& ext,
                            std::optional<double> epsilon, std::optional<double> band) {
  const CriterionAssembly a = assemble_criterion(op, ext, epsilon);
  CheckReport rep;
  rep.epsilon_used = a.epsilon;
  rep.va_spectrum = a.va_spectrum;
  rep.m_norm = a.M.norm();
  rep.r_norm = a.R.norm();
  rep.schur_identity_error = a.schur_identity_error();

  const ComplexMatrix quad = 0.25 * (a.M.adjoint() * a.M);
  rep.criterion_margin = psd_margin(a.criterion_matrix());
  rep.band = band.value_or(kBoundaryBand * std::max(a.R.norm(), quad.norm()));
  rep.decision = classify(rep.criterion_margin, rep.band);

  const ComplexMatrix g = oracle_gram(op, ext);
  rep.oracle_margin = psd_margin(g);
  rep.oracle_decision = classify(rep.oracle_margin, band.value_or(default_band(g)));
  rep.agreement = compatible(rep.decision, rep.oracle_decision);
  return rep;
}

ComplexVector minimizing_witness(const PartialOperator& op, const CriterionAssembly& assembly,
                                 const ComplexVector& complement_coords) {
  if (complement_coords.size() != assembly.M.cols())
    throw InvalidInput("witness: coordinate vector has wrong length");
  const ComplexVector g = cplx(0.0, 0.5) * (assembly.M * complement_coords);
  return op.domain_basis() * (assembly.VA_inv_sqrt * g);
}

double form_value(const PartialOperator& op, const ExtensionSpec& ext,
                  const ComplexVector& domain_coords, const ComplexVector& complement_coords) {
  const ComplexVector x =
      op.domain_basis() * domain_coords + ext.complement_basis() * complement_coords;
  const ComplexVector bx =
      op.domain_action() * domain_coords + ext.complement_action() * complement_coords;
  return x.dot(bx).imag();  // Eigen's dot conjugates the first argument
}

}  // namespace dissext
