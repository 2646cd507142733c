#include "dissext/linalg.hpp"

#include <string>

#include "dissext/errors.hpp"

namespace dissext {

void require_finite(const ComplexMatrix& m, std::string_view what) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        throw InvalidInput(std::string(what) + ": non-finite entry at (" +
                               std::to_string(i) + "," + std::to_string(j) + ")",
                           std::string(what));
}

void require_square(const ComplexMatrix& m, std::string_view what) {
  if (m.rows() != m.cols())
    throw InvalidInput(std::string(what) + ": expected a square matrix, got " +
                           std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()),
                       std::string(what));
}

ComplexMatrix imaginary_part(const ComplexMatrix& b) {
  require_square(b, "imaginary_part");
  const cplx two_i(0.0, 2.0);
  ComplexMatrix h = (b - b.adjoint()) / two_i;
  // exact Hermitian symmetry: mirror the strict upper triangle
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    h(j, j) = cplx(h(j, j).real(), 0.0);
    for (Eigen::Index i = j + 1; i < h.rows(); ++i) h(i, j) = std::conj(h(j, i));
  }
  return h;
}

double hermitian_deviation(const ComplexMatrix& h) {
  require_square(h, "hermitian_deviation");
  return (h - h.adjoint()).norm() / std::max(1.0, h.norm());
}

HermitianDecomposition decompose_hermitian(const ComplexMatrix& h) {
  require_square(h, "decompose_hermitian");
  require_finite(h, "decompose_hermitian");
  const double dev = hermitian_deviation(h);
  if (dev > kHermitianTolerance)
    throw NonHermitian("matrix is not Hermitian (relative deviation " +
                           std::to_string(dev) + ")",
                       dev);
  const ComplexMatrix sym = (h + h.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("Hermitian eigensolver did not converge", 0.0);
  return {es.eigenvalues(), es.eigenvectors(), dev};
}

double psd_margin(const ComplexMatrix& h) {
  if (h.size() == 0) throw InvalidInput("psd_margin: empty matrix");
  const ComplexMatrix sym = (h + h.adjoint()) / 2.0;
  const double dev = hermitian_deviation(h);
  if (dev > kHermitianTolerance)
    throw NonHermitian("psd_margin: matrix is not Hermitian", dev);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double default_band(const ComplexMatrix& h) { return kBoundaryBand * h.norm(); }

ComplexMatrix inv_sqrt_pd(const ComplexMatrix& h, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidInput("inv_sqrt_pd: epsilon must be > 0");
  const auto dec = decompose_hermitian(h);
  const double lo = dec.eigenvalues(0);
  if (lo < epsilon) throw StrictPositivityViolated(lo, epsilon);
  const RealVector s = dec.eigenvalues.array().rsqrt();
  ComplexMatrix r = dec.eigenvectors * s.cast<cplx>().asDiagonal() *
                    dec.eigenvectors.adjoint();
  return (r + r.adjoint()) / 2.0;
}

double orthonormality_error(const ComplexMatrix& q) {
  if (q.cols() == 0) return 0.0;
  const ComplexMatrix g = q.adjoint() * q;
  return (g - ComplexMatrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

}  // namespace dissext
