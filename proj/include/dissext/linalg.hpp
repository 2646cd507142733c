#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string_view>

#include "dissext/decision.hpp"

namespace dissext {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Relative Hermiticity tolerance applied before any eigendecomposition.
inline constexpr double kHermitianTolerance = 1e-12;
/// Relative width of the boundary band around a zero margin.
inline constexpr double kBoundaryBand = 1e-9;

/// Throws InvalidInput if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, std::string_view what);

/// Throws InvalidInput if m is not square.
void require_square(const ComplexMatrix& m, std::string_view what);

/// (B - B*) / (2i): the Hermitian matrix of f -> Im<f, Bf>.
ComplexMatrix imaginary_part(const ComplexMatrix& b);

/// ||H - H*||_F / max(1, ||H||_F).
double hermitian_deviation(const ComplexMatrix& h);

struct HermitianDecomposition {
  RealVector eigenvalues;       // ascending
  ComplexMatrix eigenvectors;   // unitary, columns match eigenvalues
  double symmetrization_deviation = 0.0;
};

/// Symmetrizes H <- (H + H*)/2 and diagonalizes it. The removed
/// anti-Hermitian part is reported, and must stay below
/// kHermitianTolerance (else NonHermitian).
HermitianDecomposition decompose_hermitian(const ComplexMatrix& h);

/// Smallest eigenvalue of a Hermitian matrix.
double psd_margin(const ComplexMatrix& h);

/// Default boundary band for decisions on H: kBoundaryBand * ||H||_F.
double default_band(const ComplexMatrix& h);

/// H^{-1/2} for Hermitian H with min eigenvalue >= epsilon
/// (StrictPositivityViolated otherwise).
ComplexMatrix inv_sqrt_pd(const ComplexMatrix& h, double epsilon);

/// Orthonormality defect max(||Q*Q - I||_max).
double orthonormality_error(const ComplexMatrix& q);

}  // namespace dissext
