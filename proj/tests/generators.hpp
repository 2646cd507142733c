#pragma once

// Seeded random generators shared by the property tests.

#include <random>

#include <algorithm>
#include <cmath>

#include "dissext/criterion.hpp"

namespace gen {

using dissext::ComplexMatrix;
using dissext::cplx;

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20241018);
  return engine;
}

inline double uniform(double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng());
}

inline int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng()); }

inline ComplexMatrix gaussian(Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  ComplexMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = cplx(n(rng()), n(rng()));
  return m;
}

inline ComplexMatrix unitary(Eigen::Index n) {
  Eigen::HouseholderQR<ComplexMatrix> qr(gaussian(n, n));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

inline double min_imag_eig(const ComplexMatrix& m) {
  return dissext::psd_margin(dissext::imaginary_part(m));
}

struct Instance {
  ComplexMatrix D, AD, V, BV;
};

/// Random partial operator with VA >= va_floor and a random extension;
/// the scale of BV varies so both decisions occur.
inline Instance instance(Eigen::Index n, Eigen::Index d, Eigen::Index k, double va_floor = 1e-3) {
  const ComplexMatrix q = unitary(n);
  Instance s;
  s.D = q.leftCols(d);
  s.V = q.middleCols(d, k);
  s.AD = gaussian(n, d);
  // shift AD by i t D so that Im-part(D* AD) >= va_floor + something random
  const double lowest = min_imag_eig(s.D.adjoint() * s.AD);
  const double t = std::max(0.0, va_floor - lowest) + uniform(0.0, 1.0);
  s.AD += cplx(0.0, t) * s.D;
  s.BV = gaussian(n, k, std::pow(10.0, uniform(-1.0, 1.0)));
  return s;
}

}  // namespace gen
