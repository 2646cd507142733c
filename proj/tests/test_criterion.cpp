#include <doctest.h>

#include "dissext/criterion.hpp"
#include "dissext/errors.hpp"
#include "generators.hpp"

using namespace dissext;

namespace {

const cplx I(0.0, 1.0);

ComplexMatrix col(std::initializer_list<cplx> v) {
  ComplexMatrix m(v.size(), 1);
  Eigen::Index i = 0;
  for (cplx x : v) m(i++, 0) = x;
  return m;
}

// n = 2, D = e1, A e1 = i e1, V = e2, B e2 = bv.
struct TwoByTwo {
  PartialOperator op{col({1, 0}), col({I, 0})};
  ExtensionSpec ext;
  explicit TwoByTwo(ComplexMatrix bv) : ext(op, col({0, 1}), bv) {}
};

}  // namespace

TEST_CASE("form matrix examples") {
  CHECK(assemble_form_matrix(PartialOperator(col({1, 0}), col({I, 0})))(0, 0) == cplx(1.0));
  CHECK(std::abs(assemble_form_matrix(PartialOperator(col({1, 0}), col({0, 1})))(0, 0)) == 0.0);
}

TEST_CASE("form matrix matches direct inner products") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = gen::instance(6, 3, 1);
    const PartialOperator op(s.D, s.AD);
    const ComplexMatrix va = assemble_form_matrix(op);
    for (int k = 0; k < 10; ++k) {
      const ComplexVector c = gen::gaussian(3, 1);
      const ComplexVector f = s.D * c;
      const ComplexVector af = s.AD * c;
      CHECK(std::abs(c.dot(va * c).real() - f.dot(af).imag()) < 1e-10);
    }
  }
}

TEST_CASE("strict positivity") {
  CHECK(check_strict_positivity(ComplexMatrix::Identity(2, 2), 0.5));
  CHECK_FALSE(check_strict_positivity(ComplexMatrix::Zero(1, 1), 1e-3));
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1e-4;
  d(1, 1) = 1.0;
  CHECK_FALSE(check_strict_positivity(d, 1e-3));
}

TEST_CASE("hand-computed assemblies") {
  SUBCASE("B e2 = i e2: no cross terms") {
    TwoByTwo t(col({0, I}));
    const auto a = assemble_criterion(t.op, t.ext);
    CHECK(a.VA(0, 0) == cplx(1.0));
    CHECK(std::abs(a.WA(0, 0) - I) < 1e-15);
    CHECK(std::abs(a.WA(1, 0)) < 1e-15);
    CHECK(std::abs(a.M(0, 0)) < 1e-15);
    CHECK(std::abs(a.R(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(a.C(0, 0)) < 1e-15);
    CHECK(criterion_check(t.op, t.ext).decision == Decision::dissipative);
    CHECK(oracle_check(t.op, t.ext) == doctest::Approx(1.0));
  }
  SUBCASE("B e2 = e1 + i e2: margin 3/4") {
    TwoByTwo t(col({1, I}));
    const auto a = assemble_criterion(t.op, t.ext);
    CHECK(std::abs(std::abs(a.M(0, 0)) - 1.0) < 1e-15);
    CHECK(std::abs(a.R(0, 0) - 1.0) < 1e-15);
    const auto r = criterion_check(t.op, t.ext);
    CHECK(r.decision == Decision::dissipative);
    CHECK(r.criterion_margin == doctest::Approx(0.75));
    // the minimizing witness attains the criterion value
    const ComplexVector v = ComplexVector::Ones(1);
    const ComplexVector f = minimizing_witness(t.op, a, v);
    const ComplexVector dc = t.op.domain_basis().adjoint() * f;
    CHECK(form_value(t.op, t.ext, dc, v) == doctest::Approx(0.75));
  }
  SUBCASE("B e2 = 10 e1: fails") {
    TwoByTwo t(col({10, 0}));
    const auto a = assemble_criterion(t.op, t.ext);
    CHECK(std::abs(a.M(0, 0)) == doctest::Approx(10.0));
    CHECK(std::abs(a.R(0, 0)) < 1e-15);
    const auto r = criterion_check(t.op, t.ext);
    CHECK(r.decision == Decision::not_dissipative);
    CHECK(r.criterion_margin == doctest::Approx(-25.0));
    ComplexMatrix g(2, 2);
    g << 1.0, -5.0 * I, 5.0 * I, 0.0;
    CHECK((oracle_gram(t.op, t.ext) - g).norm() < 1e-14);
    CHECK(oracle_check(t.op, t.ext) == doctest::Approx((1.0 - std::sqrt(101.0)) / 2.0));
  }
}

TEST_CASE("iI on C^2 gives the identity Gram matrix") {
  TwoByTwo t(col({0, I}));
  CHECK((oracle_gram(t.op, t.ext) - ComplexMatrix::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("real symmetric B has zero oracle margin") {
  Eigen::MatrixXd b = Eigen::MatrixXd::Random(4, 4);
  b = (b + b.transpose()).eval();
  const ComplexMatrix q = ComplexMatrix::Identity(4, 4);
  const PartialOperator op(q.leftCols(2), b.cast<cplx>() * q.leftCols(2));
  const ExtensionSpec ext(op, q.rightCols(2), b.cast<cplx>() * q.rightCols(2));
  CHECK(std::abs(oracle_check(op, ext)) < 1e-14);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(PartialOperator(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)),
                  InvalidInput);
  CHECK_THROWS_AS(PartialOperator(2.0 * col({1, 0}), col({I, 0})), InvalidInput);
  const PartialOperator op(col({1, 0}), col({I, 0}));
  CHECK_THROWS_AS(ExtensionSpec(op, ComplexMatrix(2, 0), ComplexMatrix(2, 0)), InvalidInput);
  CHECK_THROWS_AS(ExtensionSpec(op, col({1, 0}), col({0, 0})), InvalidInput);
  // VA = 0: the criterion does not apply
  const PartialOperator flat(col({1, 0}), col({0, 1}));
  const ExtensionSpec ext(flat, col({0, 1}), col({0, I}));
  CHECK_THROWS_AS(assemble_criterion(flat, ext), StrictPositivityViolated);
}

TEST_CASE("random instances: criterion agrees with oracle, Schur identity holds") {
  int compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = gen::integer(2, 8);
    const auto d = gen::integer(1, n - 1);
    const auto k = gen::integer(1, n - d);
    const auto s = gen::instance(n, d, k);
    const PartialOperator op(s.D, s.AD);
    const ExtensionSpec ext(op, s.V, s.BV);
    const auto r = criterion_check(op, ext, 1e-3);
    CHECK(r.schur_identity_error <= 1e-8);
    if (std::abs(r.criterion_margin) > 1e-7 && std::abs(r.oracle_margin) > 1e-7) {
      ++compared;
      CHECK((r.criterion_margin > 0) == (r.oracle_margin > 0));
    }
  }
  CHECK(compared > 250);
}

TEST_CASE("unitary re-basis of the complement leaves the decision unchanged") {
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = gen::instance(7, 3, 3);
    const PartialOperator op(s.D, s.AD);
    const ComplexMatrix u = gen::unitary(3);
    const auto a = criterion_check(op, ExtensionSpec(op, s.V, s.BV), 1e-3);
    const auto b = criterion_check(op, ExtensionSpec(op, s.V * u, s.BV * u), 1e-3);
    CHECK(a.decision == b.decision);
    CHECK(a.criterion_margin == doctest::Approx(b.criterion_margin).epsilon(1e-9));
  }
}

TEST_CASE("non-orthogonal complements are re-based without changing the decision") {
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = gen::instance(6, 2, 2);
    const PartialOperator op(s.D, s.AD);
    const ComplexMatrix mix = gen::gaussian(2, 2);
    // V' = V G + D H, B V' = B V G + A D H
    const ComplexMatrix g = gen::gaussian(2, 2) + 3.0 * ComplexMatrix::Identity(2, 2);
    const ExtensionSpec plain(op, s.V, s.BV);
    const ExtensionSpec skew(op, s.V * g + s.D * mix, s.BV * g + s.AD * mix);
    CHECK(skew.was_rebased());
    CHECK(orthonormality_error(skew.complement_basis()) < 1e-12);
    CHECK((s.D.adjoint() * skew.complement_basis()).norm() < 1e-12);
    const double a = oracle_check(op, plain), b = oracle_check(op, skew);
    if (std::abs(a) > 1e-7 && std::abs(b) > 1e-7) CHECK((a > 0) == (b > 0));
    const auto ca = criterion_check(op, plain, 1e-3), cb = criterion_check(op, skew, 1e-3);
    if (std::abs(ca.criterion_margin) > 1e-7) CHECK(ca.decision == cb.decision);
  }
}

TEST_CASE("scaling the extension action follows lambda R - lambda^2 M*M/4") {
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = gen::instance(5, 2, 1);
    const PartialOperator op(s.D, s.AD);
    const auto base = assemble_criterion(op, ExtensionSpec(op, s.V, s.BV), 1e-3);
    for (double lambda : {0.1, 0.5, 2.0, 7.0}) {
      const ExtensionSpec ext(op, s.V, lambda * s.BV);
      const auto a = assemble_criterion(op, ext, 1e-3);
      // only the B-dependent parts scale; M has a B-free piece
      const ComplexMatrix k = a.criterion_matrix();
      CHECK((a.R - lambda * base.R).norm() < 1e-10 * std::max(1.0, lambda));
      const double margin = psd_margin(k);
      const double oracle = oracle_check(op, ext);
      if (std::abs(margin) > 1e-7 && std::abs(oracle) > 1e-7)
        CHECK((margin > 0) == (oracle > 0));
    }
  }
}

TEST_CASE("the witness minimizes the full form") {
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = gen::instance(6, 3, 2);
    const PartialOperator op(s.D, s.AD);
    const ExtensionSpec ext(op, s.V, s.BV);
    const auto a = assemble_criterion(op, ext, 1e-3);
    const ComplexVector v = gen::gaussian(2, 1);
    const ComplexVector f = minimizing_witness(op, a, v);
    const ComplexVector dc = s.D.adjoint() * f;
    const double best = form_value(op, ext, dc, v);
    CHECK(best == doctest::Approx(v.dot(a.criterion_matrix() * v).real()).epsilon(1e-8));
    for (int probe = 0; probe < 50; ++probe) {
      const ComplexVector other = dc + gen::gaussian(3, 1, gen::uniform(1e-3, 1.0));
      CHECK(form_value(op, ext, other, v) >= best - 1e-9);
    }
  }
}

TEST_CASE("zero M gives a zero witness") {
  TwoByTwo t(col({0, I}));
  const auto a = assemble_criterion(t.op, t.ext);
  CHECK(minimizing_witness(t.op, a, ComplexVector::Ones(1)).norm() < 1e-15);
}
