#include <doctest.h>

#include <cmath>

#include "dissext/errors.hpp"
#include "dissext/first_order.hpp"
#include "generators.hpp"

using namespace dissext;

namespace {

const Interval U = unit_interval();
const cplx I(0.0, 1.0);

FuncExpr t(cplx c, double alpha, double beta = 0.0) { return FuncExpr::term(U, c, alpha, beta); }

double threshold(double g) { return 8.0 * g * (g + 1.0) / (2.0 * g + 1.0); }

}  // namespace

TEST_CASE("gamma must be positive") {
  CHECK_THROWS_AS(SingularParams(0.0), InvalidInput);
  CHECK_THROWS_AS(SingularParams(-1.0), InvalidInput);
  CHECK_THROWS_AS(SingularParams(std::nan("")), InvalidInput);
}

TEST_CASE("W* membership") {
  SUBCASE("x^gamma: exact cancellation") {
    for (double g : {0.3, 1.0, 4.0}) {
      const auto m = wstar_domain_test(t(1.0, g), SingularParams(g));
      CHECK(m.in_domain);
      CHECK(m.c == cplx(1.0));
      CHECK(m.h.is_zero());
    }
  }
  SUBCASE("constant: out") {
    const auto m = wstar_domain_test(t(1.0, 0.0), SingularParams(1.0));
    CHECK_FALSE(m.in_domain);
    CHECK(m.h_leading == 0.5);
    CHECK(m.h_prime_leading == -0.5);
  }
  SUBCASE("x^gamma e^x: in, for every gamma") {
    for (int trial = 0; trial < 20; ++trial) {
      const double g = gen::uniform(0.05, 10.0);
      const auto m = wstar_domain_test(t(1.0, g, 1.0), SingularParams(g));
      CHECK(m.in_domain);
      CHECK(std::abs(m.c - std::exp(1.0)) < 1e-12);
    }
  }
  SUBCASE("H^1_0 functions are members") {
    CHECK(wstar_domain_test(t(1.0, 1.0) - t(1.0, 2.0), SingularParams(1.0)).in_domain);
  }
  CHECK_THROWS_AS(wstar_domain_test(t(1.0, -0.5), SingularParams(1.0)), DomainViolation);
}

TEST_CASE("H^1_0 membership") {
  CHECK(in_h10(t(1.0, 1.0) - t(1.0, 2.0)));
  CHECK_FALSE(in_h10(t(1.0, 1.0)));
  CHECK_FALSE(in_h10(t(1.0, 0.0) - t(1.0, 1.0)));
  CHECK_FALSE(in_h10(t(1.0, 0.5) - t(1.0, 1.0)));
  CHECK(in_h10(FuncExpr::zero(U)));
}

TEST_CASE("closed-form condition values along l = i c x^gamma") {
  for (double g : {0.3, 0.5, 1.0, 2.0, 5.0}) {
    const SingularParams p(g);
    for (double c : {0.5, 2.0, 9.0}) {
      const auto r = dissipativity_check(t(1.0, g), t(I * c, g), p);
      CHECK(r.lhs == doctest::Approx(c / (2 * g + 1)).epsilon(1e-13));
      CHECK(r.rhs == doctest::Approx(c * c / (8 * g * (g + 1))).epsilon(1e-13));
      CHECK(r.decision == (c < threshold(g) ? Decision::dissipative : Decision::not_dissipative));
    }
  }
  CHECK(threshold(1.0) == doctest::Approx(16.0 / 3.0));
}

TEST_CASE("the W* part vanishes for v = x^gamma") {
  for (int trial = 0; trial < 20; ++trial) {
    const double g = gen::uniform(1e-3, 10.0);
    const SingularParams p(g);
    CHECK(wstar_part(t(1.0, g), p).is_zero());
    const auto r = dissipativity_check(t(1.0, g), FuncExpr::zero(U), p);
    CHECK(r.rhs == 0.0);
    CHECK(r.lhs == 0.0);
    CHECK(r.decision == Decision::boundary);
    DissipativityOptions q;
    q.path = IntegrationPath::quadrature;
    CHECK(dissipativity_check(t(1.0, g), FuncExpr::zero(U), p, q).rhs <= 1e-12);
  }
}

TEST_CASE("symbolic and quadrature paths agree") {
  for (int trial = 0; trial < 30; ++trial) {
    const double g = gen::uniform(0.2, 4.0);
    const SingularParams p(g);
    const FuncExpr v = t(cplx(gen::uniform(0.5, 2), gen::uniform(-1, 1)), g) +
                       t(gen::uniform(-1, 1), g + gen::uniform(0.6, 2.0), gen::uniform(-1, 1));
    const FuncExpr ell = t(cplx(gen::uniform(-2, 2), gen::uniform(-5, 5)), gen::uniform(0.0, 2.0));
    const auto a = dissipativity_check(v, ell, p);
    DissipativityOptions q;
    q.path = IntegrationPath::quadrature;
    const auto b = dissipativity_check(v, ell, p, q);
    CHECK(b.rhs == doctest::Approx(a.rhs).epsilon(1e-8));
    CHECK(a.rhs >= 0.0);
  }
}

TEST_CASE("homogeneity") {
  for (int trial = 0; trial < 20; ++trial) {
    const double g = gen::uniform(0.2, 4.0);
    const SingularParams p(g);
    const FuncExpr v = t(1.0, g) + t(gen::uniform(-1, 1), g + 1.0);
    const FuncExpr ell = t(cplx(gen::uniform(-1, 1), gen::uniform(0, 8)), g);
    const auto a = dissipativity_check(v, ell, p);
    for (double lambda : {0.2, 5.0}) {
      const auto b = dissipativity_check(lambda * v, lambda * ell, p);
      CHECK(b.lhs == doctest::Approx(lambda * lambda * a.lhs).epsilon(1e-10));
      CHECK(b.rhs == doctest::Approx(lambda * lambda * a.rhs).epsilon(1e-10));
      CHECK(b.decision == a.decision);
    }
  }
}

TEST_CASE("errors") {
  const SingularParams p(1.0);
  CHECK_THROWS_AS(dissipativity_check(t(1.0, 0.0), FuncExpr::zero(U), p), NotInWStarDomain);
  CHECK_THROWS_AS(dissipativity_check(t(1.0, 1.0) - t(1.0, 2.0), FuncExpr::zero(U), p),
                  DomainViolation);
  CHECK_THROWS_AS(dissipativity_check(t(1.0, 1.0), t(1.0, -0.5), p), DomainViolation);
  CHECK_THROWS_AS(dissipativity_check(t(1.0, 1.0), FuncExpr::zero(half_line()), p), InvalidInput);
}

TEST_CASE("extension descriptors") {
  const SingularParams p(1.0);
  const auto b = build_extension(t(1.0, 1.0), FuncExpr::zero(U), p);
  CHECK(b.boundary);
  CHECK(b.defect_dimension == 1);
  CHECK(b.added_dimension == 1);
  const auto d = build_extension(t(1.0, 1.0), t(5.0 * I, 1.0), p);
  CHECK_FALSE(d.boundary);
  CHECK(d.report.decision == Decision::dissipative);
  CHECK_THROWS_AS(build_extension(t(1.0, 1.0), t(6.0 * I, 1.0), p), ConditionFailed);
}

TEST_CASE("defect kernel") {
  for (double g : {1.0, 0.5}) {
    const SingularParams p(g);
    const FuncExpr k = defect_kernel(p);
    CHECK((k - t(1.0, g, 1.0)).is_zero());
    CHECK(defect_residual(k, p).is_zero());
  }
  for (int trial = 0; trial < 20; ++trial) {
    const SingularParams p(gen::uniform(1e-3, 10.0));
    CHECK(defect_residual(defect_kernel(p), p).is_zero());
    // anything else leaves a residual
    CHECK_FALSE(defect_residual(t(1.0, p.gamma(), 2.0), p).is_zero());
  }
}
