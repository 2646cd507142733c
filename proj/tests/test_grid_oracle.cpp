#include <doctest.h>

#include <cmath>

#include "dissext/errors.hpp"
#include "dissext/grid_oracle.hpp"
#include "dissext/quadrature.hpp"
#include "generators.hpp"

using namespace dissext;

namespace {

const Interval U = unit_interval();
const cplx I(0.0, 1.0);

FuncExpr t(cplx c, double alpha, double beta = 0.0) { return FuncExpr::term(U, c, alpha, beta); }

// smooth bump supported in [a, b]
double bump(double x, double a, double b) {
  if (x <= a || x >= b) return 0.0;
  const double s = (x - a) / (b - a);
  return std::exp(-1.0 / (s * (1.0 - s)));
}

}  // namespace

TEST_CASE("meshes") {
  const Mesh m = Mesh::graded(0.0, 1.0, 8, 5);
  CHECK(m.nodes().front() == 0.0);
  CHECK(m.nodes().back() == 1.0);
  CHECK(m.cells() == 13);
  for (std::size_t i = 1; i < m.nodes().size(); ++i) CHECK(m.nodes()[i] > m.nodes()[i - 1]);
  CHECK(m.nodes()[1] == doctest::Approx(0.125 / 32.0));
  CHECK_THROWS_AS(Mesh::uniform(1.0, 0.0, 4), InvalidInput);
  CHECK_THROWS_AS(Mesh::graded(0.0, 1.0, 4, 3, 1.5), InvalidInput);
}

TEST_CASE("discrete form converges to gamma int |f|^2 / x at first order") {
  const double g = 1.0;
  auto f = [](double x) { return bump(x, 0.1, 0.9); };
  // exact value by fine quadrature of the smooth integrand
  const double exact =
      g * quadrature_graded(RealIntegrand([&](double x) { return f(x) * f(x) / x; }), 0.1, 0.9, 0.0);
  std::vector<double> errors;
  for (int cells : {200, 400, 800}) {
    const auto op = discretize_first_order(g, Mesh::graded(0.0, 1.0, cells, 10));
    ComplexVector c(op.cols());
    for (Eigen::Index k = 0; k < op.cols(); ++k) c(k) = op.sample(f)(op.domain_rows[k]);
    errors.push_back(std::abs(discrete_form(op, c) - exact));
  }
  CHECK(errors[0] < 5e-2);
  CHECK(errors[1] / errors[2] == doctest::Approx(2.0).epsilon(0.15));
  CHECK(errors[0] / errors[1] == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("support away from the singular end: plain backward differences") {
  const auto op = discretize_first_order(1.0, Mesh::uniform(0.0, 1.0, 50));
  ComplexVector c = ComplexVector::Zero(op.cols());
  c(30) = 1.0;
  // Im<e, A e> = 1/h + gamma/x for a unit vector in weighted coordinates
  CHECK(discrete_form(op, c) == doctest::Approx(50.0 + 1.0 / op.row_nodes[op.domain_rows[30]]));
}

TEST_CASE("bordered tridiagonal inertia matches the dense eigensolver") {
  for (int trial = 0; trial < 40; ++trial) {
    const int n = gen::integer(1, 12);
    RealVector d(n);
    ComplexVector s(std::max(0, n - 1)), c(n);
    for (int k = 0; k < n; ++k) {
      d(k) = gen::uniform(-2, 3);
      c(k) = cplx(gen::uniform(-1, 1), gen::uniform(-1, 1));
      if (k + 1 < n) s(k) = cplx(gen::uniform(-1, 1), gen::uniform(-1, 1));
    }
    const BorderedTridiagonal b(d, s, c, gen::uniform(-2, 2));
    const auto dec = decompose_hermitian(b.to_dense());
    for (double lambda : {-1.0, 0.0, 0.7}) {
      int below = 0;
      for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) below += dec.eigenvalues(i) < lambda;
      CHECK(b.count_below(lambda) == below);
    }
    CHECK(b.min_eigenvalue() == doctest::Approx(dec.eigenvalues(0)).epsilon(1e-9));
  }
}

TEST_CASE("structured Gram matrix equals the dense oracle on small meshes") {
  const SingularParams p(1.0);
  const FuncExpr v = t(1.0, 1.0) + t(0.3, 2.0, 1.0);
  const FuncExpr ell = t(4.0 * I, 1.0) + t(0.5, 1.5);
  const Mesh m = Mesh::graded(0.0, 1.0, 16, 5);
  const auto op = discretize_first_order(1.0, m);
  const auto g = first_order_extension_gram(1.0, m, v, ell);
  const PartialOperator pop = to_partial_operator(op);
  const ExtensionSpec ext(pop, op.sample([&](double x) { return v(x); }),
                          op.sample([&](double x) { return ell(x); }));
  CHECK(g.min_eigenvalue() == doctest::Approx(psd_margin(g.to_dense())).epsilon(1e-9));
  // Schur complement in v units = criterion margin times |coefficient of the new direction|^2
  const auto r = criterion_check(pop, ext);
  const double w = op.weights(op.rows() - 1);
  CHECK(g.schur_complement() == doctest::Approx(r.criterion_margin * w * std::norm(v(1.0))).epsilon(1e-9));
  CHECK((g.schur_complement() > 0) == (oracle_check(pop, ext) > 0));
}

TEST_CASE("defect dimensions") {
  for (double g : {0.5, 1.0, 2.0}) {
    const auto r = defect_dimension(
        [g](int level) { return discretize_first_order(g, Mesh::graded(0.0, 1.0, 64 << level, 20)); });
    CHECK(r.dimension == 1);
    CHECK(r.fine.smallest_retained >= 1.0 - 1e-9);
  }
  const auto s = defect_dimension(
      [](int level) { return discretize_schrodinger(PotentialSpec::constant(1.0), 10.0, 100 << level); });
  CHECK(s.dimension == 1);
  const auto l = defect_dimension([](int level) { return discretize_minimal_laplacian(50 << level); });
  CHECK(l.dimension == 2);
  CHECK_THROWS_AS(defect_dimension([](int level) {
                    return level == 0 ? discretize_minimal_laplacian(40)
                                      : discretize_first_order(1.0, Mesh::uniform(0.0, 1.0, 40));
                  }),
                  UnstableNullity);
}

TEST_CASE("left null vector follows x^gamma e^x") {
  for (double g : {0.5, 1.0, 2.0}) {
    const auto op = discretize_first_order(g, Mesh::graded(0.0, 1.0, 256, 20));
    const auto c = check_defect_kernel(op, [g](double x) { return std::pow(x, g) * std::exp(x); });
    CHECK(c.alignment > 0.999);
    CHECK(c.sigma_min >= 1.0 - 1e-9);
  }
}

TEST_CASE("cross-validation examples") {
  const SingularParams p(1.0);
  const std::vector<int> ladder{512, 2048};
  const auto below = cross_validate(t(1.0, 1.0), t(4.0 * I, 1.0), p, ladder);
  CHECK(below.analytic_decision == Decision::dissipative);
  for (const auto& row : below.rows) CHECK(row.grid_margin > 0.0);
  CHECK(below.agrees);
  const auto above = cross_validate(t(1.0, 1.0), t(8.0 * I, 1.0), p, ladder);
  for (const auto& row : above.rows) CHECK(row.grid_margin < 0.0);
  CHECK_FALSE(above.no_convergence);
  const auto flat = cross_validate(t(1.0, 1.0), FuncExpr::zero(U), p, ladder);
  CHECK_FALSE(flat.resolvable);
  CHECK_FALSE(flat.no_convergence);
}

TEST_CASE("regression set") {
  const auto cases = regression_cases();
  CHECK(cases.size() == 12);
  for (const auto& c : cases) {
    const auto r = dissipativity_check(c.v, c.ell, SingularParams(c.gamma));
    CHECK(std::abs(r.margin) > 0.1);
  }
  CHECK(regression_case("x-4ix").gamma == 1.0);
  CHECK_THROWS_AS(regression_case("missing"), InvalidInput);
  CHECK(regression_case_ids().size() == 15);
}

TEST_CASE("rationals") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(1, -3) == Rational(-1, 3));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(1, 3) * Rational(3, 7) == Rational(1, 7));
  CHECK(Rational(1, 3) / Rational(2, 3) == Rational(1, 2));
  CHECK(Rational(1, 3) - Rational(1, 3) == Rational(0));
  CHECK(Rational(5, 10).str() == "1/2");
  CHECK_THROWS_AS(Rational(1, 0), InvalidInput);
}

TEST_CASE("closability falsifier") {
  const auto r = closability_falsifier({1, 10, 100, 1000, 100000});
  for (const auto& row : r.rows) {
    CHECK(row.norm_sq == Rational(1, 3 * row.n));
    CHECK(row.form == Rational(1, 2));
    CHECK(row.form_diff == Rational(0));
    CHECK(row.norm_sq_quadrature == doctest::Approx(1.0 / (3.0 * row.n)).epsilon(1e-12));
    CHECK(row.form_quadrature == doctest::Approx(0.5).epsilon(1e-12));
  }
}
