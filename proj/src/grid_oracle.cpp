#include "dissext/grid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dissext/errors.hpp"
#include "dissext/quadrature.hpp"

namespace dissext {

namespace {

const cplx kI(0.0, 1.0);

}  // namespace

// ---------------------------------------------------------------- meshes

Mesh Mesh::uniform(double a, double b, int cells) {
  if (!(b > a) || cells < 1) throw InvalidInput("uniform mesh needs b > a and cells >= 1");
  Mesh m;
  m.h_ = (b - a) / cells;
  m.nodes_.resize(cells + 1);
  for (int i = 0; i <= cells; ++i) m.nodes_[i] = a + i * m.h_;
  m.nodes_.back() = b;
  return m;
}

Mesh Mesh::graded(double a, double b, int cells, int depth, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidInput("grading ratio must lie in (0, 1)");
  if (depth < 0) throw InvalidInput("grading depth must be >= 0");
  Mesh m = uniform(a, b, cells);
  std::vector<double> head;
  head.push_back(a);
  for (int k = depth; k >= 1; --k) head.push_back(a + m.h_ * std::pow(ratio, k));
  m.nodes_.insert(m.nodes_.begin() + 1, head.begin() + 1, head.end());
  m.ratio_ = ratio;
  m.depth_ = depth;
  return m;
}

// ------------------------------------------------------------ operators

ComplexMatrix DiscretizedOperator::embedding() const {
  ComplexMatrix j = ComplexMatrix::Zero(rows(), cols());
  for (std::size_t k = 0; k < domain_rows.size(); ++k) j(domain_rows[k], k) = 1.0;
  return j;
}

ComplexVector DiscretizedOperator::sample(const std::function<cplx(double)>& f) const {
  ComplexVector s(rows());
  for (Eigen::Index j = 0; j < rows(); ++j) s(j) = std::sqrt(weights(j)) * f(row_nodes[j]);
  return s;
}

DiscretizedOperator discretize_first_order(double gamma, const Mesh& mesh) {
  SingularParams check(gamma);
  if (mesh.a() != 0.0 || mesh.b() != 1.0)
    throw InvalidInput("first-order operator lives on (0, 1)");
  const auto& x = mesh.nodes();
  const Eigen::Index n = static_cast<Eigen::Index>(x.size()) - 1;  // rows: nodes 1..N
  DiscretizedOperator op;
  op.mesh = mesh;
  op.boundary_convention = "backward differences; f(0) = 0 implicit, f(1) = 0 on the domain";
  op.weights.resize(n);
  op.row_nodes.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    op.weights(j) = x[j + 1] - x[j];
    op.row_nodes[j] = x[j + 1];
  }
  op.matrix = ComplexMatrix::Zero(n, n - 1);
  for (Eigen::Index k = 0; k < n - 1; ++k) {
    op.domain_rows.push_back(k);
    const double wk = op.weights(k);
    op.matrix(k, k) = kI * (1.0 / wk + gamma / x[k + 1]);
    // row k+1 sees -f_k / h_{k+1}; rescaled by sqrt(w_{k+1} / w_k)
    const double wn = op.weights(k + 1);
    op.matrix(k + 1, k) = -kI / wn * std::sqrt(wn / wk);
  }
  return op;
}

namespace {

DiscretizedOperator second_order(const std::function<double(double)>& pot, double L, int cells,
                                 int dropped_right, std::string convention) {
  if (cells < 6) throw InvalidInput("need at least 6 cells");
  DiscretizedOperator op;
  op.mesh = Mesh::uniform(0.0, L, cells);
  op.boundary_convention = std::move(convention);
  const double h = op.mesh.h();
  const Eigen::Index rows = cells - 1;  // nodes 1..M-1
  op.weights = RealVector::Constant(rows, h);
  for (Eigen::Index j = 0; j < rows; ++j) op.row_nodes.push_back(op.mesh.nodes()[j + 1]);
  // unknowns at nodes 2 .. M-1-dropped_right
  const Eigen::Index first = 2, last = cells - 1 - dropped_right;
  const Eigen::Index cols = last - first + 1;
  op.matrix = ComplexMatrix::Zero(rows, cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    const Eigen::Index node = first + k;
    op.domain_rows.push_back(node - 1);
    const double xk = op.mesh.nodes()[node];
    op.matrix(node - 1, k) = kI * (2.0 / (h * h) + pot(xk));
    op.matrix(node - 2, k) = -kI / (h * h);
    if (node < cells - 1) op.matrix(node, k) = -kI / (h * h);
  }
  return op;
}

}  // namespace

DiscretizedOperator discretize_schrodinger(const PotentialSpec& v, double L, int cells) {
  if (!(L > 0.0)) throw InvalidInput("truncation length must be positive");
  return second_order([&](double x) { return v(x); }, L, cells, 0,
                      "central differences; f(0) = f'(0) = 0, Dirichlet at L");
}

DiscretizedOperator discretize_minimal_laplacian(int cells) {
  return second_order([](double) { return 0.0; }, 1.0, cells, 1,
                      "central differences; f = f' = 0 at both ends");
}

PartialOperator to_partial_operator(const DiscretizedOperator& op) {
  return PartialOperator(op.embedding(), op.matrix);
}

double discrete_form(const DiscretizedOperator& op, const ComplexVector& f) {
  if (f.size() != op.cols()) throw InvalidInput("coefficient vector has the wrong length");
  const ComplexVector af = op.matrix * f;
  cplx s = 0.0;
  for (Eigen::Index k = 0; k < f.size(); ++k) s += std::conj(f(k)) * af(op.domain_rows[k]);
  return s.imag();
}

// ---------------------------------------------------------- defect index

namespace {

ComplexMatrix shifted(const DiscretizedOperator& op) {
  ComplexMatrix t = op.matrix;
  for (std::size_t k = 0; k < op.domain_rows.size(); ++k) t(op.domain_rows[k], k) += kI;
  return t;
}

}  // namespace

NullityEstimate estimate_nullity(const DiscretizedOperator& op, double threshold_constant) {
  const ComplexMatrix t = shifted(op);
  Eigen::BDCSVD<ComplexMatrix> svd(t);
  const RealVector& s = svd.singularValues();
  NullityEstimate e;
  e.rows = t.rows();
  e.threshold = threshold_constant * op.mesh.h();
  int retained = 0;
  e.smallest_retained = kInfinity;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > e.threshold) {
      ++retained;
      e.smallest_retained = std::min(e.smallest_retained, s(i));
    } else {
      e.largest_dropped = std::max(e.largest_dropped, s(i));
    }
  }
  e.nullity = static_cast<int>(t.rows()) - retained;
  return e;
}

DefectReport defect_dimension(const OperatorFamily& family, int level, double threshold_constant) {
  DefectReport r;
  r.coarse = estimate_nullity(family(level), threshold_constant);
  r.fine = estimate_nullity(family(level + 1), threshold_constant);
  if (r.coarse.nullity != r.fine.nullity) {
    std::ostringstream msg;
    msg << "defect estimate changed under refinement: " << r.coarse.nullity << " vs "
        << r.fine.nullity;
    throw UnstableNullity(msg.str(), std::abs(r.coarse.nullity - r.fine.nullity));
  }
  r.dimension = r.fine.nullity;
  return r;
}

DefectKernelCheck check_defect_kernel(const DiscretizedOperator& op,
                                      const std::function<cplx(double)>& kernel) {
  const ComplexMatrix t = shifted(op);
  Eigen::BDCSVD<ComplexMatrix> svd(t, Eigen::ComputeFullU);
  const ComplexVector u = svd.matrixU().col(t.rows() - 1);
  const ComplexVector k = op.sample(kernel);
  DefectKernelCheck c;
  c.alignment = std::abs(u.dot(k)) / k.norm();
  c.sigma_min = svd.singularValues().minCoeff();
  return c;
}

// ------------------------------------------------- bordered tridiagonal

BorderedTridiagonal::BorderedTridiagonal(RealVector diag, ComplexVector sub,
                                         ComplexVector border, double corner)
    : diag_(std::move(diag)), sub_(std::move(sub)), border_(std::move(border)), corner_(corner) {
  if (diag_.size() < 1 || sub_.size() != diag_.size() - 1 || border_.size() != diag_.size())
    throw InvalidInput("bordered tridiagonal: inconsistent sizes");
}

int BorderedTridiagonal::count_below(double lambda) const {
  constexpr double kTiny = 1e-300;
  const Eigen::Index n = diag_.size();
  int negative = 0;
  double d = 0.0, last = corner_ - lambda;
  cplx t = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k == 0) {
      d = diag_(0) - lambda;
      t = std::conj(border_(0));
    } else {
      const double prev = d;
      d = diag_(k) - lambda - std::norm(sub_(k - 1)) / prev;
      t = std::conj(border_(k)) - t * std::conj(sub_(k - 1)) / prev;
    }
    if (d == 0.0) d = kTiny;
    if (d < 0.0) ++negative;
    last -= std::norm(t) / d;
  }
  if (last < 0.0) ++negative;
  return negative;
}

double BorderedTridiagonal::min_eigenvalue(double rel_tol) const {
  const Eigen::Index n = diag_.size();
  double lo = corner_ - border_.cwiseAbs().sum();
  double hi = corner_;
  for (Eigen::Index k = 0; k < n; ++k) {
    double off = std::abs(border_(k));
    if (k > 0) off += std::abs(sub_(k - 1));
    if (k + 1 < n) off += std::abs(sub_(k));
    lo = std::min(lo, diag_(k) - off);
    hi = std::min(hi, diag_(k));
  }
  for (int it = 0; it < 400 && hi - lo > rel_tol * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double BorderedTridiagonal::schur_complement() const {
  const Eigen::Index n = diag_.size();
  double d = 0.0, last = corner_;
  cplx t = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k == 0) {
      d = diag_(0);
      t = std::conj(border_(0));
    } else {
      const double prev = d;
      d = diag_(k) - std::norm(sub_(k - 1)) / prev;
      t = std::conj(border_(k)) - t * std::conj(sub_(k - 1)) / prev;
    }
    if (!(d > 0.0)) throw ConditionFailed("tridiagonal block is not positive definite");
    last -= std::norm(t) / d;
  }
  return last;
}

double BorderedTridiagonal::scale() const {
  return std::sqrt(diag_.squaredNorm() + 2.0 * sub_.squaredNorm() + 2.0 * border_.squaredNorm() +
                   corner_ * corner_);
}

ComplexMatrix BorderedTridiagonal::to_dense() const {
  const Eigen::Index n = diag_.size();
  ComplexMatrix g = ComplexMatrix::Zero(n + 1, n + 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    g(k, k) = diag_(k);
    if (k + 1 < n) {
      g(k + 1, k) = sub_(k);
      g(k, k + 1) = std::conj(sub_(k));
    }
    g(k, n) = border_(k);
    g(n, k) = std::conj(border_(k));
  }
  g(n, n) = corner_;
  return g;
}

BorderedTridiagonal first_order_extension_gram(double gamma, const Mesh& mesh, const FuncExpr& v,
                                               const FuncExpr& ell) {
  SingularParams check(gamma);
  if (mesh.a() != 0.0 || mesh.b() != 1.0)
    throw InvalidInput("first-order operator lives on (0, 1)");
  const auto& x = mesh.nodes();
  const Eigen::Index nn = static_cast<Eigen::Index>(x.size()) - 1;  // nodes 1..N
  std::vector<cplx> vs(nn + 1), ls(nn + 1);
  for (Eigen::Index j = 1; j <= nn; ++j) {
    vs[j] = v(x[j]);
    ls[j] = ell(x[j]);
  }
  const Eigen::Index n = nn - 1;
  RealVector diag(n);
  ComplexVector sub = ComplexVector::Constant(n - 1, -0.5);
  ComplexVector border(n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double hk = x[k] - x[k - 1];
    const double dk = 1.0 + gamma * hk / x[k];
    diag(k - 1) = dk;
    border(k - 1) = (hk * ls[k] + kI * dk * vs[k] - kI * vs[k + 1]) / (2.0 * kI);
  }
  double corner = 0.0;
  for (Eigen::Index j = 1; j <= nn; ++j)
    corner += (x[j] - x[j - 1]) * (std::conj(vs[j]) * ls[j]).imag();
  return BorderedTridiagonal(std::move(diag), std::move(sub), std::move(border), corner);
}

// -------------------------------------------------------- cross-checks

CrossValidationReport cross_validate(const FuncExpr& v, const FuncExpr& ell,
                                     const SingularParams& p, const std::vector<int>& cells_ladder,
                                     int depth, double resolution) {
  CrossValidationReport rep;
  const auto analytic = dissipativity_check(v, ell, p);
  rep.analytic_margin = analytic.margin;
  rep.analytic_decision = analytic.decision;
  rep.resolvable = std::abs(analytic.margin) > resolution;
  for (int cells : cells_ladder) {
    const Mesh mesh = Mesh::graded(0.0, 1.0, cells, depth);
    const auto g = first_order_extension_gram(p.gamma(), mesh, v, ell);
    GridMarginRow row;
    row.cells = cells;
    row.h = mesh.h();
    row.unknowns = g.size();
    row.grid_margin = g.schur_complement();
    row.min_eigenvalue = g.min_eigenvalue();
    row.decision = classify(row.grid_margin, kBoundaryBand * g.scale());
    rep.rows.push_back(row);
  }
  const std::size_t m = rep.rows.size();
  rep.sign_stable = m >= 2 && rep.rows[m - 1].decision == rep.rows[m - 2].decision;
  rep.agrees = m >= 1 && rep.rows[m - 1].decision == rep.analytic_decision;
  rep.no_convergence = rep.resolvable && !(rep.sign_stable && rep.agrees);
  return rep;
}

// ---------------------------------------------------------- closability

namespace {

long long checked(__int128 x) {
  if (x > std::numeric_limits<long long>::max() || x < std::numeric_limits<long long>::min())
    throw NumericalFailure("rational overflow", 0.0);
  return static_cast<long long>(x);
}

Rational make(__int128 num, __int128 den) {
  if (den == 0) throw InvalidInput("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 a = num < 0 ? -num : num, b = den;
  while (b != 0) {
    const __int128 r = a % b;
    a = b;
    b = r;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return Rational(checked(num), checked(den));
}

}  // namespace

Rational::Rational(long long num, long long den) : num_(num), den_(den) {
  if (den == 0) throw InvalidInput("rational with zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  const long long g = std::gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator+(const Rational& o) const {
  return make(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
              static_cast<__int128>(den_) * o.den_);
}
Rational Rational::operator-(const Rational& o) const {
  return *this + Rational(-o.num_, o.den_);
}
Rational Rational::operator*(const Rational& o) const {
  return make(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
}
Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) throw InvalidInput("division by zero rational");
  return make(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
}

ClosabilityReport closability_falsifier(const std::vector<long long>& ns) {
  ClosabilityReport rep;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const long long n = ns[i];
    if (n < 1) throw InvalidInput("hat-function index must be >= 1", "n");
    ClosabilityRow row;
    row.n = n;
    // int_0^{1/n} (1 - 2 n x + n^2 x^2) dx, termwise
    const Rational b(1, n);
    row.norm_sq = b - Rational(n) * b * b + Rational(n * n) * b * b * b / Rational(3);
    const Rational f0(1);  // f_n(0)
    row.form = f0 * f0 / Rational(2);
    const Rational fm0 = i + 1 < ns.size() ? Rational(1) : f0;
    row.form_diff = (f0 - fm0) * (f0 - fm0) / Rational(2);
    const double dn = static_cast<double>(n);
    row.norm_sq_quadrature = quadrature_graded(
        RealIntegrand([dn](double x) { return (1 - dn * x) * (1 - dn * x); }), 0.0, 1.0 / dn, 0.0);
    row.form_quadrature = quadrature_graded(
        RealIntegrand([dn](double x) { return (1 - dn * x) * dn; }), 0.0, 1.0 / dn, 0.0);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace dissext

namespace dissext {

namespace {

FuncExpr x_pow(cplx c, double alpha, double beta = 0.0) {
  return FuncExpr::term(unit_interval(), c, alpha, beta);
}

const cplx kIm(0.0, 1.0);

std::vector<RegressionCase> worked_examples() {
  return {
      {"x-4ix", 1.0, x_pow(1, 1), x_pow(4.0 * kIm, 1), "v = x, l = 4i x (below threshold 16/3)"},
      {"x-8ix", 1.0, x_pow(1, 1), x_pow(8.0 * kIm, 1), "v = x, l = 8i x (above threshold)"},
      {"x-0", 1.0, x_pow(1, 1), FuncExpr::zero(unit_interval()), "v = x, l = 0 (equality case)"},
  };
}

}  // namespace

std::vector<RegressionCase> regression_cases() {
  return {
      {"r01", 1.0, x_pow(1, 1), x_pow(4.0 * kIm, 1), "v = x, l = 4i x"},
      {"r02", 1.0, x_pow(1, 1), x_pow(8.0 * kIm, 1), "v = x, l = 8i x"},
      {"r03", 0.5, x_pow(1, 0.5), x_pow(2.0 * kIm, 0.5), "v = x^(1/2), l = 2i x^(1/2)"},
      {"r04", 0.5, x_pow(1, 0.5), x_pow(5.0 * kIm, 0.5), "v = x^(1/2), l = 5i x^(1/2)"},
      {"r05", 2.0, x_pow(1, 2) + x_pow(0.5, 3), x_pow(3.0 * kIm, 2), "v = x^2 + x^3/2, l = 3i x^2"},
      {"r06", 2.0, x_pow(1, 2), x_pow(20.0 * kIm, 2), "v = x^2, l = 20i x^2"},
      {"r07", 0.3, x_pow(1, 0.3), x_pow(kIm, 0.3), "v = x^0.3, l = i x^0.3"},
      {"r08", 5.0, x_pow(1, 5), x_pow(10.0 * kIm, 5), "v = x^5, l = 10i x^5"},
      {"r09", 1.0, x_pow(1, 1, 1), x_pow(kIm, 1), "v = x e^x, l = i x"},
      {"r10", 1.0, x_pow(1, 1) + x_pow(1, 2), x_pow(2.0 * kIm, 1) - x_pow(1, 2),
       "v = x + x^2, l = 2i x - x^2"},
      {"r11", 1.0, x_pow(1, 1), x_pow(cplx(5.0, 3.0), 1), "v = x, l = (5 + 3i) x"},
      {"r12", 1.5, x_pow(1, 1.5), x_pow(6.0 * kIm, 1.5, -1), "v = x^1.5, l = 6i x^1.5 e^-x"},
  };
}

std::vector<std::string> regression_case_ids() {
  std::vector<std::string> ids;
  for (const auto& c : worked_examples()) ids.push_back(c.id);
  for (const auto& c : regression_cases()) ids.push_back(c.id);
  return ids;
}

RegressionCase regression_case(const std::string& id) {
  for (const auto& c : worked_examples())
    if (c.id == id) return c;
  for (const auto& c : regression_cases())
    if (c.id == id) return c;
  throw InvalidInput("unknown validation case '" + id + "'", "case");
}

}  // namespace dissext
