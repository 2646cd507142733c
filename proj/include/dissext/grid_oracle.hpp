#pragma once

// Finite-difference surrogates of the continuum operators, used only to
// validate the analytic modules: defect indices, discrete versions of the
// extension criterion, and the closability counterexample.

#include <functional>
#include <string>
#include <vector>

#include "dissext/criterion.hpp"
#include "dissext/first_order.hpp"
#include "dissext/schrodinger.hpp"

namespace dissext {

class Mesh {
 public:
  /// `cells` uniform cells on [a, b].
  static Mesh uniform(double a, double b, int cells);
  /// Uniform cells of width (b - a)/cells, except that the first one is
  /// split geometrically toward a: a + h r^depth, ..., a + h r, a + h.
  static Mesh graded(double a, double b, int cells, int depth, double ratio = 0.5);

  double a() const { return nodes_.front(); }
  double b() const { return nodes_.back(); }
  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t cells() const { return nodes_.size() - 1; }
  /// Width of the uniform cells.
  double h() const { return h_; }
  double grading_ratio() const { return ratio_; }
  int grading_depth() const { return depth_; }

 private:
  std::vector<double> nodes_;
  double h_ = 0.0;
  double ratio_ = 1.0;
  int depth_ = 0;
};

/// Discrete operator in orthonormal (quadrature-weighted) coordinates.
/// Rows are range coordinates, columns the domain unknowns; domain unknown
/// k sits at range coordinate domain_rows[k].
struct DiscretizedOperator {
  Mesh mesh;
  ComplexMatrix matrix;
  std::vector<Eigen::Index> domain_rows;
  RealVector weights;        // quadrature weight of each range coordinate
  std::vector<double> row_nodes;  // mesh node of each range coordinate
  std::string boundary_convention;

  Eigen::Index rows() const { return matrix.rows(); }
  Eigen::Index cols() const { return matrix.cols(); }
  /// Embedding of the domain into the range coordinates.
  ComplexMatrix embedding() const;
  /// Samples f at the row nodes in weighted coordinates: sqrt(w_j) f(x_j).
  ComplexVector sample(const std::function<cplx(double)>& f) const;
};

/// A = i d/dx + i gamma/x with backward differences on nodes x_1..x_N,
/// f(0) = 0 implicit and f(x_N) = 0 imposed on the domain.
DiscretizedOperator discretize_first_order(double gamma, const Mesh& mesh);

/// i(-d^2/dx^2 + V) on [0, L], `cells` uniform cells; minimal conditions
/// f(0) = f'(0) = 0 and Dirichlet f(L) = 0 at the artificial end.
DiscretizedOperator discretize_schrodinger(const PotentialSpec& v, double L, int cells);

/// i(-d^2/dx^2) on (0, 1) with minimal conditions at both ends.
DiscretizedOperator discretize_minimal_laplacian(int cells);

/// The same operator as a PartialOperator for the dense criterion/oracle.
PartialOperator to_partial_operator(const DiscretizedOperator& op);

/// Im<f, A f> for f given by its domain unknowns (weighted coordinates).
double discrete_form(const DiscretizedOperator& op, const ComplexVector& f);

struct NullityEstimate {
  int nullity = 0;
  double threshold = 0.0;
  double smallest_retained = 0.0;  // smallest singular value above threshold
  double largest_dropped = 0.0;    // largest singular value at or below it, 0 if none
  Eigen::Index rows = 0;
};

/// dim ker((A + iJ)^*) = rows - #{sigma > C h} for the rectangular matrix
/// A + iJ, with h the mesh width.
NullityEstimate estimate_nullity(const DiscretizedOperator& op, double threshold_constant = 1.0);

struct DefectReport {
  int dimension = 0;
  NullityEstimate coarse;
  NullityEstimate fine;
};

using OperatorFamily = std::function<DiscretizedOperator(int refinement)>;

/// Nullity at refinement levels `level` and `level + 1`. Throws
/// UnstableNullity if they differ.
DefectReport defect_dimension(const OperatorFamily& family, int level = 0,
                              double threshold_constant = 1.0);

struct DefectKernelCheck {
  double alignment = 0.0;       // |<null vector, sampled kernel>| / ||sampled kernel||
  double sigma_min = 0.0;       // smallest singular value of A + iJ
};

/// Compares the left null vector of A + iJ with a sampled kernel function.
DefectKernelCheck check_defect_kernel(const DiscretizedOperator& op,
                                      const std::function<cplx(double)>& kernel);

/// Hermitian [[T, c], [c*, r]] with T tridiagonal (real diagonal, complex
/// subdiagonal), c a border column and r a real corner.
class BorderedTridiagonal {
 public:
  BorderedTridiagonal(RealVector diag, ComplexVector sub, ComplexVector border, double corner);

  Eigen::Index size() const { return diag_.size() + 1; }
  /// Number of eigenvalues below lambda, from the inertia of the LDL*
  /// factorization of G - lambda I.
  int count_below(double lambda) const;
  /// Smallest eigenvalue by bisection on count_below.
  double min_eigenvalue(double rel_tol = 1e-12) const;
  /// r - c* T^{-1} c; requires T positive definite (ConditionFailed).
  double schur_complement() const;
  /// Frobenius-norm scale, used for bands.
  double scale() const;
  ComplexMatrix to_dense() const;

 private:
  RealVector diag_;
  ComplexVector sub_;
  ComplexVector border_;
  double corner_;
};

/// Gram matrix of f -> Im<f, Bf> for the discrete extension of the
/// first-order operator by v -> l, in nodal coordinates [f_1..f_{N-1}, v].
BorderedTridiagonal first_order_extension_gram(double gamma, const Mesh& mesh,
                                               const FuncExpr& v, const FuncExpr& ell);

struct GridMarginRow {
  int cells = 0;
  double h = 0.0;
  Eigen::Index unknowns = 0;
  double grid_margin = 0.0;     // Schur complement, comparable to the analytic margin
  double min_eigenvalue = 0.0;  // of the full discrete Gram matrix
  Decision decision = Decision::boundary;
};

struct CrossValidationReport {
  double analytic_margin = 0.0;
  Decision analytic_decision = Decision::boundary;
  std::vector<GridMarginRow> rows;
  bool resolvable = false;      // |analytic margin| > resolution
  bool sign_stable = false;     // last two grid decisions agree
  bool agrees = false;          // final grid decision equals the analytic one
  bool no_convergence = false;  // resolvable but not (sign_stable && agrees)
};

/// Runs the discrete criterion along a ladder of uniform cell counts
/// (first cell graded with `depth` levels) and compares with
/// dissipativity_check.
CrossValidationReport cross_validate(const FuncExpr& v, const FuncExpr& ell,
                                     const SingularParams& p,
                                     const std::vector<int>& cells_ladder,
                                     int depth = 40, double resolution = 1e-3);

struct RegressionCase {
  std::string id;
  double gamma = 1.0;
  FuncExpr v;
  FuncExpr ell;
  std::string description;
};

/// Fixed set of twelve triples with |analytic margin| well above 1e-3.
std::vector<RegressionCase> regression_cases();
/// Looks a case up by id, including the three worked examples
/// ("x-4ix", "x-8ix", "x-0"). Throws InvalidInput for unknown ids.
RegressionCase regression_case(const std::string& id);
std::vector<std::string> regression_case_ids();

/// Exact rational with 64-bit parts, always normalized (den > 0).
class Rational {
 public:
  Rational(long long num = 0, long long den = 1);
  long long num() const { return num_; }
  long long den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  bool operator==(const Rational& o) const = default;

 private:
  long long num_;
  long long den_;
};

/// f_n(x) = max(0, 1 - n x) on the half-line, A = -i d/dx with q_A(f) = |f(0)|^2/2.
struct ClosabilityRow {
  long long n = 0;
  Rational norm_sq;        // ||f_n||^2
  Rational form;           // q(f_n)
  Rational form_diff;      // q(f_n - f_m), m = next n in the table (0 for the last row)
  double norm_sq_quadrature = 0.0;
  double form_quadrature = 0.0;  // -Re int conj(f_n) f_n'
};

struct ClosabilityReport {
  std::vector<ClosabilityRow> rows;
};

ClosabilityReport closability_falsifier(const std::vector<long long>& ns = {1, 10, 100, 1000});

}  // namespace dissext
