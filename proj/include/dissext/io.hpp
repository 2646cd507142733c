#pragma once

// JSON instance parsing, report serialization and CSV output. Every parse
// error is an InvalidInput whose field() is a JSON pointer into the
// document that was being read.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dissext/criterion.hpp"
#include "dissext/first_order.hpp"
#include "dissext/grid_oracle.hpp"
#include "dissext/schrodinger.hpp"

namespace dissext {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

Json parse_json_text(const std::string& text, const std::string& source);
Json read_json_file(const std::string& path);

cplx parse_complex(const Json& j, const std::string& pointer);
Json to_json(cplx z);

/// rows x cols array of complex pairs, row-major.
ComplexMatrix parse_matrix(const Json& j, const std::string& pointer,
                           std::optional<Eigen::Index> rows = {},
                           std::optional<Eigen::Index> cols = {});
Json to_json(const ComplexMatrix& m);
Json to_json(const RealVector& v);

/// Term list [{"c": [re, im], "alpha": a, "beta": b}, ...]. alpha may be
/// the string "gamma" or "gamma+<number>" / "gamma-<number>" when gamma is
/// known; beta defaults to 0.
FuncExpr parse_terms(const Json& j, const std::string& pointer, Interval iv,
                     std::optional<double> gamma = {});
Json to_json(const FuncExpr& f);

struct MatrixInstance {
  Eigen::Index ambient_dim = 0;
  ComplexMatrix domain_basis;
  ComplexMatrix domain_action;
  ComplexMatrix complement_basis;
  ComplexMatrix complement_action;
  std::optional<double> epsilon;
};

struct SchrodingerInstance {
  PotentialSpec potential = PotentialSpec::constant(1.0);
  Json potential_json;
  FuncExpr v;
  FuncExpr ell;
  std::optional<double> truncation_L;
};

struct FirstOrderInstance {
  double gamma = 1.0;
  FuncExpr v;
  FuncExpr ell;
  IntegrationPath path = IntegrationPath::automatic;
};

struct Tolerances {
  std::optional<double> epsilon;
  std::optional<double> tol;
};

/// Parses the instance object itself (the value under "matrix", ...).
MatrixInstance parse_matrix_instance(const Json& j, const std::string& pointer);
SchrodingerInstance parse_schrodinger_instance(const Json& j, const std::string& pointer);
FirstOrderInstance parse_first_order_instance(const Json& j, const std::string& pointer);
PotentialSpec parse_potential(const Json& j, const std::string& pointer);
Tolerances parse_tolerances(const Json& j, const std::string& pointer);
IntegrationPath parse_path(const std::string& s, const std::string& pointer);
std::string to_string(IntegrationPath p);

/// Top-level instance file: {"schema_version": 1, "<kind>": {...},
/// "tolerances": {...}}. Returns the instance object for `kind`
/// ("matrix", "schrodinger", "first_order") and fills the tolerances.
Json instance_section(const Json& file, const std::string& kind, Tolerances& tol);

Json matrix_instance_json(const MatrixInstance& m);

Json report_json(const CheckReport& r);
Json report_json(const AccretivityReport& r);
Json report_json(const DissipativityReport& r);
Json report_json(const WStarMembership& m);
Json report_json(const EtaSolution& e);
Json report_json(const CrossValidationReport& r);
Json report_json(const ClosabilityReport& r);

// ---------------------------------------------------------------- scans

struct ScanRow {
  double gamma = 0.0;
  double c = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  std::string decision;  // dissipative | not_dissipative | boundary | error
  std::string message;
};

/// c_i = from + i * step for i = 0.. while c_i <= to (+1e-9 step slack);
/// empty when to < from. Requires step > 0. Points are rounded to 12
/// significant digits.
std::vector<double> coefficient_grid(double from, double to, double step);

/// l = c * w for each c; errors are recorded per row.
std::vector<ScanRow> scan_coefficient(const SingularParams& p, const FuncExpr& v,
                                      const FuncExpr& w, const std::vector<double>& cs,
                                      double relative_band = 1e-9);

/// v = x^gamma, l = i c x^gamma for each gamma.
std::vector<ScanRow> scan_gamma(const std::vector<double>& gammas, double c,
                                double relative_band = 1e-9);

std::string scan_csv(const std::vector<ScanRow>& rows);
Json scan_json(const std::vector<ScanRow>& rows);

std::string cross_validation_csv(const CrossValidationReport& r);
std::string closability_csv(const ClosabilityReport& r);

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

}  // namespace dissext
