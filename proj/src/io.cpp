#include "dissext/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dissext/errors.hpp"

namespace dissext {

namespace {

std::string child(const std::string& pointer, const std::string& key) {
  std::string escaped;
  for (char ch : key) {
    if (ch == '~')
      escaped += "~0";
    else if (ch == '/')
      escaped += "~1";
    else
      escaped += ch;
  }
  return pointer + "/" + escaped;
}

std::string child(const std::string& pointer, std::size_t index) {
  return pointer + "/" + std::to_string(index);
}

const Json& require_key(const Json& obj, const std::string& key, const std::string& pointer) {
  if (!obj.is_object()) throw InvalidInput("expected an object", pointer);
  auto it = obj.find(key);
  if (it == obj.end()) throw InvalidInput("missing field '" + key + "'", child(pointer, key));
  return *it;
}

void reject_unknown(const Json& obj, std::initializer_list<const char*> allowed,
                    const std::string& pointer) {
  if (!obj.is_object()) throw InvalidInput("expected an object", pointer);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw InvalidInput("unknown field '" + it.key() + "'", child(pointer, it.key()));
  }
}

double number(const Json& j, const std::string& pointer) {
  if (!j.is_number()) throw InvalidInput("expected a number", pointer);
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw InvalidInput("number is not finite", pointer);
  return x;
}

std::optional<double> optional_number(const Json& obj, const std::string& key,
                                      const std::string& pointer) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return number(*it, child(pointer, key));
}

Json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return nullptr;
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(source + ": malformed JSON: " + e.what(), "");
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open input file '" + path + "'", "");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

cplx parse_complex(const Json& j, const std::string& pointer) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InvalidInput("complex numbers must be [re, im] pairs of numbers", pointer);
  return {number(j[0], child(pointer, 0)), number(j[1], child(pointer, 1))};
}

Json to_json(cplx z) { return Json::array({num(z.real()), num(z.imag())}); }

ComplexMatrix parse_matrix(const Json& j, const std::string& pointer,
                           std::optional<Eigen::Index> rows, std::optional<Eigen::Index> cols) {
  if (!j.is_array() || j.empty()) throw InvalidInput("expected a non-empty array of rows", pointer);
  const auto r = static_cast<Eigen::Index>(j.size());
  if (rows && r != *rows)
    throw InvalidInput("expected " + std::to_string(*rows) + " rows, got " + std::to_string(r),
                       pointer);
  if (!j[0].is_array() || j[0].empty())
    throw InvalidInput("expected a non-empty row", child(pointer, 0));
  const auto c = static_cast<Eigen::Index>(j[0].size());
  if (cols && c != *cols)
    throw InvalidInput("expected " + std::to_string(*cols) + " columns, got " + std::to_string(c),
                       child(pointer, 0));
  ComplexMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const std::string rp = child(pointer, static_cast<std::size_t>(i));
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != c)
      throw InvalidInput("row has the wrong length", rp);
    for (Eigen::Index k = 0; k < c; ++k)
      m(i, k) = parse_complex(j[i][k], child(rp, static_cast<std::size_t>(k)));
  }
  return m;
}

Json to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    out.push_back(row);
  }
  return out;
}

Json to_json(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v(i)));
  return out;
}

namespace {

double parse_alpha(const Json& j, const std::string& pointer, std::optional<double> gamma) {
  if (j.is_number()) return number(j, pointer);
  if (!j.is_string()) throw InvalidInput("alpha must be a number or a gamma expression", pointer);
  const std::string s = j.get<std::string>();
  if (s.rfind("gamma", 0) != 0)
    throw InvalidInput("alpha string must start with 'gamma'", pointer);
  if (!gamma) throw InvalidInput("alpha refers to gamma, which is not defined here", pointer);
  const std::string rest = s.substr(5);
  if (rest.empty()) return *gamma;
  if (rest[0] != '+' && rest[0] != '-')
    throw InvalidInput("alpha must read gamma, gamma+<number> or gamma-<number>", pointer);
  std::size_t used = 0;
  double shift = 0.0;
  try {
    shift = std::stod(rest, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != rest.size() || !std::isfinite(shift))
    throw InvalidInput("alpha must read gamma, gamma+<number> or gamma-<number>", pointer);
  return *gamma + shift;
}

}  // namespace

FuncExpr parse_terms(const Json& j, const std::string& pointer, Interval iv,
                     std::optional<double> gamma) {
  if (!j.is_array()) throw InvalidInput("expected an array of terms", pointer);
  std::vector<Term> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string tp = child(pointer, i);
    reject_unknown(j[i], {"c", "alpha", "beta"}, tp);
    Term t;
    t.c = parse_complex(require_key(j[i], "c", tp), child(tp, "c"));
    t.alpha = parse_alpha(require_key(j[i], "alpha", tp), child(tp, "alpha"), gamma);
    t.beta = optional_number(j[i], "beta", tp).value_or(0.0);
    if (iv.infinite() && t.beta > 0.0)
      throw InvalidInput("terms on the half-line need beta <= 0", child(tp, "beta"));
    terms.push_back(t);
  }
  return FuncExpr(iv, std::move(terms));
}

Json to_json(const FuncExpr& f) {
  Json out = Json::array();
  for (const auto& t : f.terms())
    out.push_back({{"c", to_json(t.c)}, {"alpha", num(t.alpha)}, {"beta", num(t.beta)}});
  return out;
}

// ------------------------------------------------------------ instances

MatrixInstance parse_matrix_instance(const Json& j, const std::string& pointer) {
  reject_unknown(j,
                 {"ambient_dim", "domain_basis", "domain_action", "complement_basis",
                  "complement_action", "epsilon"},
                 pointer);
  MatrixInstance m;
  const Json& nd = require_key(j, "ambient_dim", pointer);
  if (!nd.is_number_integer() || nd.get<long long>() < 2)
    throw InvalidInput("ambient_dim must be an integer >= 2", child(pointer, "ambient_dim"));
  m.ambient_dim = nd.get<Eigen::Index>();
  const std::string db = child(pointer, "domain_basis"), da = child(pointer, "domain_action");
  const std::string cb = child(pointer, "complement_basis"),
                    ca = child(pointer, "complement_action");
  m.domain_basis = parse_matrix(require_key(j, "domain_basis", pointer), db, m.ambient_dim);
  const Eigen::Index d = m.domain_basis.cols();
  if (d >= m.ambient_dim)
    throw InvalidInput("the domain must be a proper subspace (d < ambient_dim)", db);
  m.domain_action = parse_matrix(require_key(j, "domain_action", pointer), da, m.ambient_dim, d);
  m.complement_basis = parse_matrix(require_key(j, "complement_basis", pointer), cb, m.ambient_dim);
  const Eigen::Index k = m.complement_basis.cols();
  if (d + k > m.ambient_dim)
    throw InvalidInput("domain and complement together exceed ambient_dim", cb);
  m.complement_action =
      parse_matrix(require_key(j, "complement_action", pointer), ca, m.ambient_dim, k);
  if (orthonormality_error(m.domain_basis) > kBasisTolerance)
    throw InvalidInput("domain_basis columns are not orthonormal", db);
  if (orthonormality_error(m.complement_basis) > kBasisTolerance)
    throw InvalidInput("complement_basis columns are not orthonormal", cb);
  m.epsilon = optional_number(j, "epsilon", pointer);
  if (m.epsilon && !(*m.epsilon > 0.0))
    throw InvalidInput("epsilon must be > 0", child(pointer, "epsilon"));
  return m;
}

Json matrix_instance_json(const MatrixInstance& m) {
  Json j;
  j["ambient_dim"] = m.ambient_dim;
  j["domain_basis"] = to_json(m.domain_basis);
  j["domain_action"] = to_json(m.domain_action);
  j["complement_basis"] = to_json(m.complement_basis);
  j["complement_action"] = to_json(m.complement_action);
  if (m.epsilon) j["epsilon"] = *m.epsilon;
  return j;
}

PotentialSpec parse_potential(const Json& j, const std::string& pointer) {
  if (j.is_number()) return PotentialSpec::constant(number(j, pointer));
  const Json& kind = require_key(j, "kind", pointer);
  if (!kind.is_string()) throw InvalidInput("kind must be a string", child(pointer, "kind"));
  const std::string k = kind.get<std::string>();
  try {
    if (k == "constant") {
      reject_unknown(j, {"kind", "value"}, pointer);
      return PotentialSpec::constant(
          number(require_key(j, "value", pointer), child(pointer, "value")));
    }
    if (k == "expression") {
      reject_unknown(j, {"kind", "terms", "lower", "upper"}, pointer);
      const FuncExpr f =
          parse_terms(require_key(j, "terms", pointer), child(pointer, "terms"), half_line());
      return PotentialSpec::expression(
          f, number(require_key(j, "lower", pointer), child(pointer, "lower")),
          number(require_key(j, "upper", pointer), child(pointer, "upper")));
    }
    if (k == "grid") {
      reject_unknown(j, {"kind", "x", "values", "lower", "upper"}, pointer);
      const Json& xs = require_key(j, "x", pointer);
      const Json& vs = require_key(j, "values", pointer);
      if (!xs.is_array() || !vs.is_array() || xs.size() != vs.size() || xs.size() < 2)
        throw InvalidInput("grid potential needs arrays x and values of equal length >= 2",
                           child(pointer, "values"));
      std::vector<double> nodes;
      std::vector<cplx> values;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        nodes.push_back(number(xs[i], child(child(pointer, "x"), i)));
        values.push_back(number(vs[i], child(child(pointer, "values"), i)));
      }
      return PotentialSpec::grid(
          GridFunction(std::move(nodes), std::move(values)),
          number(require_key(j, "lower", pointer), child(pointer, "lower")),
          number(require_key(j, "upper", pointer), child(pointer, "upper")));
    }
  } catch (const InvalidInput& e) {
    if (!e.field().empty() && e.field() != "potential") throw;
    throw InvalidInput(e.what(), pointer);
  }
  throw InvalidInput("kind must be constant, expression or grid", child(pointer, "kind"));
}

SchrodingerInstance parse_schrodinger_instance(const Json& j, const std::string& pointer) {
  reject_unknown(j, {"potential", "v", "ell", "truncation_L"}, pointer);
  SchrodingerInstance s;
  s.potential_json = require_key(j, "potential", pointer);
  s.potential = parse_potential(s.potential_json, child(pointer, "potential"));
  s.v = parse_terms(require_key(j, "v", pointer), child(pointer, "v"), half_line());
  s.ell = parse_terms(require_key(j, "ell", pointer), child(pointer, "ell"), half_line());
  s.truncation_L = optional_number(j, "truncation_L", pointer);
  return s;
}

IntegrationPath parse_path(const std::string& s, const std::string& pointer) {
  if (s == "automatic") return IntegrationPath::automatic;
  if (s == "closed_form") return IntegrationPath::closed_form;
  if (s == "quadrature") return IntegrationPath::quadrature;
  throw InvalidInput("path must be automatic, closed_form or quadrature", pointer);
}

std::string to_string(IntegrationPath p) {
  switch (p) {
    case IntegrationPath::automatic: return "automatic";
    case IntegrationPath::closed_form: return "closed_form";
    case IntegrationPath::quadrature: return "quadrature";
  }
  return "?";
}

FirstOrderInstance parse_first_order_instance(const Json& j, const std::string& pointer) {
  reject_unknown(j, {"gamma", "v", "ell", "path"}, pointer);
  FirstOrderInstance f;
  f.gamma = number(require_key(j, "gamma", pointer), child(pointer, "gamma"));
  if (!(f.gamma > 0.0)) throw InvalidInput("gamma must be > 0", child(pointer, "gamma"));
  f.v = parse_terms(require_key(j, "v", pointer), child(pointer, "v"), unit_interval(), f.gamma);
  f.ell =
      parse_terms(require_key(j, "ell", pointer), child(pointer, "ell"), unit_interval(), f.gamma);
  if (auto it = j.find("path"); it != j.end()) {
    if (!it->is_string()) throw InvalidInput("path must be a string", child(pointer, "path"));
    f.path = parse_path(it->get<std::string>(), child(pointer, "path"));
  }
  return f;
}

Tolerances parse_tolerances(const Json& j, const std::string& pointer) {
  reject_unknown(j, {"epsilon", "tol"}, pointer);
  Tolerances t;
  t.epsilon = optional_number(j, "epsilon", pointer);
  t.tol = optional_number(j, "tol", pointer);
  if (t.epsilon && !(*t.epsilon > 0.0))
    throw InvalidInput("epsilon must be > 0", child(pointer, "epsilon"));
  if (t.tol && !(*t.tol > 0.0)) throw InvalidInput("tol must be > 0", child(pointer, "tol"));
  return t;
}

Json instance_section(const Json& file, const std::string& kind, Tolerances& tol) {
  reject_unknown(file, {"schema_version", "matrix", "schrodinger", "first_order", "tolerances"},
                 "");
  const Json& version = require_key(file, "schema_version", "");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
    throw InvalidInput("unsupported schema_version (expected " + std::to_string(kSchemaVersion) +
                           ")",
                       "/schema_version");
  int sections = 0;
  for (const char* k : {"matrix", "schrodinger", "first_order"}) sections += file.contains(k);
  if (sections != 1)
    throw InvalidInput("exactly one of matrix, schrodinger, first_order is required", "");
  if (!file.contains(kind))
    throw InvalidInput("this command needs a '" + kind + "' instance", "/" + kind);
  if (auto it = file.find("tolerances"); it != file.end())
    tol = parse_tolerances(*it, "/tolerances");
  return file.at(kind);
}

// -------------------------------------------------------------- reports

Json report_json(const CheckReport& r) {
  Json j;
  j["decision"] = std::string(to_string(r.decision));
  j["criterion_margin"] = num(r.criterion_margin);
  j["oracle_margin"] = num(r.oracle_margin);
  j["oracle_decision"] = std::string(to_string(r.oracle_decision));
  j["agreement"] = r.agreement;
  j["epsilon_used"] = num(r.epsilon_used);
  j["band"] = num(r.band);
  j["va_spectrum"] = to_json(r.va_spectrum);
  j["m_norm"] = num(r.m_norm);
  j["r_norm"] = num(r.r_norm);
  j["schur_identity_error"] = num(r.schur_identity_error);
  return j;
}

Json report_json(const AccretivityReport& r) {
  Json j;
  j["decision"] = std::string(to_accretive_string(r.decision));
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["margin"] = num(r.margin);
  j["band"] = num(r.band);
  j["v0"] = to_json(r.v0);
  j["ell_prime_0"] = to_json(r.ell_prime_0);
  j["eta_prime_0"] = num(r.eta_prime_0);
  return j;
}

Json report_json(const WStarMembership& m) {
  Json j;
  j["in_domain"] = m.in_domain;
  j["c"] = to_json(m.c);
  j["h_in_H10"] = m.h_H10_ok;
  j["h"] = to_json(m.h);
  j["v_leading_exponent"] = num(m.v_leading);
  j["h_leading_exponent"] = num(m.h_leading);
  j["h_prime_leading_exponent"] = num(m.h_prime_leading);
  j["reason"] = m.reason;
  return j;
}

Json report_json(const DissipativityReport& r) {
  Json j;
  j["decision"] = std::string(to_string(r.decision));
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["margin"] = num(r.margin);
  j["band"] = num(r.band);
  j["path"] = to_string(r.path_used);
  j["membership"] = report_json(r.membership);
  return j;
}

Json report_json(const EtaSolution& e) {
  Json j;
  j["eta_prime_0"] = num(e.eta_prime_0);
  j["truncation_L"] = num(e.truncation_L);
  j["step"] = num(e.step);
  j["nodes"] = e.nodes.size();
  j["seed_sensitivity"] = num(e.seed_sensitivity);
  j["step_error"] = num(e.step_error);
  j["tolerance_achieved"] = num(e.tolerance_achieved);
  j["residual"] = num(e.residual);
  return j;
}

Json report_json(const CrossValidationReport& r) {
  Json j;
  j["analytic_margin"] = num(r.analytic_margin);
  j["analytic_decision"] = std::string(to_string(r.analytic_decision));
  j["resolvable"] = r.resolvable;
  j["sign_stable"] = r.sign_stable;
  j["agrees"] = r.agrees;
  j["no_convergence"] = r.no_convergence;
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"cells", row.cells},
                    {"h", num(row.h)},
                    {"unknowns", row.unknowns},
                    {"grid_margin", num(row.grid_margin)},
                    {"min_eigenvalue", num(row.min_eigenvalue)},
                    {"decision", std::string(to_string(row.decision))}});
  j["ladder"] = rows;
  return j;
}

Json report_json(const ClosabilityReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n},
                    {"norm_sq", row.norm_sq.str()},
                    {"form", row.form.str()},
                    {"form_diff_next", row.form_diff.str()},
                    {"norm_sq_quadrature", num(row.norm_sq_quadrature)},
                    {"form_quadrature", num(row.form_quadrature)}});
  return Json{{"rows", rows}};
}

// ---------------------------------------------------------------- scans

std::vector<double> coefficient_grid(double from, double to, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidInput("step must be > 0", "step");
  if (!std::isfinite(from) || !std::isfinite(to)) throw InvalidInput("range must be finite", "from");
  std::vector<double> cs;
  if (to < from) return cs;
  const auto n = static_cast<long long>(std::floor((to - from) / step + 1e-9));
  if (n > 10'000'000) throw InvalidInput("scan grid too large", "step");
  for (long long i = 0; i <= n; ++i) {
    // drop accumulated rounding so that 0 + 53 * 0.1 reads as 5.3
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", from + static_cast<double>(i) * step);
    cs.push_back(std::strtod(buf, nullptr));
  }
  return cs;
}

namespace {

ScanRow scan_row(const SingularParams& p, double c, const FuncExpr& v, const FuncExpr& ell,
                 double band) {
  ScanRow row;
  row.gamma = p.gamma();
  row.c = c;
  try {
    DissipativityOptions opt;
    opt.relative_band = band;
    const auto r = dissipativity_check(v, ell, p, opt);
    row.lhs = r.lhs;
    row.rhs = r.rhs;
    row.margin = r.margin;
    row.decision = std::string(to_string(r.decision));
  } catch (const Error& e) {
    row.lhs = row.rhs = row.margin = std::nan("");
    row.decision = "error";
    row.message = e.what();
  }
  return row;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::vector<ScanRow> scan_coefficient(const SingularParams& p, const FuncExpr& v,
                                      const FuncExpr& w, const std::vector<double>& cs,
                                      double relative_band) {
  std::vector<ScanRow> rows;
  for (double c : cs) rows.push_back(scan_row(p, c, v, w * cplx(c), relative_band));
  return rows;
}

std::vector<ScanRow> scan_gamma(const std::vector<double>& gammas, double c,
                                double relative_band) {
  std::vector<ScanRow> rows;
  for (double g : gammas) {
    const SingularParams p(g);
    const FuncExpr v = FuncExpr::term(unit_interval(), 1.0, g);
    const FuncExpr ell = FuncExpr::term(unit_interval(), cplx(0.0, c), g);
    rows.push_back(scan_row(p, c, v, ell, relative_band));
  }
  return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string out = "gamma,c,lhs,rhs,margin,decision,message\n";
  for (const auto& r : rows)
    out += format_double(r.gamma) + "," + format_double(r.c) + "," + format_double(r.lhs) + "," +
           format_double(r.rhs) + "," + format_double(r.margin) + "," + r.decision + "," +
           csv_field(r.message) + "\n";
  return out;
}

Json scan_json(const std::vector<ScanRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows)
    out.push_back({{"gamma", num(r.gamma)},
                   {"c", num(r.c)},
                   {"lhs", num(r.lhs)},
                   {"rhs", num(r.rhs)},
                   {"margin", num(r.margin)},
                   {"decision", r.decision},
                   {"message", r.message}});
  return out;
}

std::string cross_validation_csv(const CrossValidationReport& r) {
  std::string out = "cells,h,unknowns,grid_margin,min_eigenvalue,decision\n";
  for (const auto& row : r.rows)
    out += std::to_string(row.cells) + "," + format_double(row.h) + "," +
           std::to_string(row.unknowns) + "," + format_double(row.grid_margin) + "," +
           format_double(row.min_eigenvalue) + "," + std::string(to_string(row.decision)) + "\n";
  return out;
}

std::string closability_csv(const ClosabilityReport& r) {
  std::string out = "n,norm_sq,form,form_diff_next,norm_sq_quadrature,form_quadrature\n";
  for (const auto& row : r.rows)
    out += std::to_string(row.n) + "," + row.norm_sq.str() + "," + row.form.str() + "," +
           row.form_diff.str() + "," + format_double(row.norm_sq_quadrature) + "," +
           format_double(row.form_quadrature) + "\n";
  return out;
}

}  // namespace dissext
