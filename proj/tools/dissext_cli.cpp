// dissext: command-line front end.
//
// Exit status: 0 dissipative/accretive, 1 not, 2 boundary, 3 domain
// violation, 4 input or numerical error. Reports go to stdout, a one-line
// summary to stderr.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dissext/errors.hpp"
#include "dissext/io.hpp"

using namespace dissext;

namespace {

enum Exit { kOk = 0, kNot = 1, kBoundary = 2, kDomain = 3, kInput = 4 };

int exit_code(Decision d) {
  switch (d) {
    case Decision::dissipative: return kOk;
    case Decision::not_dissipative: return kNot;
    case Decision::boundary: return kBoundary;
  }
  return kInput;
}

struct Output {
  std::string format;  // json | csv | text
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void json(const std::string& command, Json input, Json result) const {
    Json doc;
    doc["command"] = command;
    doc["input"] = std::move(input);
    doc["result"] = std::move(result);
    doc["meta"] = {{"tool_version", kToolVersion},
                   {"wall_time_s", std::chrono::duration<double>(
                                       std::chrono::steady_clock::now() - start)
                                       .count()}};
    std::cout << doc.dump(2) << "\n";
  }

  // Scalar fields of a flat result object, as key,value or key: value lines.
  void flat(const Json& result) const {
    if (format == "csv") std::cout << "field,value\n";
    for (auto it = result.begin(); it != result.end(); ++it) {
      if (it->is_structured()) continue;
      const std::string value = it->is_string() ? it->get<std::string>() : it->dump();
      if (format == "csv")
        std::cout << it.key() << "," << value << "\n";
      else
        std::cout << it.key() << ": " << value << "\n";
    }
  }

  void emit(const std::string& command, Json input, Json result) const {
    if (format == "json")
      json(command, std::move(input), std::move(result));
    else
      flat(result);
  }
};

FuncExpr terms_from_flag(const std::string& text, const std::string& flag, Interval iv,
                         std::optional<double> gamma) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    throw InvalidInput("malformed JSON term list", flag);
  }
  return parse_terms(j, flag, iv, gamma);
}

std::vector<double> number_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size() || !std::isfinite(x))
      throw InvalidInput("expected a comma-separated list of numbers", flag);
    out.push_back(x);
  }
  return out;
}

void require_positive(std::optional<double> x, const std::string& flag) {
  if (x && !(*x > 0.0)) throw InvalidInput(flag + " must be > 0", flag);
}

// ------------------------------------------------------------ commands

struct CommonFlags {
  std::string input;
  std::optional<double> epsilon;
  std::optional<double> tol;
};

int run_check_matrix(const CommonFlags& f, const Output& out) {
  if (f.input.empty()) throw InvalidInput("check matrix needs --input FILE", "--input");
  Tolerances tol;
  const Json file = read_json_file(f.input);
  const MatrixInstance m = parse_matrix_instance(instance_section(file, "matrix", tol), "/matrix");
  std::optional<double> epsilon = f.epsilon ? f.epsilon : tol.epsilon ? tol.epsilon : m.epsilon;
  const std::optional<double> rel_band = f.tol ? f.tol : tol.tol;

  const PartialOperator op(m.domain_basis, m.domain_action);
  const ExtensionSpec ext(op, m.complement_basis, m.complement_action);
  Json input = matrix_instance_json(m);
  Json result;
  result["rebased_complement"] = ext.was_rebased();
  int code = kInput;
  try {
    std::optional<double> band;
    if (rel_band) {
      const auto a = assemble_criterion(op, ext, epsilon);
      const double s = std::max(a.R.operatorNorm(), (0.25 * a.M.adjoint() * a.M).operatorNorm());
      band = *rel_band * s;
    }
    const CheckReport r = criterion_check(op, ext, epsilon, band);
    result["criterion_applicable"] = true;
    result.update(report_json(r));
    code = exit_code(r.decision);
    std::cerr << "matrix: " << to_string(r.decision) << " (criterion margin "
              << format_double(r.criterion_margin) << ", oracle margin "
              << format_double(r.oracle_margin) << ")\n";
  } catch (const StrictPositivityViolated& e) {
    const ComplexMatrix g = oracle_gram(op, ext);
    const double margin = psd_margin(g);
    const double band = rel_band ? *rel_band * g.norm() : default_band(g);
    const Decision d = classify(margin, band);
    result["criterion_applicable"] = false;
    result["reason"] = e.what();
    result["decision"] = std::string(to_string(d));
    result["oracle_margin"] = margin;
    result["oracle_decision"] = std::string(to_string(d));
    result["band"] = band;
    result["epsilon_used"] = e.epsilon();
    result["va_min_eigenvalue"] = e.min_eigenvalue();
    code = exit_code(d);
    std::cerr << "matrix: criterion inapplicable (" << e.what() << "); oracle says "
              << to_string(d) << "\n";
  }
  out.emit("check matrix", std::move(input), std::move(result));
  return code;
}

struct SchrodingerFlags {
  std::string potential, v, ell;
  std::optional<double> L;
};

int run_check_schrodinger(const CommonFlags& f, const SchrodingerFlags& s, const Output& out) {
  require_positive(s.L, "--truncation-L");
  Tolerances tol;
  SchrodingerInstance inst;
  bool have_v = false;
  if (!f.input.empty()) {
    const Json file = read_json_file(f.input);
    inst = parse_schrodinger_instance(instance_section(file, "schrodinger", tol), "/schrodinger");
    have_v = true;
  }
  if (!s.potential.empty()) {
    inst.potential_json = parse_json_text(s.potential, "--potential");
    inst.potential = parse_potential(inst.potential_json, "--potential");
  } else if (f.input.empty()) {
    inst.potential_json = 1.0;
  }
  if (!s.v.empty()) {
    inst.v = terms_from_flag(s.v, "--v", half_line(), {});
    have_v = true;
  }
  if (!s.ell.empty())
    inst.ell = terms_from_flag(s.ell, "--ell", half_line(), {});
  else if (f.input.empty())
    inst.ell = FuncExpr::zero(half_line());
  if (!have_v) throw InvalidInput("check schrodinger needs --v or --input", "--v");
  if (s.L) inst.truncation_L = s.L;
  const double eta_tol = f.tol ? *f.tol : tol.tol.value_or(1e-10);

  const EtaSolution eta = solve_eta(inst.potential, inst.truncation_L, eta_tol);
  const AccretivityReport r = accretive_check(inst.v, inst.ell, inst.potential, eta.eta_prime_0);
  Json input;
  input["potential"] = inst.potential_json;
  input["v"] = to_json(inst.v);
  input["ell"] = to_json(inst.ell);
  input["truncation_L"] = eta.truncation_L;
  input["tol"] = eta_tol;
  Json result = report_json(r);
  result["eta"] = report_json(eta);
  std::cerr << "schrodinger: " << to_accretive_string(r.decision) << " (lhs "
            << format_double(r.lhs) << ", rhs " << format_double(r.rhs) << ")\n";
  out.emit("check schrodinger", std::move(input), std::move(result));
  return exit_code(r.decision);
}

struct FirstOrderFlags {
  std::optional<double> gamma;
  std::string v, ell, path;
};

int run_check_first_order(const CommonFlags& f, const FirstOrderFlags& fo, const Output& out) {
  Tolerances tol;
  FirstOrderInstance inst;
  Json raw_v, raw_ell;
  if (!f.input.empty()) {
    const Json file = read_json_file(f.input);
    const Json& sec = instance_section(file, "first_order", tol);
    inst = parse_first_order_instance(sec, "/first_order");
    raw_v = sec.at("v");
    raw_ell = sec.at("ell");
  }
  if (fo.gamma) {
    if (!(*fo.gamma > 0.0)) throw InvalidInput("gamma must be > 0", "--gamma");
    inst.gamma = *fo.gamma;
    if (!f.input.empty()) {  // re-resolve gamma-relative exponents
      inst.v = parse_terms(raw_v, "/first_order/v", unit_interval(), inst.gamma);
      inst.ell = parse_terms(raw_ell, "/first_order/ell", unit_interval(), inst.gamma);
    }
  } else if (f.input.empty()) {
    throw InvalidInput("check first-order needs --gamma or --input", "--gamma");
  }
  const SingularParams p(inst.gamma);
  if (!fo.v.empty()) inst.v = terms_from_flag(fo.v, "--v", unit_interval(), inst.gamma);
  if (!fo.ell.empty()) inst.ell = terms_from_flag(fo.ell, "--ell", unit_interval(), inst.gamma);
  if (f.input.empty()) {
    if (fo.v.empty()) throw InvalidInput("check first-order needs --v", "--v");
    if (fo.ell.empty()) inst.ell = FuncExpr::zero(unit_interval());
  }
  if (!fo.path.empty()) inst.path = parse_path(fo.path, "--path");

  DissipativityOptions opt;
  opt.path = inst.path;
  opt.relative_band = f.tol ? *f.tol : tol.tol.value_or(1e-9);
  Json input;
  input["gamma"] = inst.gamma;
  input["v"] = to_json(inst.v);
  input["ell"] = to_json(inst.ell);
  input["path"] = to_string(inst.path);
  input["relative_band"] = opt.relative_band;

  const DissipativityReport r = dissipativity_check(inst.v, inst.ell, p, opt);
  std::cerr << "first-order: " << to_string(r.decision) << " (lhs " << format_double(r.lhs)
            << ", rhs " << format_double(r.rhs) << ")\n";
  out.emit("check first-order", std::move(input), report_json(r));
  return exit_code(r.decision);
}

struct ScanFlags {
  std::optional<double> gamma, from, to, step, c;
  std::string gammas, v, direction;
};

int run_scan(const CommonFlags& f, const ScanFlags& s, const Output& out) {
  const double band = f.tol.value_or(1e-9);
  std::vector<ScanRow> rows;
  Json input;
  input["relative_band"] = band;
  if (!s.gammas.empty()) {
    if (!s.c) throw InvalidInput("a gamma sweep needs --c", "--c");
    const auto gs = number_list(s.gammas, "--gammas");
    for (std::size_t i = 0; i < gs.size(); ++i)
      if (!(gs[i] > 0.0)) throw InvalidInput("gamma must be > 0", "--gammas/" + std::to_string(i));
    rows = scan_gamma(gs, *s.c, band);
    input["gammas"] = gs;
    input["c"] = *s.c;
  } else {
    if (!s.gamma) throw InvalidInput("scan first-order needs --gamma or --gammas", "--gamma");
    if (!(*s.gamma > 0.0)) throw InvalidInput("gamma must be > 0", "--gamma");
    if (!s.from || !s.to || !s.step)
      throw InvalidInput("a coefficient scan needs --from, --to and --step", "--step");
    if (!(*s.step > 0.0)) throw InvalidInput("step must be > 0", "--step");
    const SingularParams p(*s.gamma);
    const FuncExpr v = s.v.empty() ? FuncExpr::term(unit_interval(), 1.0, p.gamma())
                                   : terms_from_flag(s.v, "--v", unit_interval(), p.gamma());
    const FuncExpr w = s.direction.empty()
                           ? FuncExpr::term(unit_interval(), cplx(0.0, 1.0), p.gamma())
                           : terms_from_flag(s.direction, "--direction", unit_interval(),
                                             p.gamma());
    rows = scan_coefficient(p, v, w, coefficient_grid(*s.from, *s.to, *s.step), band);
    input["gamma"] = p.gamma();
    input["v"] = to_json(v);
    input["direction"] = to_json(w);
    input["from"] = *s.from;
    input["to"] = *s.to;
    input["step"] = *s.step;
  }
  std::cerr << "scan: " << rows.size() << " rows\n";
  if (out.format == "json")
    out.json("scan first-order", std::move(input), scan_json(rows));
  else
    std::cout << scan_csv(rows);
  return kOk;
}

int run_eta(const CommonFlags& f, const SchrodingerFlags& s, const Output& out) {
  require_positive(s.L, "--truncation-L");
  Tolerances tol;
  Json pot_json = 1.0;
  PotentialSpec pot = PotentialSpec::constant(1.0);
  std::optional<double> L = s.L;
  if (!f.input.empty()) {
    const Json file = read_json_file(f.input);
    const Json& sec = instance_section(file, "schrodinger", tol);
    pot_json = sec.at("potential");
    pot = parse_potential(pot_json, "/schrodinger/potential");
    if (!L && sec.contains("truncation_L"))
      L = parse_schrodinger_instance(sec, "/schrodinger").truncation_L;
  }
  if (!s.potential.empty()) {
    pot_json = parse_json_text(s.potential, "--potential");
    pot = parse_potential(pot_json, "--potential");
  }
  const double eta_tol = f.tol ? *f.tol : tol.tol.value_or(1e-10);
  const EtaSolution eta = solve_eta(pot, L, eta_tol);
  Json input{{"potential", pot_json}, {"truncation_L", eta.truncation_L}, {"tol", eta_tol}};
  Json result = report_json(eta);
  result["krein_form_eta"] = krein_form(eta, pot);
  std::cerr << "eta'(0) = " << format_double(eta.eta_prime_0) << "\n";
  out.emit("eta", std::move(input), std::move(result));
  return kOk;
}

struct ValidateFlags {
  std::string id;
  std::string cells = "2048,4096,8192";
  int depth = 40;
};

int run_validate(const ValidateFlags& v, const Output& out) {
  if (v.depth < 0 || v.depth > 200) throw InvalidInput("mesh depth must lie in [0, 200]", "--mesh-depth");
  const RegressionCase c = regression_case(v.id);
  std::vector<int> ladder;
  for (double x : number_list(v.cells, "--cells")) {
    if (x < 8 || x > 1 << 22 || x != std::floor(x))
      throw InvalidInput("cell counts must be integers in [8, 4194304]", "--cells");
    ladder.push_back(static_cast<int>(x));
  }
  const auto r = cross_validate(c.v, c.ell, SingularParams(c.gamma), ladder, v.depth);
  Json input{{"case", c.id},        {"description", c.description}, {"gamma", c.gamma},
             {"v", to_json(c.v)},   {"ell", to_json(c.ell)},         {"cells", ladder},
             {"mesh_depth", v.depth}};
  std::cerr << "validate " << c.id << ": analytic " << to_string(r.analytic_decision)
            << (r.resolvable ? (r.no_convergence ? ", grid disagrees" : ", grid agrees")
                             : ", not resolvable on the grid")
            << "\n";
  if (out.format == "csv")
    std::cout << cross_validation_csv(r);
  else
    out.emit("validate", std::move(input), report_json(r));
  return r.no_convergence ? kInput : exit_code(r.analytic_decision);
}

int run_closability(const std::string& ns_text, const Output& out) {
  std::vector<long long> ns;
  for (double x : number_list(ns_text, "--n")) {
    if (x < 1 || x > 1e6 || x != std::floor(x))
      throw InvalidInput("n must be an integer in [1, 1000000]", "--n");
    ns.push_back(static_cast<long long>(x));
  }
  const auto r = closability_falsifier(ns);
  std::cerr << "closability: ||f_n||^2 -> 0 while q(f_n) = 1/2 and q(f_n - f_m) = 0\n";
  if (out.format == "csv") {
    std::cout << closability_csv(r);
  } else if (out.format == "text") {
    for (const auto& row : r.rows)
      std::cout << "n=" << row.n << "  ||f_n||^2=" << row.norm_sq.str()
                << "  q(f_n)=" << row.form.str() << "  q(f_n - f_m)=" << row.form_diff.str()
                << "\n";
  } else {
    out.json("demo closability", Json{{"n", ns}}, report_json(r));
  }
  return kOk;
}

Json error_json(const std::string& type, const std::string& message, const std::string& field) {
  Json e{{"type", type}, {"message", message}};
  if (!field.empty()) e["field"] = field;
  return Json{{"error", e}};
}

int fail(int code, const std::string& type, const std::string& message,
         const std::string& field = {}) {
  std::cout << error_json(type, message, field).dump(2) << "\n";
  std::cerr << "error (" << type << "): " << message;
  if (!field.empty()) std::cerr << " [at " << field << "]";
  std::cerr << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissipativity and accretivity checks for operator extensions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Output out;
  std::string format;
  app.add_option("--format", format, "json | csv | text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  app.fallthrough();

  CommonFlags common;
  SchrodingerFlags sch;
  FirstOrderFlags fo;
  ScanFlags scan;
  ValidateFlags val;
  std::string closability_ns = "1,10,100,1000";

  auto* check = app.add_subcommand("check", "decide one extension");
  check->require_subcommand(1);
  check->fallthrough();
  auto* cm = check->add_subcommand("matrix", "finite-dimensional instance");
  cm->add_option("--input", common.input, "instance JSON file")->required();
  cm->add_option("--epsilon", common.epsilon, "strict positivity margin for VA");
  cm->add_option("--tol", common.tol, "relative boundary band");

  auto* cs = check->add_subcommand("schrodinger", "half-line Schrodinger extension");
  cs->add_option("--input", common.input, "instance JSON file");
  cs->add_option("--potential", sch.potential, "number or potential JSON");
  cs->add_option("--v", sch.v, "term list JSON");
  cs->add_option("--ell", sch.ell, "term list JSON");
  cs->add_option("--truncation-L", sch.L, "truncation length for eta");
  cs->add_option("--tol", common.tol, "eta solver tolerance");

  auto* cf = check->add_subcommand("first-order", "singular first-order extension on (0, 1)");
  cf->add_option("--input", common.input, "instance JSON file");
  cf->add_option("--gamma", fo.gamma, "gamma > 0");
  cf->add_option("--v", fo.v, "term list JSON");
  cf->add_option("--ell", fo.ell, "term list JSON");
  cf->add_option("--path", fo.path, "automatic | closed_form | quadrature");
  cf->add_option("--tol", common.tol, "relative boundary band");

  auto* sc = app.add_subcommand("scan", "parameter sweeps");
  sc->require_subcommand(1);
  sc->fallthrough();
  auto* sf = sc->add_subcommand("first-order", "sweep l = c w or gamma");
  sf->add_option("--gamma", scan.gamma, "gamma > 0");
  sf->add_option("--from", scan.from, "first coefficient");
  sf->add_option("--to", scan.to, "last coefficient");
  sf->add_option("--step", scan.step, "coefficient step");
  sf->add_option("--v", scan.v, "term list JSON (default x^gamma)");
  sf->add_option("--direction", scan.direction, "term list JSON w (default i x^gamma)");
  sf->add_option("--gammas", scan.gammas, "comma-separated gammas for a gamma sweep");
  sf->add_option("--c", scan.c, "fixed coefficient for a gamma sweep");
  sf->add_option("--tol", common.tol, "relative boundary band");

  auto* et = app.add_subcommand("eta", "decaying solution of eta'' = V eta");
  et->add_option("--input", common.input, "instance JSON file with a schrodinger section");
  et->add_option("--potential", sch.potential, "number or potential JSON");
  et->add_option("--truncation-L", sch.L, "truncation length");
  et->add_option("--tol", common.tol, "solver tolerance");

  auto* va = app.add_subcommand("validate", "grid cross-validation of a stored case");
  va->add_option("--case", val.id, "case id")->required();
  va->add_option("--cells", val.cells, "comma-separated uniform cell counts");
  va->add_option("--mesh-depth", val.depth, "geometric grading levels toward 0");

  auto* de = app.add_subcommand("demo", "demonstrations");
  de->require_subcommand(1);
  de->fallthrough();
  auto* dc = de->add_subcommand("closability", "non-closable form counterexample");
  dc->add_option("--n", closability_ns, "comma-separated hat-function indices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kInput, "UsageError", e.what());
  }

  const bool is_scan = sc->parsed();
  out.format = !format.empty() ? format : is_scan ? "csv" : "json";
  try {
    if (cm->parsed()) return run_check_matrix(common, out);
    if (cs->parsed()) return run_check_schrodinger(common, sch, out);
    if (cf->parsed()) return run_check_first_order(common, fo, out);
    if (sf->parsed()) return run_scan(common, scan, out);
    if (et->parsed()) return run_eta(common, sch, out);
    if (va->parsed()) return run_validate(val, out);
    if (dc->parsed()) return run_closability(closability_ns, out);
  } catch (const InvalidInput& e) {
    return fail(kInput, "InvalidInput", e.what(), e.field());
  } catch (const NotInWStarDomain& e) {
    return fail(kDomain, "NotInWStarDomain", e.what());
  } catch (const NonIntegrableSingularity& e) {
    return fail(kDomain, "NonIntegrableSingularity", e.what());
  } catch (const DomainViolation& e) {
    return fail(kDomain, "DomainViolation", e.what());
  } catch (const NonHermitian& e) {
    return fail(kInput, "NonHermitian", e.what());
  } catch (const NumericalFailure& e) {
    return fail(kInput, "NumericalFailure", e.what());
  } catch (const Error& e) {
    return fail(kInput, "Error", e.what());
  } catch (const std::exception& e) {
    return fail(kInput, "InternalError", e.what());
  }
  return fail(kInput, "UsageError", "no command given");
}
