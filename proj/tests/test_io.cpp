#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "dissext/errors.hpp"
#include "dissext/io.hpp"
#include "generators.hpp"

using namespace dissext;

namespace {

// field() of the InvalidInput raised by f, or "<none>"
template <class F>
std::string failing_field(F&& f) {
  try {
    f();
  } catch (const InvalidInput& e) {
    return e.field();
  }
  return "<none>";
}

Json matrix_doc() {
  return Json::parse(R"({
    "ambient_dim": 2,
    "domain_basis": [[[1, 0]], [[0, 0]]],
    "domain_action": [[[0, 1]], [[0, 0]]],
    "complement_basis": [[[0, 0]], [[1, 0]]],
    "complement_action": [[[1, 0]], [[0, 1]]]
  })");
}

}  // namespace

TEST_CASE("complex numbers") {
  CHECK(parse_complex(Json::parse("[1.5, -2]"), "/z") == cplx(1.5, -2.0));
  CHECK(failing_field([] { parse_complex(Json::parse("[1]"), "/z"); }) == "/z");
  CHECK(failing_field([] { parse_complex(Json::parse(R"([1, "a"])"), "/z"); }) == "/z");
  CHECK(failing_field([] { parse_complex(Json::parse("1"), "/z"); }) == "/z");
}

TEST_CASE("matrix instances") {
  const auto m = parse_matrix_instance(matrix_doc(), "/matrix");
  CHECK(m.ambient_dim == 2);
  CHECK(m.domain_action(0, 0) == cplx(0, 1));

  SUBCASE("errors point at the offending field") {
    Json j = matrix_doc();
    j["domain_action"][0][0] = "x";
    CHECK(failing_field([&] { parse_matrix_instance(j, "/matrix"); }) ==
          "/matrix/domain_action/0/0");
    j = matrix_doc();
    j["extra"] = 1;
    CHECK(failing_field([&] { parse_matrix_instance(j, "/matrix"); }) == "/matrix/extra");
    j = matrix_doc();
    j.erase("complement_action");
    CHECK(failing_field([&] { parse_matrix_instance(j, "/matrix"); }) ==
          "/matrix/complement_action");
    j = matrix_doc();
    j["domain_basis"] = Json::parse("[[[2, 0]], [[0, 0]]]");
    CHECK(failing_field([&] { parse_matrix_instance(j, "/matrix"); }) == "/matrix/domain_basis");
    j = matrix_doc();
    j["ambient_dim"] = 1;
    CHECK(failing_field([&] { parse_matrix_instance(j, "/matrix"); }) == "/matrix/ambient_dim");
    j = matrix_doc();
    j["complement_action"] = Json::parse("[[[1, 0]]]");
    CHECK(failing_field([&] { parse_matrix_instance(j, "/matrix"); }) ==
          "/matrix/complement_action");
    j = matrix_doc();
    j["epsilon"] = -1;
    CHECK(failing_field([&] { parse_matrix_instance(j, "/matrix"); }) == "/matrix/epsilon");
  }

  SUBCASE("round trip") {
    for (int trial = 0; trial < 10; ++trial) {
      const auto inst = gen::instance(gen::integer(2, 6), 1, 1);
      MatrixInstance a;
      a.ambient_dim = inst.D.rows();
      a.domain_basis = inst.D;
      a.domain_action = inst.AD;
      a.complement_basis = inst.V;
      a.complement_action = inst.BV;
      const Json first = matrix_instance_json(a);
      const auto b = parse_matrix_instance(Json::parse(first.dump()), "");
      CHECK(matrix_instance_json(b).dump() == first.dump());
      CHECK((b.domain_action - a.domain_action).norm() == 0.0);
    }
  }
}

TEST_CASE("term lists") {
  const Interval U = unit_interval();
  const auto f = parse_terms(Json::parse(R"([{"c": [1, 0], "alpha": "gamma"},
                                             {"c": [0, 2], "alpha": "gamma+1.5", "beta": 1},
                                             {"c": [3, 0], "alpha": "gamma-0.25"}])"),
                             "/v", U, 2.0);
  // terms come back in canonical (increasing alpha) order
  REQUIRE(f.terms().size() == 3);
  CHECK(f.terms()[0].alpha == 1.75);
  CHECK(f.terms()[1].alpha == 2.0);
  CHECK(f.terms()[2].alpha == 3.5);
  CHECK(f.terms()[2].beta == 1.0);

  CHECK(failing_field([&] {
          parse_terms(Json::parse(R"([{"c": [1, 0], "alpha": "gamma"}])"), "/v", U);
        }) == "/v/0/alpha");
  CHECK(failing_field([&] {
          parse_terms(Json::parse(R"([{"c": [1, 0], "alpha": "gamma*2"}])"), "/v", U, 1.0);
        }) == "/v/0/alpha");
  CHECK(failing_field([&] {
          parse_terms(Json::parse(R"([{"c": [1, 0], "alpha": "gamma+"}])"), "/v", U, 1.0);
        }) == "/v/0/alpha");
  CHECK(failing_field([&] {
          parse_terms(Json::parse(R"([{"c": [1, 0], "alpha": 0, "beta": 1}])"), "/v", half_line());
        }) == "/v/0/beta");
  CHECK(failing_field([&] {
          parse_terms(Json::parse(R"([{"c": [1, 0], "alpha": 0, "gamma": 1}])"), "/v", U);
        }) == "/v/0/gamma");

  SUBCASE("round trip") {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Term> terms;
      for (int k = gen::integer(0, 4); k > 0; --k)
        terms.push_back({cplx(gen::uniform(-3, 3), gen::uniform(-3, 3)), gen::uniform(0, 3),
                         gen::uniform(-2, 2)});
      const FuncExpr a(U, terms);
      const Json first = to_json(a);
      const FuncExpr b = parse_terms(Json::parse(first.dump()), "", U);
      CHECK(to_json(b).dump() == first.dump());
      CHECK((a - b).is_zero());
    }
  }
}

TEST_CASE("potentials") {
  CHECK(parse_potential(Json::parse("2.5"), "/p")(3.0) == 2.5);
  CHECK(parse_potential(Json::parse(R"({"kind": "constant", "value": 1})"), "/p")(0.3) == 1.0);
  const auto g = parse_potential(
      Json::parse(R"({"kind": "grid", "x": [0, 1, 2], "values": [1, 2, 3], "lower": 1, "upper": 3})"),
      "/p");
  CHECK(g(0.5) == doctest::Approx(1.5));
  CHECK(failing_field([] { parse_potential(Json::parse(R"({"kind": "spline"})"), "/p"); }) ==
        "/p/kind");
  CHECK(failing_field([] {
          parse_potential(Json::parse(R"({"kind": "grid", "x": [0, 1], "values": [1],
                                          "lower": 1, "upper": 1})"),
                          "/p");
        }) == "/p/values");
}

TEST_CASE("instance files") {
  Tolerances tol;
  const Json file = Json::parse(R"({"schema_version": 1,
      "first_order": {"gamma": 1, "v": [{"c": [1, 0], "alpha": "gamma"}], "ell": []},
      "tolerances": {"tol": 1e-10}})");
  const Json section = instance_section(file, "first_order", tol);
  CHECK(tol.tol == 1e-10);
  CHECK_FALSE(tol.epsilon.has_value());
  const auto f = parse_first_order_instance(section, "/first_order");
  CHECK(f.gamma == 1.0);
  CHECK(f.path == IntegrationPath::automatic);

  CHECK(failing_field([&] { instance_section(file, "matrix", tol); }) == "/matrix");
  Json bad = file;
  bad["schema_version"] = 2;
  CHECK(failing_field([&] { instance_section(bad, "first_order", tol); }) == "/schema_version");
  bad = file;
  bad["first_order"]["gamma"] = 0;
  CHECK(failing_field([&] { parse_first_order_instance(bad["first_order"], "/first_order"); }) ==
        "/first_order/gamma");
  bad = file;
  bad["first_order"]["path"] = "simpson";
  CHECK(failing_field([&] { parse_first_order_instance(bad["first_order"], "/first_order"); }) ==
        "/first_order/path");
  bad = file;
  bad["tolerances"]["tol"] = 0;
  CHECK(failing_field([&] { instance_section(bad, "first_order", tol); }) == "/tolerances/tol");
  CHECK(failing_field([] { parse_json_text("{", "in.json"); }) == "");
}

TEST_CASE("coefficient grids") {
  CHECK(coefficient_grid(0.0, 8.0, 0.1).size() == 81);
  CHECK(coefficient_grid(0.0, 8.0, 0.1).back() == doctest::Approx(8.0));
  CHECK(coefficient_grid(0.0, 8.0, 0.1)[53] == 5.3);
  CHECK(coefficient_grid(1.0, 0.0, 0.1).empty());
  CHECK(coefficient_grid(2.0, 2.0, 1.0).size() == 1);
  CHECK_THROWS_AS(coefficient_grid(0.0, 1.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(coefficient_grid(0.0, 1.0, -1.0), InvalidInput);
}

TEST_CASE("coefficient scan across the threshold") {
  const SingularParams p(1.0);
  const Interval U = unit_interval();
  const FuncExpr v = FuncExpr::term(U, 1.0, 1.0);
  const FuncExpr w = FuncExpr::term(U, cplx(0, 1), 1.0);
  const auto rows = scan_coefficient(p, v, w, {0.0, 5.0, 16.0 / 3.0, 6.0});
  CHECK(rows[0].decision == "boundary");
  CHECK(rows[1].decision == "dissipative");
  CHECK(rows[2].decision == "boundary");
  CHECK(rows[3].decision == "not_dissipative");
  CHECK(rows[1].margin == doctest::Approx(5.0 / 3.0 - 25.0 / 16.0));

  // error rows instead of exceptions
  const auto bad = scan_coefficient(p, FuncExpr::term(U, 1.0, 0.0), w, {1.0});
  CHECK(bad[0].decision == "error");
  CHECK_FALSE(bad[0].message.empty());

  const std::string csv = scan_csv(rows);
  CHECK(csv.rfind("gamma,c,lhs,rhs,margin,decision,message\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(scan_json(rows).size() == 4);

  const auto gs = scan_gamma({0.5, 1.0, 2.0}, 3.0);
  CHECK(gs[0].decision == "boundary");  // c = 3 is the threshold at gamma = 1/2
  CHECK(gs[1].decision == "dissipative");
  CHECK(gs[2].decision == "dissipative");
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  for (int trial = 0; trial < 200; ++trial) {
    const double x = gen::uniform(-1, 1) * std::pow(10.0, gen::integer(-30, 30));
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("the shipped instance schema lists exactly the accepted fields") {
  const Json schema = read_json_file(std::string(DISSEXT_SCHEMA_DIR) + "/instance.schema.json");
  const Json& defs = schema.at("$defs");
  const Json valid = Json::parse(R"({
    "matrix": {"ambient_dim": 2, "domain_basis": [[[1, 0]], [[0, 0]]],
               "domain_action": [[[0, 1]], [[0, 0]]], "complement_basis": [[[0, 0]], [[1, 0]]],
               "complement_action": [[[1, 0]], [[0, 1]]], "epsilon": 1e-6},
    "schrodinger": {"potential": 1, "v": [{"c": [1, 0], "alpha": 0, "beta": -1}], "ell": [],
                    "truncation_L": 40},
    "first_order": {"gamma": 1, "v": [{"c": [1, 0], "alpha": "gamma"}], "ell": [],
                    "path": "quadrature"},
    "tolerances": {"epsilon": 1e-6, "tol": 1e-10}
  })");
  const auto parse = [](const std::string& kind, const Json& j) {
    if (kind == "matrix") parse_matrix_instance(j, "");
    if (kind == "schrodinger") parse_schrodinger_instance(j, "");
    if (kind == "first_order") parse_first_order_instance(j, "");
    if (kind == "tolerances") parse_tolerances(j, "");
  };
  for (const std::string kind : {"matrix", "schrodinger", "first_order", "tolerances"}) {
    CAPTURE(kind);
    const Json& props = defs.at(kind).at("properties");
    const Json& doc = valid.at(kind);
    CHECK(props.size() == doc.size());
    for (auto it = props.begin(); it != props.end(); ++it) CHECK(doc.contains(it.key()));
    CHECK_NOTHROW(parse(kind, doc));
    Json extra = doc;
    extra["not_in_schema"] = 0;
    CHECK(failing_field([&] { parse(kind, extra); }) == "/not_in_schema");
    for (const auto& req : defs.at(kind).value("required", Json::array())) {
      Json missing = doc;
      missing.erase(req.get<std::string>());
      CHECK(failing_field([&] { parse(kind, missing); }) == "/" + req.get<std::string>());
    }
  }
  for (auto it = schema.at("properties").begin(); it != schema.at("properties").end(); ++it)
    CHECK((it.key() == "schema_version" || valid.contains(it.key())));
}
