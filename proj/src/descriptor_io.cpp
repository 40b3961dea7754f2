#include "bwb/descriptor_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace bwb {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw PreconditionError("descriptor error at " + (path.empty() ? std::string("/") : path) + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing field \"") + key + "\"");
  return *it;
}

void check_fields(const Json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(path, "unknown field \"" + it.key() + "\"");
  }
}

std::string kind_of(const Json& j, const std::string& path) {
  const Json& k = field(j, "kind", path);
  if (!k.is_string()) fail(path + "/kind", "expected a string");
  return k.get<std::string>();
}

int int_from_json(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

// re-throws PreconditionError raised by constructors with the location attached
template <class F> auto located(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PreconditionError& e) {
    std::string what = e.what();
    if (what.rfind("descriptor error", 0) == 0) throw;
    fail(path, what);
  }
}

const Json& array_field(const Json& j, const char* key, const std::string& path) {
  const Json& a = field(j, key, path);
  if (!a.is_array()) fail(path + "/" + key, "expected an array");
  return a;
}

}  // namespace

Json parse_json(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw PreconditionError(source + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

Rational rational_from_json(const Json& j, const std::string& path) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return Rational(j.get<unsigned long long>());
    return Rational(j.get<long long>());
  }
  if (j.is_number_float()) {
    double x = j.get<double>();
    if (!std::isfinite(x)) fail(path, "non-finite number");
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    std::string s(buf, res.ptr);
    if (s.find('e') != std::string::npos || s.find('E') != std::string::npos) return exact_rational(x);
    return parse_rational(s);
  }
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::exception& e) {
      fail(path, "bad rational \"" + j.get<std::string>() + "\"");
    }
  }
  fail(path, "expected a rational");
}

Json to_json(const Rational& q) { return to_string(q); }

VecQ vector_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rationals");
  VecQ v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = rational_from_json(j[i], path + "/" + std::to_string(i));
  return v;
}

Json to_json(const VecQ& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v[i]));
  return a;
}

MatQ matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
  size_t cols = 0;
  for (size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array()) fail(path + "/" + std::to_string(r), "expected a row array");
    if (r == 0) cols = j[r].size();
    else if (j[r].size() != cols) fail(path + "/" + std::to_string(r), "ragged matrix");
  }
  MatQ m(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) m.row(r) = vector_from_json(j[r], path + "/" + std::to_string(r)).transpose();
  return m;
}

Json to_json(const MatQ& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(VecQ(m.row(r).transpose())));
  return a;
}

Exponent exponent_from_json(const Json& j, const std::string& path) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "c0" || s == "0") {
      try {
        return parse_exponent(s);
      } catch (const PreconditionError& e) {
        fail(path, e.what());
      }
    }
  }
  Rational p = rational_from_json(j, path);
  if (p == 0) return Exponent::c0();
  if (p < 1) fail(path, "p must be at least 1");
  return Exponent::finite(p);
}

Json to_json(const Exponent& p) { return to_string(p); }

namespace {

std::vector<VecQ> vector_list(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of vectors");
  std::vector<VecQ> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(vector_from_json(j[i], path + "/" + std::to_string(i)));
  return out;
}

Json list_to_json(const std::vector<VecQ>& list) {
  Json a = Json::array();
  for (const auto& v : list) a.push_back(to_json(v));
  return a;
}

}  // namespace

NormSpec space_from_json(const Json& j, const std::string& path) {
  const std::string kind = kind_of(j, path);
  if (kind == "lp") {
    check_fields(j, {"kind", "p", "dim"}, path);
    Exponent p = exponent_from_json(field(j, "p", path), path + "/p");
    int dim = int_from_json(field(j, "dim", path), path + "/dim");
    return located(path, [&] { return lp_space(p, dim); });
  }
  if (kind == "generators") {
    check_fields(j, {"kind", "generators"}, path);
    auto g = vector_list(array_field(j, "generators", path), path + "/generators");
    return located(path, [&] { return polytope_by_generators(g); });
  }
  if (kind == "facets") {
    check_fields(j, {"kind", "functionals"}, path);
    auto f = vector_list(array_field(j, "functionals", path), path + "/functionals");
    return located(path, [&] { return polytope_by_facets(f); });
  }
  if (kind == "pullback") {
    check_fields(j, {"kind", "matrix", "host"}, path);
    MatQ m = matrix_from_json(field(j, "matrix", path), path + "/matrix");
    NormSpec host = space_from_json(field(j, "host", path), path + "/host");
    return located(path, [&] { return pullback(m, host); });
  }
  if (kind == "direct_sum") {
    check_fields(j, {"kind", "p", "parts"}, path);
    Exponent p = exponent_from_json(field(j, "p", path), path + "/p");
    const Json& parts = array_field(j, "parts", path);
    std::vector<NormSpec> specs;
    for (size_t i = 0; i < parts.size(); ++i)
      specs.push_back(space_from_json(parts[i], path + "/parts/" + std::to_string(i)));
    return located(path, [&] { return direct_sum(p, specs); });
  }
  if (kind == "quotient") {
    check_fields(j, {"kind", "host", "basis"}, path);
    NormSpec host = space_from_json(field(j, "host", path), path + "/host");
    auto b = vector_list(array_field(j, "basis", path), path + "/basis");
    return located(path, [&] { return quotient(host, b); });
  }
  if (kind == "discrete_lp") {
    check_fields(j, {"kind", "p", "weights"}, path);
    Exponent p = exponent_from_json(field(j, "p", path), path + "/p");
    VecQ w = vector_from_json(field(j, "weights", path), path + "/weights");
    std::vector<Rational> ws(w.data(), w.data() + w.size());
    return located(path, [&] { return discrete_lp(p, ws); });
  }
  if (kind == "finite_ck") {
    check_fields(j, {"kind", "evaluations"}, path);
    MatQ e = matrix_from_json(field(j, "evaluations", path), path + "/evaluations");
    return located(path, [&] { return finite_ck(e); });
  }
  fail(path + "/kind", "unknown space kind \"" + kind + "\"");
}

Json to_json(const NormSpec& spec) {
  Json j;
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, LpDesc>) {
          j["kind"] = "lp";
          j["p"] = to_json(d.p);
          j["dim"] = d.dim;
        } else if constexpr (std::is_same_v<T, GeneratorsDesc>) {
          j["kind"] = "generators";
          j["generators"] = list_to_json(d.generators);
        } else if constexpr (std::is_same_v<T, FacetsDesc>) {
          j["kind"] = "facets";
          j["functionals"] = list_to_json(d.functionals);
        } else if constexpr (std::is_same_v<T, PullbackDesc>) {
          j["kind"] = "pullback";
          j["matrix"] = to_json(d.matrix);
          j["host"] = to_json(d.host);
        } else if constexpr (std::is_same_v<T, DirectSumDesc>) {
          j["kind"] = "direct_sum";
          j["p"] = to_json(d.p);
          Json parts = Json::array();
          for (const auto& s : d.parts) parts.push_back(to_json(s));
          j["parts"] = parts;
        } else if constexpr (std::is_same_v<T, QuotientDesc>) {
          j["kind"] = "quotient";
          j["host"] = to_json(d.host);
          j["basis"] = list_to_json(d.basis);
        } else if constexpr (std::is_same_v<T, DiscreteLpDesc>) {
          j["kind"] = "discrete_lp";
          j["p"] = to_json(d.p);
          Json w = Json::array();
          for (const auto& q : d.weights) w.push_back(to_json(q));
          j["weights"] = w;
        } else {
          j["kind"] = "finite_ck";
          j["evaluations"] = to_json(d.evaluations);
        }
      },
      spec.descriptor().value);
  return j;
}

std::string canonical(const NormSpec& spec) { return to_json(spec).dump(); }

bool same_descriptor(const NormSpec& a, const NormSpec& b) {
  return &a.node() == &b.node() || canonical(a) == canonical(b);
}

PseudonormCode code_from_json(const Json& j, const std::string& path) {
  const std::string kind = kind_of(j, path);
  if (kind == "code") {
    check_fields(j, {"kind", "host", "images"}, path);
    NormSpec host = space_from_json(field(j, "host", path), path + "/host");
    auto imgs = vector_list(array_field(j, "images", path), path + "/images");
    return located(path, [&] { return make_code(host, imgs); });
  }
  if (kind == "rho") {
    check_fields(j, {"kind", "evaluations"}, path);
    MatQ e = matrix_from_json(field(j, "evaluations", path), path + "/evaluations");
    return located(path, [&] { return rho_of_K(e); });
  }
  if (kind == "sigma") {
    check_fields(j, {"kind", "p", "weights", "table"}, path);
    Exponent p = exponent_from_json(field(j, "p", path), path + "/p");
    VecQ w = vector_from_json(field(j, "weights", path), path + "/weights");
    MatQ t = matrix_from_json(field(j, "table", path), path + "/table");
    std::vector<Rational> ws(w.data(), w.data() + w.size());
    return located(path, [&] { return sigma_of_lambda(ws, t, p); });
  }
  fail(path + "/kind", "unknown code kind \"" + kind + "\"");
}

Json to_json(const PseudonormCode& code) {
  Json j;
  j["kind"] = "code";
  j["host"] = to_json(code.host);
  j["images"] = list_to_json(code.images);
  return j;
}

TailBudgetSet tail_budget_from_json(const Json& j, const std::string& path) {
  const std::string kind = kind_of(j, path);
  if (kind == "unit_l1_ball") {
    check_fields(j, {"kind", "radius"}, path);
    Rational r = j.contains("radius") ? rational_from_json(j["radius"], path + "/radius") : Rational(1);
    return located(path, [&] { return unit_l1_ball(r); });
  }
  if (kind == "c0_sum" || kind == "l1_sum" || kind == "finite_dual") {
    check_fields(j, {"kind", "space"}, path);
    NormSpec e = space_from_json(field(j, "space", path), path + "/space");
    return located(path, [&] {
      return kind == "c0_sum" ? c0_sum_model(e) : kind == "l1_sum" ? l1_sum_model(e) : finite_dual_model(e);
    });
  }
  if (kind != "tail_budget") fail(path + "/kind", "unknown tail-budget kind \"" + kind + "\"");
  check_fields(j, {"kind", "head_dim", "a", "c", "pieces", "empty"}, path);
  TailBudgetSet k;
  k.head_dim = int_from_json(field(j, "head_dim", path), path + "/head_dim");
  if (k.head_dim < 0) fail(path + "/head_dim", "negative dimension");
  const Json& a = array_field(j, "a", path);
  k.a = a.empty() ? MatQ(0, k.head_dim) : matrix_from_json(a, path + "/a");
  k.c = vector_from_json(field(j, "c", path), path + "/c");
  if (k.a.cols() != k.head_dim) fail(path + "/a", "row length differs from head_dim");
  if (k.a.rows() != k.c.size()) fail(path + "/c", "length differs from the number of rows of a");
  const Json& pieces = array_field(j, "pieces", path);
  for (size_t i = 0; i < pieces.size(); ++i) {
    std::string pp = path + "/pieces/" + std::to_string(i);
    check_fields(pieces[i], {"slope", "offset"}, pp);
    BudgetPiece piece{vector_from_json(field(pieces[i], "slope", pp), pp + "/slope"),
                      rational_from_json(field(pieces[i], "offset", pp), pp + "/offset")};
    if (piece.slope.size() != k.head_dim) fail(pp + "/slope", "length differs from head_dim");
    k.pieces.push_back(piece);
  }
  if (j.contains("empty")) {
    if (!j["empty"].is_boolean()) fail(path + "/empty", "expected a boolean");
    k.empty = j["empty"].get<bool>();
  }
  if (!k.empty && k.pieces.empty()) fail(path + "/pieces", "a nonempty set needs a budget piece");
  return k;
}

Json to_json(const TailBudgetSet& k) {
  Json j;
  j["kind"] = "tail_budget";
  j["head_dim"] = k.head_dim;
  j["a"] = to_json(k.a);
  if (k.a.rows() == 0) j["a"] = Json::array();
  j["c"] = to_json(k.c);
  Json pieces = Json::array();
  for (const auto& p : k.pieces) {
    Json q;
    q["slope"] = to_json(p.slope);
    q["offset"] = to_json(p.offset);
    pieces.push_back(q);
  }
  j["pieces"] = pieces;
  j["empty"] = k.empty;
  return j;
}

FiniteMetric metric_from_json(const Json& j, const std::string& path) {
  const std::string kind = kind_of(j, path);
  if (kind == "cycle") {
    check_fields(j, {"kind", "n"}, path);
    int n = int_from_json(field(j, "n", path), path + "/n");
    return located(path, [&] { return cycle_metric(n); });
  }
  if (kind != "metric") fail(path + "/kind", "unknown metric kind \"" + kind + "\"");
  check_fields(j, {"kind", "d"}, path);
  MatQ d = matrix_from_json(field(j, "d", path), path + "/d");
  return located(path, [&] { return make_metric(d); });
}

Json to_json(const FiniteMetric& m) {
  Json j;
  j["kind"] = "metric";
  j["d"] = to_json(m.d);
  return j;
}

ExtensionData extension_from_json(const Json& j, const std::string& path) {
  if (kind_of(j, path) != "extension_problem") fail(path + "/kind", "expected \"extension_problem\"");
  check_fields(j, {"kind", "nu", "zstar", "eta", "mu"}, path);
  ExtensionData d;
  d.nu = space_from_json(field(j, "nu", path), path + "/nu");
  d.zstar = vector_from_json(field(j, "zstar", path), path + "/zstar");
  d.eta = rational_from_json(field(j, "eta", path), path + "/eta");
  if (j.contains("mu")) {
    const Json& mus = j["mu"];
    if (!mus.is_array()) fail(path + "/mu", "expected an array of spaces");
    for (size_t i = 0; i < mus.size(); ++i) d.mus.push_back(space_from_json(mus[i], path + "/mu/" + std::to_string(i)));
  }
  return d;
}

}  // namespace bwb
