#include "CLI11.hpp"

#include "bwb/amalgam.hpp"
#include "bwb/banach_mazur.hpp"
#include "bwb/charact.hpp"
#include "bwb/coding.hpp"
#include "bwb/descriptor_io.hpp"
#include "bwb/embed.hpp"
#include "bwb/eps_net.hpp"
#include "bwb/extend.hpp"
#include "bwb/rng.hpp"
#include "bwb/suite.hpp"
#include "bwb/szlenk.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace bwb;

namespace {

constexpr const char* kSchema = "bwb-report/1";

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// file name prefix on descriptor errors
template <class F> auto from_file(const std::string& path, F&& parse) {
  Json j = read_json_file(path);
  try {
    return parse(j);
  } catch (const PreconditionError& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

NormSpec load_space(const std::string& path) {
  return from_file(path, [](const Json& j) { return space_from_json(j); });
}

MatQ load_matrix(const std::string& path) {
  return from_file(path, [](const Json& j) { return matrix_from_json(j); });
}

// a JSON array of vectors, returned one vector per column
MatQ load_vectors(const std::string& path) { return load_matrix(path).transpose(); }

VecQ parse_vector(const std::string& text) {
  std::vector<Rational> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    require(b != std::string::npos, "empty entry in vector \"" + text + "\"");
    vals.push_back(parse_rational(item.substr(b, e - b + 1)));
  }
  require(!vals.empty(), "empty vector");
  VecQ v(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
  return v;
}

Json doubles(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json doubles(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(doubles(Eigen::VectorXd(m.row(r).transpose())));
  return a;
}

Json doubles(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Json bounds_json(const NormBounds& b) {
  return {{"lower", b.lower}, {"upper", b.upper}, {"method", b.method}, {"witness", doubles(b.witness)}};
}

Json certificate_json(const EmbeddingCertificate& c, bool linear) {
  Json j = {{"verdict", to_string(c.verdict)},
            {"distortion", c.distortion},
            {"method", c.method},
            {"lower_bound", c.lower_bound},
            {"lower_method", c.lower_method},
            {"evaluations", c.evaluations},
            {"map", doubles(c.map)}};
  if (linear && c.verdict != SearchVerdict::impossible) {
    j["norm"] = bounds_json(c.norm);
    j["inverse"] = bounds_json(c.inverse);
  }
  return j;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void add(std::vector<std::string> r) { rows.push_back(std::move(r)); }
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

struct Run {
  std::string command;
  std::function<Json(Json& tolerances, Json& budgets, Csv& csv)> action;
};

struct Common {
  std::string out, csv;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "write the JSON report here instead of stdout");
  sub->add_option("--csv", c.csv, "write plot data as CSV");
}

Json collect_config(const CLI::App* leaf) {
  Json cfg = Json::object();
  for (const CLI::Option* o : leaf->get_options()) {
    std::string name = o->get_name(false, true);
    if (name.empty() || name == "--help" || name == "--out" || name == "--csv") continue;
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    if (o->count() > 0) {
      auto r = o->results();
      cfg[name] = r.size() == 1 ? Json(r[0]) : Json(r);
    } else if (!o->get_default_str().empty()) {
      cfg[name] = o->get_default_str();
    }
  }
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  require(bool(f), "cannot write " + path);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-dimensional normed-space workbench"};
  app.require_subcommand(1);
  Common common;
  Run run;
  const CLI::App* leaf = nullptr;

  auto leaf_cmd = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    CLI::App* sub = parent->add_subcommand(name, help);
    add_common(sub, common);
    return sub;
  };
  auto set = [&](CLI::App* sub, std::string command, decltype(Run::action) action) {
    sub->callback([&, sub, command, action] {
      leaf = sub;
      run = Run{command, action};
    });
  };

  // shared option storage
  std::string space, source, target, matrix, a_path, b_path, tuple, basis, vector, metric, model, code_path,
      probes, problem, g_path, y_path, xg_path, xy_path, weights, table, probe_name, criteria, eps_text;
  std::uint64_t seed = 0;
  double eps = 0, K = 0, C = 0, p = 0, net_eps = 0.02;
  int budget = 0, n_pieces = 2, grid = 200, samples = 200, restarts = 32, bm_starts = 64, embed_starts = 32, times = 1, grid_bits = 10;
  long cap = 1000000, max_terms = 4096, search_budget = 100000;
  bool all = false, no_refine = false;
  double rank_tol = 1e-8;

  // ---- space ----
  CLI::App* space_cmd = app.add_subcommand("space", "norm specifications")->require_subcommand(1);
  {
    CLI::App* s = leaf_cmd(space_cmd, "eval", "evaluate a norm");
    s->add_option("--space", space, "space descriptor")->required();
    s->add_option("--vector", vector, "comma separated rationals")->required();
    set(s, "space eval", [&](Json&, Json&, Csv&) {
      NormSpec x = load_space(space);
      VecQ v = parse_vector(vector);
      require(v.size() == x.dim(), "vector has dimension " + std::to_string(v.size()) + ", space has " +
                                       std::to_string(x.dim()));
      auto exact = eval_norm_exact(x, v);
      return Json{{"value", eval_norm(x, v)},
                  {"exact", exact ? Json(to_string(*exact)) : Json(nullptr)},
                  {"dim", x.dim()},
                  {"kernel_dim", x.kernel().cols()},
                  {"descriptor", to_json(x)}};
    });
  }
  {
    CLI::App* s = leaf_cmd(space_cmd, "net", "eps-net of the unit sphere");
    s->add_option("--space", space, "space descriptor")->required();
    s->add_option("--eps", eps, "net radius in (0, 1)")->required();
    s->add_option("--basis", basis, "JSON array of subspace basis vectors (default: whole space)");
    set(s, "space net", [&](Json& tol, Json&, Csv& csv) {
      NormSpec x = load_space(space);
      Eigen::MatrixXd b = basis.empty() ? Eigen::MatrixXd::Identity(x.dim(), x.dim()) : to_double(load_vectors(basis));
      tol["net_eps"] = eps;
      tol["witness_mesh"] = eps / 4;
      EpsNet net = eps_net(x, b, eps);
      csv.header.clear();
      for (int i = 0; i < x.dim(); ++i) csv.header.push_back("x" + std::to_string(i));
      for (const auto& pt : net.points) {
        std::vector<std::string> row;
        for (Eigen::Index i = 0; i < pt.size(); ++i) row.push_back(num(pt[i]));
        csv.add(row);
      }
      return Json{{"points", net.points.size()},
                  {"coverage", net.coverage},
                  {"witness_mesh", net.witness_mesh},
                  {"subdivisions", net.subdivisions},
                  {"target", net.target}};
    });
  }

  // ---- map ----
  CLI::App* map_cmd = app.add_subcommand("map", "linear maps")->require_subcommand(1);
  {
    CLI::App* s = leaf_cmd(map_cmd, "norm", "operator norm bounds");
    s->add_option("--source", source)->required();
    s->add_option("--target", target)->required();
    s->add_option("--matrix", matrix, "JSON rows, target dim x source dim")->required();
    s->add_option("--seed", seed)->required();
    s->add_option("--net-eps", net_eps, "net radius for non-polytopal sources")->capture_default_str();
    set(s, "map norm", [&](Json& tol, Json&, Csv&) {
      NormSpec src = load_space(source), tgt = load_space(target);
      Eigen::MatrixXd t = to_double(load_matrix(matrix));
      require(t.rows() == tgt.dim() && t.cols() == src.dim(), "matrix shape does not match the spaces");
      OpNormOptions o;
      o.seed = seed;
      o.net_eps = net_eps;
      tol["net_eps"] = net_eps;
      tol["net_inflation"] = phi1(2 * net_eps);
      Json r = {{"norm", bounds_json(op_norm(t, src, tgt, o))}};
      if (t.rows() >= t.cols()) r["inverse"] = bounds_json(inverse_norm(t, src, tgt, o));
      return r;
    });
  }
  {
    CLI::App* s = leaf_cmd(map_cmd, "bm", "Banach-Mazur distance bounds");
    s->add_option("--a", a_path)->required();
    s->add_option("--b", b_path)->required();
    s->add_option("--seed", seed)->required();
    s->add_option("--starts", bm_starts, "multistart count")->capture_default_str();
    set(s, "map bm", [&](Json& tol, Json& bud, Csv&) {
      BmOptions o;
      o.seed = seed;
      o.starts = bm_starts;
      bud["starts"] = o.starts;
      bud["polish_evals"] = o.polish_evals;
      bud["dim_cap"] = o.dim_cap;
      tol["net_eps"] = o.op.net_eps;
      DistortionBounds d = banach_mazur(load_space(a_path), load_space(b_path), o);
      return Json{{"lower", d.lower},
                  {"upper", d.upper},
                  {"lower_method", d.lower_method},
                  {"norm", d.norm},
                  {"inverse_norm", d.inverse_norm},
                  {"map", doubles(d.map)},
                  {"euclidean", {{"a", {d.euclid_lower_e, d.euclid_upper_e}}, {"b", {d.euclid_lower_f, d.euclid_upper_f}}}}};
    });
  }
  {
    CLI::App* s = leaf_cmd(map_cmd, "approx", "K-equivalence of a tuple to the unit vector basis");
    s->add_option("--source", source)->required();
    s->add_option("--target", target)->required();
    s->add_option("--tuple", tuple, "JSON array of vectors in the source")->required();
    s->add_option("--K", K)->required();
    s->add_option("--seed", seed)->required();
    set(s, "map approx", [&](Json& tol, Json&, Csv&) {
      OpNormOptions o;
      o.seed = seed;
      tol["net_eps"] = o.net_eps;
      ApproxCertificate c = approximates(to_double(load_vectors(tuple)), load_space(source), K, load_space(target), o);
      return Json{{"verdict", to_string(c.verdict)},
                  {"K", c.K},
                  {"forward", bounds_json(c.forward)},
                  {"backward", bounds_json(c.backward)}};
    });
  }
  {
    CLI::App* s = leaf_cmd(map_cmd, "bc", "basis constant of an ordered tuple");
    s->add_option("--space", space)->required();
    s->add_option("--tuple", tuple, "JSON array of vectors")->required();
    s->add_option("--seed", seed)->required();
    set(s, "map bc", [&](Json& tol, Json&, Csv&) {
      OpNormOptions o;
      o.seed = seed;
      tol["net_eps"] = o.net_eps;
      return bounds_json(basis_constant(to_double(load_vectors(tuple)), load_space(space), o));
    });
  }

  // ---- embed ----
  CLI::App* embed_cmd = app.add_subcommand("embed", "embedding search")->require_subcommand(1);
  {
    CLI::App* s = leaf_cmd(embed_cmd, "search", "(1+eps)-embedding of E into F");
    s->add_option("--e", a_path)->required();
    s->add_option("--f", b_path)->required();
    s->add_option("--eps", eps)->required();
    s->add_option("--seed", seed)->required();
    s->add_option("--starts", embed_starts)->capture_default_str();
    s->add_option("--budget", search_budget, "surrogate evaluations")->capture_default_str();
    set(s, "embed search", [&](Json& tol, Json& bud, Csv&) {
      EmbedOptions o;
      o.seed = seed;
      o.starts = embed_starts;
      o.budget = search_budget;
      tol["eps"] = eps;
      tol["net_eps"] = o.op.net_eps;
      bud["starts"] = o.starts;
      bud["budget"] = o.budget;
      NormSpec e = load_space(a_path), f = load_space(b_path);
      EmbeddingCertificate c = embed_search(e, f, eps, o);
      Json r = certificate_json(c, true);
      if (c.verdict == SearchVerdict::found) r["reverified"] = reverify(c, e, f);
      return r;
    });
  }
  {
    CLI::App* s = leaf_cmd(embed_cmd, "metric", "C-bilipschitz embedding of a finite metric");
    s->add_option("--metric", metric)->required();
    s->add_option("--space", space)->required();
    s->add_option("--C", C)->required();
    s->add_option("--seed", seed)->required();
    set(s, "embed metric", [&](Json& tol, Json& bud, Csv& csv) {
      EmbedOptions o;
      o.seed = seed;
      tol["C"] = C;
      bud["starts"] = o.starts;
      FiniteMetric m = from_file(metric, [](const Json& j) { return metric_from_json(j); });
      NormSpec x = load_space(space);
      EmbeddingCertificate c = bilipschitz_embed(m, x, C, o);
      if (c.map.size() > 0) {
        for (int i = 0; i < x.dim(); ++i) csv.header.push_back("x" + std::to_string(i));
        for (Eigen::Index j = 0; j < c.map.cols(); ++j) {
          std::vector<std::string> row;
          for (Eigen::Index i = 0; i < c.map.rows(); ++i) row.push_back(num(c.map(i, j)));
          csv.add(row);
        }
      }
      return certificate_json(c, false);
    });
  }

  // ---- charact ----
  CLI::App* ch = app.add_subcommand("charact", "isometric characterizations")->require_subcommand(1);
  {
    CLI::App* s = leaf_cmd(ch, "pl", "parallelogram defect");
    s->add_option("--space", space)->required();
    s->add_option("--budget", budget, "random pairs")->default_val(200);
    s->add_option("--seed", seed)->required();
    set(s, "charact pl", [&](Json&, Json& bud, Csv&) {
      bud["pairs"] = budget;
      DefectWitness w = parallelogram_defect(load_space(space), budget, seed);
      return Json{{"defect", w.defect}, {"x", doubles(w.x)}, {"y", doubles(w.y)}, {"samples", w.samples}};
    });
  }
  {
    CLI::App* s = leaf_cmd(ch, "clarkson", "Clarkson gap on a grid");
    s->add_option("--p", p)->required();
    s->add_option("--grid", grid, "points per axis over [-2, 2]")->default_val(200);
    set(s, "charact clarkson", [&](Json& tol, Json&, Csv& csv) {
      require(grid >= 2, "grid needs at least 2 points");
      tol["zero"] = 1e-10;
      csv.header = {"z", "w", "gap"};
      const double sign = p > 2 ? 1 : -1;
      long wrong = 0, mismatch = 0;
      double lo = INFINITY, hi = -INFINITY;
      for (int i = 0; i < grid; ++i)
        for (int k = 0; k < grid; ++k) {
          double z = -2 + 4.0 * i / (grid - 1), w = -2 + 4.0 * k / (grid - 1);
          double g = clarkson_gap(p, z, w);
          lo = std::min(lo, g);
          hi = std::max(hi, g);
          wrong += sign * g < -1e-12;
          mismatch += (std::fabs(g) < 1e-10) != (std::fabs(z * w) < 1e-10);
          csv.add({num(z), num(w), num(g)});
        }
      return Json{{"min", lo}, {"max", hi}, {"wrong_sign", wrong}, {"zero_set_mismatch", mismatch},
                  {"expected_sign", p > 2 ? "nonnegative" : "nonpositive"}};
    });
  }
  {
    CLI::App* s = leaf_cmd(ch, "lpsplit", "equal-mass splitting in a discrete L_p space");
    s->add_option("--space", space, "discrete_lp descriptor")->required();
    s->add_option("--vector", vector)->required();
    s->add_option("--N", n_pieces)->required();
    s->add_flag("--no-refine", no_refine, "refuse to split atoms");
    set(s, "charact lpsplit", [&](Json& tol, Json&, Csv&) {
      tol["unit_norm"] = 1e-9;
      NormSpec x = load_space(space);
      SplitResult r = lp_split(x, to_double(parse_vector(vector)), n_pieces, !no_refine);
      Json pieces = Json::array();
      for (const auto& piece : r.pieces) pieces.push_back(doubles(piece));
      return Json{{"pieces", pieces},
                  {"weights", doubles(r.weights)},
                  {"parent", r.parent},
                  {"residual", r.residual},
                  {"refined_atoms", r.refined_atoms},
                  {"equivalence", r.equivalence}};
    });
  }
  {
    CLI::App* s = leaf_cmd(ch, "lpobstruct", "atom obstruction search");
    s->add_option("--p", p)->required();
    s->add_option("--eps", eps)->required();
    s->add_option("--budget", search_budget)->capture_default_str();
    s->add_option("--seed", seed)->required();
    set(s, "charact lpobstruct", [&](Json& tol, Json& bud, Csv&) {
      tol["eps"] = eps;
      bud["evaluations"] = search_budget;
      Threshold t = lp_atom_threshold(p);
      ObstructionVerdict v = lp_atom_obstruction_check(p, eps, int(search_budget), seed);
      return Json{{"threshold", t.eps},
                  {"branch", t.branch},
                  {"equation_residual", t.equation_residual},
                  {"best_distortion", v.best_distortion},
                  {"obstructed", v.obstructed},
                  {"margin", v.margin},
                  {"evaluations", v.evaluations},
                  {"f", doubles(v.f)},
                  {"g", doubles(v.g)}};
    });
  }
  {
    CLI::App* s = leaf_cmd(ch, "qsl", "QSL_p matrix inequality");
    s->add_option("--space", space)->required();
    s->add_option("--matrix", matrix)->required();
    s->add_option("--p", p)->required();
    s->add_option("--samples", samples)->default_val(200);
    s->add_option("--restarts", restarts)->default_val(32);
    s->add_option("--seed", seed)->required();
    set(s, "charact qsl", [&](Json&, Json& bud, Csv&) {
      bud["samples"] = samples;
      bud["restarts"] = restarts;
      QslCertificate c = qsl_check(load_space(space), to_double(load_matrix(matrix)), p, samples, restarts, seed);
      Json tuple = Json::array();
      for (const auto& v : c.worst_tuple) tuple.push_back(doubles(v));
      return Json{{"holds", c.holds},
                  {"hypothesis", c.hypothesis},
                  {"worst_residual", c.worst_residual},
                  {"worst_tuple", tuple},
                  {"tuples", c.tuples}};
    });
  }

  // ---- szlenk ----
  CLI::App* sz = app.add_subcommand("szlenk", "Szlenk derivatives of tail-budget sets")->require_subcommand(1);
  auto load_model = [&] { return from_file(model, [](const Json& j) { return tail_budget_from_json(j); }); };
  {
    CLI::App* s = leaf_cmd(sz, "derive", "iterate the derivative");
    s->add_option("--model", model)->required();
    s->add_option("--eps", eps_text, "rational")->required();
    s->add_option("--times", times)->default_val(1);
    set(s, "szlenk derive", [&](Json&, Json&, Csv& csv) {
      TailBudgetSet k = load_model();
      Rational e = parse_rational(eps_text);
      csv.header = {"iteration", "empty", "max_budget"};
      auto row = [&](int i, const TailBudgetSet& s) {
        MaxBudget m = max_budget(s);
        csv.add({std::to_string(i), m.empty ? "1" : "0",
                 m.empty ? "" : (m.unbounded ? "inf" : to_string(m.value))});
      };
      row(0, k);
      for (int i = 1; i <= times; ++i) {
        k = szlenk_derivative(k, e);
        row(i, k);
      }
      return Json{{"result", to_json(k)}, {"empty", k.empty}};
    });
  }
  {
    CLI::App* s = leaf_cmd(sz, "index", "derivatives until empty");
    s->add_option("--model", model)->required();
    s->add_option("--eps", eps_text)->required();
    s->add_option("--cap", cap)->capture_default_str();
    set(s, "szlenk index", [&](Json&, Json& bud, Csv&) {
      bud["cap"] = cap;
      return Json{{"index", szlenk_index_at(load_model(), parse_rational(eps_text), cap)}};
    });
  }
  {
    CLI::App* s = leaf_cmd(sz, "summable", "summable index estimate");
    s->add_option("--model", model)->required();
    s->add_option("--grid-bits", grid_bits)->default_val(10);
    s->add_option("--max-terms", max_terms)->capture_default_str();
    set(s, "szlenk summable", [&](Json&, Json& bud, Csv&) {
      bud["grid_bits"] = grid_bits;
      bud["max_terms"] = max_terms;
      SummableResult r = summable_check(load_model(), grid_bits, max_terms);
      Json seq = Json::array();
      for (const auto& e : r.sequence) seq.push_back(to_string(e));
      return Json{{"summable", r.summable}, {"M", to_string(r.m)}, {"sequence", seq}, {"verified", r.verified}};
    });
  }
  {
    CLI::App* s = leaf_cmd(sz, "c0", "c_0 identity s_2eps(K) = (1 - eps) K");
    s->add_option("--model", model)->required();
    s->add_option("--eps", eps_text)->required();
    set(s, "szlenk c0", [&](Json&, Json&, Csv&) {
      C0Check c = c0_predicate(load_model(), parse_rational(eps_text));
      return Json{{"holds", c.holds}, {"discrepancy", c.discrepancy}};
    });
  }

  // ---- code ----
  CLI::App* cd = app.add_subcommand("code", "pseudonorm codes")->require_subcommand(1);
  auto load_code = [&] { return from_file(code_path, [](const Json& j) { return code_from_json(j); }); };
  {
    CLI::App* s = leaf_cmd(cd, "eval", "evaluate a code");
    s->add_option("--code", code_path)->required();
    s->add_option("--vector", vector)->required();
    set(s, "code eval", [&](Json&, Json&, Csv&) {
      PseudonormCode c = load_code();
      VecQ v = parse_vector(vector);
      require(v.size() == c.truncation(), "vector length must equal the truncation");
      auto exact = pseudonorm_eval_exact(c, v);
      return Json{{"value", pseudonorm_eval(c, v)},
                  {"exact", exact ? Json(to_string(*exact)) : Json(nullptr)},
                  {"in_class_b", c.in_class_b()}};
    });
  }
  {
    CLI::App* s = leaf_cmd(cd, "reduce", "extract a class-B subcode");
    s->add_option("--code", code_path)->required();
    s->add_option("--rank-tol", rank_tol)->capture_default_str();
    set(s, "code reduce", [&](Json& tol, Json&, Csv&) {
      tol["rank"] = rank_tol;
      Reduction r = reduce_to_B(load_code(), rank_tol);
      return Json{{"selection", r.selection},
                  {"truncation_incomplete", r.truncation_incomplete},
                  {"exact_rank", r.exact_rank},
                  {"code", to_json(r.code)}};
    });
  }
  {
    CLI::App* s = leaf_cmd(cd, "rho", "code of a finite C(K) dictionary");
    s->add_option("--evaluations", matrix, "JSON rows: points of K, columns: functions")->required();
    set(s, "code rho", [&](Json&, Json&, Csv&) {
      PseudonormCode c = rho_of_K(load_matrix(matrix));
      return Json{{"code", to_json(c)}, {"in_class_b", c.in_class_b()}};
    });
  }
  {
    CLI::App* s = leaf_cmd(cd, "sigma", "code of a discrete L_p dictionary");
    s->add_option("--weights", weights, "comma separated probabilities")->required();
    s->add_option("--table", table, "JSON rows: atoms, columns: functions")->required();
    s->add_option("--p", eps_text, "exponent")->required();
    set(s, "code sigma", [&](Json&, Json&, Csv&) {
      VecQ w = parse_vector(weights);
      std::vector<Rational> wv(w.data(), w.data() + w.size());
      PseudonormCode c = sigma_of_lambda(wv, load_matrix(table), parse_exponent(eps_text));
      return Json{{"code", to_json(c)}, {"in_class_b", c.in_class_b()}};
    });
  }
  {
    CLI::App* s = leaf_cmd(cd, "rationalize", "rational polytopal norm within eps on a finite set");
    s->add_option("--code", code_path)->required();
    s->add_option("--probes", probes, "JSON array of vectors")->required();
    s->add_option("--eps", eps_text, "rational")->required();
    set(s, "code rationalize", [&](Json& tol, Json&, Csv&) {
      tol["eps"] = eps_text;
      MatQ pm = load_vectors(probes);
      std::vector<VecQ> pv;
      for (Eigen::Index j = 0; j < pm.cols(); ++j) pv.push_back(pm.col(j));
      Rationalized r = rationalize_norm(load_code(), pv, parse_rational(eps_text));
      Json vals = Json::array(), pr = Json::array();
      for (const auto& v : r.values) vals.push_back(to_string(v));
      for (const auto& v : r.probes) pr.push_back(to_json(v));
      return Json{{"code", to_json(r.code)},
                  {"probes", pr},
                  {"values", vals},
                  {"max_change", r.max_change},
                  {"m", r.m},
                  {"unchanged", r.unchanged}};
    });
  }

  // ---- extend ----
  CLI::App* ex = app.add_subcommand("extend", "continuous Hahn-Banach recursion")->require_subcommand(1);
  {
    CLI::App* s = leaf_cmd(ex, "run", "gamma tables and property residuals");
    s->add_option("--problem", problem)->required();
    s->add_option("--seed", seed)->required();
    set(s, "extend run", [&](Json& tol, Json& bud, Csv& csv) {
      ExtensionData d = from_file(problem, [](const Json& j) { return extension_from_json(j); });
      ExtensionProblem pb = make_problem(d.nu, to_double(d.zstar), to_double(d.eta));
      tol["convex"] = pb.solver.tol;
      bud["max_iter"] = pb.solver.max_iter;
      BetaOptions bo;
      bud["beta_grid"] = bo.grid_points;
      auto table_json = [](const GammaTable& t) {
        return Json{{"gamma", doubles(t.gamma)}, {"u", doubles(t.u)}, {"v", doubles(t.v)},
                    {"gap_u", doubles(t.gap_u)}, {"gap_v", doubles(t.gap_v)}};
      };
      csv.header = {"space", "k", "gamma"};
      for (int k = 0; k < pb.n; ++k) csv.add({"nu", std::to_string(k + 1), num(pb.nu_table.gamma[k])});
      double cond1 = 0;
      for (int k = 0; k < pb.n; ++k) cond1 = std::max(cond1, std::fabs(pb.nu_table.gamma[k] - pb.eta * pb.zstar[k]));
      Json mus = Json::array();
      for (size_t i = 0; i < d.mus.size(); ++i) {
        const NormSpec& mu = d.mus[i];
        GammaTable t = gamma_extend(pb, mu);
        Cond2Check c2 = check_cond2(pb, mu, t, derive_seed(seed, std::uint64_t(i)));
        std::vector<double> b = beta(pb, mu, pb.nu, pb.n, bo);
        double cond3 = 0;
        for (int k = 0; k < pb.n; ++k) {
          cond3 = std::max(cond3, std::fabs(t.gamma[k] - pb.nu_table.gamma[k]) - b[k]);
          csv.add({"mu" + std::to_string(i), std::to_string(k + 1), num(t.gamma[k])});
        }
        mus.push_back({{"table", table_json(t)},
                       {"cond2", c2.residual},
                       {"beta_to_nu", doubles(b)},
                       {"cond3", std::max(0.0, cond3)},
                       {"bounded_region_gap", doubles(bounded_region_gap(pb, mu, t))}});
      }
      return Json{{"kappa", doubles(pb.kappa)},
                  {"p", doubles(pb.p)},
                  {"domination", pb.domination},
                  {"nu", table_json(pb.nu_table)},
                  {"cond1", cond1},
                  {"mu", mus}};
    });
  }

  // ---- amalgam ----
  CLI::App* am = app.add_subcommand("amalgam", "amalgamation and Gurarii extension search")->require_subcommand(1);
  am->alias("gurarii");
  GurariiOptions gopt;
  {
    CLI::App* s = leaf_cmd(am, "sum", "pushout (G (+)_1 Y) / Z");
    s->add_option("--g", g_path)->required();
    s->add_option("--y", y_path)->required();
    s->add_option("--x-in-g", xg_path, "JSON array of basis vectors of X inside G")->required();
    s->add_option("--x-in-y", xy_path, "JSON array of the same basis inside Y")->required();
    s->add_option("--seed", seed)->required();
    set(s, "amalgam sum", [&](Json& tol, Json&, Csv&) {
      tol["isometry"] = 1e-9;
      NormSpec g = load_space(g_path), y = load_space(y_path);
      MatQ xg = load_vectors(xg_path), xy = load_vectors(xy_path);
      Pushout po = amalgamated_sum(g, y, xg, xy);
      std::vector<Eigen::VectorXd> pts;
      for (Eigen::Index j = 0; j < xy.cols(); ++j) pts.push_back(to_double(VecQ(xy.col(j))));
      for (int i = 0; i < y.dim(); ++i) pts.push_back(unit_vector(y.dim(), i));
      PushoutCheck c = verify_pushout(po, pts, seed);
      return Json{{"space", to_json(po.space)},
                  {"g_distortion", c.g_distortion},
                  {"y_distortion", c.y_distortion},
                  {"verification_points", c.points},
                  {"dist_pushout", doubles(c.dist_pushout)},
                  {"dist_y", doubles(c.dist_y)},
                  {"distance_residual", c.distance_residual}};
    });
  }
  auto probe_list = [&] {
    return probes.empty() ? default_probes() : probes_from_json_file(probes);
  };
  auto cert_json = [](const GurariiProbe& pr, const GurariiCertificate& c) {
    return Json{{"probe", pr.name},
                {"verdict", to_string(c.verdict)},
                {"distortion", c.distortion},
                {"commutation", c.commutation},
                {"lower_bound", c.lower_bound},
                {"method", c.method},
                {"f", doubles(c.f)}};
  };
  {
    CLI::App* s = leaf_cmd(am, "probe", "one extension problem against X");
    s->add_option("--x", space)->required();
    s->add_option("--probe", probe_name)->required();
    s->add_option("--probes", probes, "probe file (default: built-in list)");
    s->add_option("--eps", eps)->required();
    s->add_option("--seed", seed)->required();
    set(s, "amalgam probe", [&](Json& tol, Json& bud, Csv&) {
      tol["eps"] = eps;
      gopt.seed = seed;
      bud["starts"] = gopt.starts;
      bud["polish_evals"] = gopt.polish_evals;
      for (const auto& pr : probe_list())
        if (pr.name == probe_name) {
          BatteryReport r = gurarii_battery(load_space(space), {pr}, eps, gopt);
          return cert_json(pr, r.results[0]);
        }
      throw PreconditionError("no probe named \"" + probe_name + "\"");
    });
  }
  {
    CLI::App* s = leaf_cmd(am, "battery", "score X on a list of extension problems");
    s->add_option("--x", space)->required();
    s->add_option("--probes", probes, "probe file (default: built-in list)");
    s->add_option("--eps", eps)->required();
    s->add_option("--seed", seed)->required();
    set(s, "amalgam battery", [&](Json& tol, Json& bud, Csv& csv) {
      tol["eps"] = eps;
      gopt.seed = seed;
      bud["starts"] = gopt.starts;
      bud["polish_evals"] = gopt.polish_evals;
      auto list = probe_list();
      BatteryReport r = gurarii_battery(load_space(space), list, eps, gopt);
      Json res = Json::array();
      csv.header = {"probe", "verdict", "distortion", "margin"};
      for (size_t i = 0; i < r.results.size(); ++i) {
        res.push_back(cert_json(list[i], r.results[i]));
        csv.add({list[i].name, to_string(r.results[i].verdict), num(r.results[i].distortion), num(r.margins[i])});
      }
      return Json{{"score", r.score}, {"vacuous", r.vacuous}, {"results", res}};
    });
  }

  // ---- suite ----
  {
    CLI::App* s = app.add_subcommand("suite", "acceptance criteria");
    add_common(s, common);
    s->add_flag("--all", all, "run every criterion");
    s->add_option("--criteria", criteria, "comma separated ids");
    s->add_option("--seed", seed)->required();
    set(s, "suite", [&](Json&, Json&, Csv& csv) {
      std::vector<int> ids;
      if (all || criteria.empty()) {
        ids = all_criteria();
      } else {
        std::stringstream ss(criteria);
        std::string item;
        while (std::getline(ss, item, ',')) ids.push_back(std::stoi(item));
      }
      auto reports = run_suite(ids, seed);
      Json rows = Json::array();
      bool ok = true;
      csv.header = {"id", "name", "pass", "seconds", "budget_seconds"};
      for (const auto& r : reports) {
        ok = ok && r.pass;
        rows.push_back(to_json(r, false));
        csv.add({std::to_string(r.id), r.name, r.pass ? "1" : "0", num(r.seconds), num(r.budget_seconds)});
      }
      return Json{{"all_pass", ok}, {"criteria", rows}};
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (!leaf || !run.action) return 2;

  Json report = {{"schema", kSchema}, {"command", run.command}};
  Json argv_echo = Json::array();
  for (int i = 1; i < argc; ++i) argv_echo.push_back(argv[i]);
  report["argv"] = argv_echo;
  Json cfg = collect_config(leaf);
  report["config"] = cfg;
  {
    // descriptor contents count, not just their paths
    std::string key = run.command + "\n" + cfg.dump();
    for (const auto& [name, value] : cfg.items()) {
      (void)name;
      if (!value.is_string()) continue;
      std::ifstream f(value.get<std::string>());
      if (f) key += "\n" + std::string(std::istreambuf_iterator<char>(f), {});
    }
    report["config_hash"] = fnv1a(key);
  }
  Json tol = Json::object(), bud = Json::object();
  Csv csv;
  int code = 0;
  auto t0 = std::chrono::steady_clock::now();
  try {
    Json results = run.action(tol, bud, csv);
    report["tolerances"] = tol;
    report["budgets"] = bud;
    report["results"] = results;
  } catch (const SolverError& e) {
    report["error"] = {{"kind", "solver"}, {"message", e.what()}, {"residual", e.residual}};
    code = 3;
  } catch (const PreconditionError& e) {
    report["error"] = {{"kind", "precondition"}, {"message", e.what()}};
    code = 2;
  } catch (const Json::exception& e) {
    report["error"] = {{"kind", "precondition"}, {"message", e.what()}};
    code = 2;
  } catch (const std::invalid_argument& e) {
    report["error"] = {{"kind", "precondition"}, {"message", e.what()}};
    code = 2;
  }
  report["exit_code"] = code;
  report["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (code != 0) std::cerr << "bwb: " << report["error"]["message"].get<std::string>() << "\n";
  const std::string text = report.dump(2) + "\n";
  try {
    if (common.out.empty()) std::cout << text;
    else write_text(common.out, text);
    if (!common.csv.empty() && !csv.header.empty()) {
      std::ostringstream os;
      for (size_t i = 0; i < csv.header.size(); ++i) os << (i ? "," : "") << csv.header[i];
      os << "\n";
      for (const auto& row : csv.rows) {
        for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
      }
      write_text(common.csv, os.str());
    }
  } catch (const PreconditionError& e) {
    std::cerr << "bwb: " << e.what() << "\n";
    return 2;
  }
  return code;
}
