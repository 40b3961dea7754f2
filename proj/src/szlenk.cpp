#include "bwb/szlenk.hpp"

#include "bwb/eps_net.hpp"
#include "bwb/lp.hpp"

#include <cmath>
#include <limits>

namespace bwb {

namespace {

using QLp = LinearProgram<Rational>;

void check_shape(const TailBudgetSet& k) {
  require(k.a.cols() == k.head_dim || k.a.rows() == 0, "head constraint width differs from head dimension");
  require(k.a.rows() == k.c.size(), "head constraint count mismatch");
  for (const auto& p : k.pieces) require(p.slope.size() == k.head_dim, "budget piece dimension mismatch");
  require(k.empty || !k.pieces.empty(), "a nonempty tail-budget set needs a budget piece");
}

// Adds head variables and the constraints A h <= c; returns their indices.
std::vector<int> add_head(QLp& lp, const TailBudgetSet& k) {
  std::vector<int> h;
  for (int i = 0; i < k.head_dim; ++i) h.push_back(lp.add_var(0, true));
  for (Eigen::Index r = 0; r < k.a.rows(); ++r) {
    QLp::Terms t;
    for (int i = 0; i < k.head_dim; ++i)
      if (k.a(r, i) != 0) t.emplace_back(h[i], k.a(r, i));
    lp.add_row(t, RowSense::le, k.c[r]);
  }
  return h;
}

// s <= slope . h + offset for every piece
void add_budget(QLp& lp, const TailBudgetSet& k, const std::vector<int>& h, int s) {
  for (const auto& p : k.pieces) {
    QLp::Terms t{{s, Rational(1)}};
    for (int i = 0; i < k.head_dim; ++i)
      if (p.slope[i] != 0) t.emplace_back(h[i], -p.slope[i]);
    lp.add_row(t, RowSense::le, p.offset);
  }
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// max of (objective . h + coef_s * s) over the effective head of k (s = budget level)
struct Sup {
  bool feasible = false;
  bool unbounded = false;
  Rational value = 0;
};

Sup sup_over(const TailBudgetSet& k, const VecQ& objective, const Rational& coef_s, const Rational& shift) {
  QLp lp;
  auto h = add_head(lp, k);
  int s = lp.add_var(-coef_s, false);  // s >= 0 keeps b(h) >= 0
  for (int i = 0; i < k.head_dim; ++i) lp.set_cost(h[i], -objective[i]);
  add_budget(lp, k, h, s);
  auto sol = lp.minimize();
  Sup out;
  if (sol.status == LpStatus::infeasible) return out;
  out.feasible = true;
  if (sol.status == LpStatus::unbounded) {
    out.unbounded = true;
    return out;
  }
  if (!sol.optimal()) throw SolverError("exact LP did not terminate");
  out.value = -sol.objective + shift;
  return out;
}

std::vector<BudgetPiece> norm_pieces(const std::vector<VecQ>& functionals, const Rational& offset) {
  std::vector<BudgetPiece> out;
  for (const auto& f : functionals)
    for (int sg : {1, -1}) out.push_back(BudgetPiece{VecQ(f * Rational(-sg)), offset});
  return out;
}

// H-representation of B_{E*} = {h : |v . h| <= 1 for v in vertices of B_E}
void dual_ball(const NormSpec& e, MatQ& a, VecQ& c, std::vector<VecQ>& vertices) {
  const PolytopeRep* rep = e.polytope();
  require(rep && rep->has_vertices && rep->exact, "dual-ball model needs a polytopal space with exact vertices");
  vertices = rep->vertices_q;
  const int n = e.dim();
  a.resize(2 * vertices.size(), n);
  c.resize(2 * vertices.size());
  for (size_t i = 0; i < vertices.size(); ++i) {
    a.row(2 * i) = vertices[i].transpose();
    a.row(2 * i + 1) = -vertices[i].transpose();
    c[2 * i] = c[2 * i + 1] = 1;
  }
}

}  // namespace

TailBudgetSet TailBudgetSet::empty_set(int head_dim) {
  TailBudgetSet k;
  k.head_dim = head_dim;
  k.a.resize(0, head_dim);
  k.c.resize(0);
  k.empty = true;
  return k;
}

TailBudgetSet unit_l1_ball(const Rational& radius) {
  require(radius >= 0, "radius must be nonnegative");
  TailBudgetSet k;
  k.a.resize(0, 0);
  k.c.resize(0);
  k.pieces.push_back(BudgetPiece{VecQ(0), radius});
  return k;
}

TailBudgetSet c0_sum_model(const NormSpec& e) {
  TailBudgetSet k;
  k.head_dim = e.dim();
  std::vector<VecQ> verts;
  dual_ball(e, k.a, k.c, verts);
  k.pieces = norm_pieces(verts, 1);
  return k;
}

TailBudgetSet l1_sum_model(const NormSpec& e) {
  TailBudgetSet k;
  k.head_dim = e.dim();
  std::vector<VecQ> verts;
  dual_ball(e, k.a, k.c, verts);
  k.pieces.push_back(BudgetPiece{VecQ::Zero(e.dim()), 1});
  return k;
}

TailBudgetSet finite_dual_model(const NormSpec& e) {
  TailBudgetSet k = l1_sum_model(e);
  k.pieces[0].offset = 0;
  return k;
}

TailBudgetSet omega_model(const NormSpec& spec, const Eigen::MatrixXd& tuple, double tol) {
  require(tuple.rows() == spec.dim(), "tuple dimension mismatch");
  require(!spec.is_pseudonorm(), "the dual ball of a pseudonorm is not weak*-compact in these coordinates");
  const int n = spec.dim(), k = int(tuple.cols());
  require(matrix_rank<double>(tuple, 1e-10) == n, "tuple does not span the space");
  TailBudgetSet out;
  out.head_dim = k;
  out.pieces.push_back(BudgetPiece{VecQ::Zero(k), 0});
  std::vector<VecQ> rows;
  std::vector<Rational> rhs;
  if (k == n) {
    // h = X' f, so |f . v| <= 1 becomes |h . X^-1 v| <= 1
    MatQ xq = exact_rational(tuple);
    Eigen::FullPivLU<MatQ> lu(xq);
    std::vector<VecQ> verts;
    const PolytopeRep* rep = spec.polytope();
    if (rep && rep->has_vertices && rep->exact) {
      verts = rep->vertices_q;
    } else {
      // facets through net points overshoot the dual ball by about mesh^2 / 2
      EpsNet net = eps_net(spec, Eigen::MatrixXd::Identity(n, n), std::min(0.5, std::sqrt(2 * tol)));
      for (const auto& p : net.points) verts.push_back(exact_rational(p));
    }
    for (const auto& v : verts) {
      VecQ r = lu.solve(v);
      rows.push_back(r);
      rhs.push_back(1);
    }
  } else {
    require(k <= 12, "tuple too long for the subset description");
    for (int mask = 1; mask < (1 << k); ++mask) {
      VecQ r = VecQ::Zero(k);
      Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < k; ++i)
        if (mask >> i & 1) {
          r[i] = 1;
          s += tuple.col(i);
        }
      auto ex = eval_norm_exact(spec, exact_rational(s));
      rows.push_back(r);
      rhs.push_back(ex ? *ex : exact_rational(eval_norm(spec, s)));
    }
  }
  out.a.resize(2 * rows.size(), k);
  out.c.resize(2 * rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.a.row(2 * i) = rows[i].transpose();
    out.a.row(2 * i + 1) = -rows[i].transpose();
    out.c[2 * i] = out.c[2 * i + 1] = rhs[i];
  }
  return out;
}

MaxBudget max_budget(const TailBudgetSet& k) {
  check_shape(k);
  MaxBudget out;
  if (k.empty) {
    out.empty = true;
    return out;
  }
  QLp lp;
  auto h = add_head(lp, k);
  int s = lp.add_var(-1, true);
  add_budget(lp, k, h, s);
  auto sol = lp.minimize();
  if (sol.status == LpStatus::infeasible) {
    out.empty = true;
    return out;
  }
  if (sol.status == LpStatus::unbounded) {
    out.unbounded = true;
    return out;
  }
  if (!sol.optimal()) throw SolverError("exact LP did not terminate");
  out.value = -sol.objective;
  if (out.value < 0) out.empty = true;
  return out;
}

bool is_empty(const TailBudgetSet& k) { return max_budget(k).empty; }

TailBudgetSet szlenk_derivative(const TailBudgetSet& k, const Rational& eps) {
  require(eps > 0, "eps must be positive");
  if (k.empty) return k;
  TailBudgetSet out = k;
  for (auto& p : out.pieces) p.offset -= eps / 2;
  out.empty = is_empty(out);
  return out;
}

TailBudgetSet scale(const TailBudgetSet& k, const Rational& r) {
  require(r > 0, "scaling factor must be positive");
  TailBudgetSet out = k;
  out.c = k.c * r;
  for (auto& p : out.pieces) p.offset *= r;
  return out;
}

Inclusion includes(const TailBudgetSet& outer, const TailBudgetSet& inner) {
  require(outer.head_dim == inner.head_dim, "head dimensions differ");
  Inclusion res;
  bool inner_empty = inner.empty || is_empty(inner);
  if (inner_empty) return res;
  if (outer.empty || is_empty(outer)) {
    res.contained = false;
    res.violation = kInf;
    return res;
  }
  auto note = [&](const Sup& s) {
    if (!s.feasible) return;
    if (s.unbounded) {
      res.contained = false;
      res.violation = kInf;
    } else if (s.value > 0) {
      res.contained = false;
      res.violation = std::max(res.violation, to_double(s.value));
    }
  };
  for (Eigen::Index r = 0; r < outer.a.rows(); ++r)
    note(sup_over(inner, VecQ(outer.a.row(r).transpose()), 0, -outer.c[r]));
  for (const auto& p : outer.pieces) note(sup_over(inner, VecQ(-p.slope), 1, -p.offset));
  return res;
}

bool same_set(const TailBudgetSet& a, const TailBudgetSet& b) {
  return includes(a, b).contained && includes(b, a).contained;
}

MeshResult szlenk_bruteforce(const PolytopeCompact& k, double eps, double mesh) {
  require(eps > 0 && mesh > 0, "eps and mesh must be positive");
  MeshResult out;
  const auto& pts = k.points;
  out.min_gap = kInf;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      out.min_gap = std::min(out.min_gap, (pts[i] - pts[j]).cwiseAbs().maxCoeff());
  for (const auto& x : pts) {
    bool survive = true;
    for (double r = 1; r >= mesh && survive; r /= 2) {
      double diam = 0;
      for (size_t i = 0; i < pts.size(); ++i) {
        if ((pts[i] - x).cwiseAbs().maxCoeff() > r) continue;
        for (size_t j = i + 1; j < pts.size(); ++j)
          if ((pts[j] - x).cwiseAbs().maxCoeff() <= r) diam = std::max(diam, (pts[i] - pts[j]).cwiseAbs().sum());
      }
      survive = diam >= eps;
    }
    if (survive) out.survivors.points.push_back(x);
  }
  out.mesh_limited = !out.survivors.points.empty();
  return out;
}

long szlenk_index_at(const TailBudgetSet& k, const Rational& eps, long cap) {
  require(eps > 0, "eps must be positive");
  MaxBudget mb = max_budget(k);
  if (mb.empty) return 0;
  if (mb.unbounded) throw SolverError("iteration cap exceeded: unbounded budget");
  // each derivative lowers every piece, hence the maximum, by eps/2
  Rational steps = mb.value / (eps / 2);
  long count = long(boost::multiprecision::numerator(steps) / boost::multiprecision::denominator(steps)) + 1;
  if (count > cap) throw SolverError("iteration cap exceeded", double(count));
  return count;
}

SummableResult summable_check(const TailBudgetSet& k, int grid_bits, long max_terms) {
  require(grid_bits >= 0 && max_terms >= 1, "bad grid configuration");
  SummableResult out;
  MaxBudget mb = max_budget(k);
  if (mb.empty) {
    out.summable = true;
    out.verified = true;
    return out;
  }
  if (mb.unbounded) return out;
  out.summable = true;
  // nonempty after s_{e_1} ... s_{e_n} iff sum e_i / 2 <= max budget
  Rational unit = Rational(1) / Rational(boost::multiprecision::mpz_int(1) << grid_bits);
  Rational units = 2 * mb.value / unit;
  Rational total = Rational(boost::multiprecision::numerator(units) / boost::multiprecision::denominator(units)) * unit;
  out.m = total;
  // binary expansion of the total: distinct dyadic terms
  Rational rest = total;
  for (Rational term = 1 << 20; rest > 0 && term >= unit; term /= 2) {
    while (rest >= term && long(out.sequence.size()) < max_terms) {
      out.sequence.push_back(term);
      rest -= term;
    }
  }
  if (rest != 0) return out;
  TailBudgetSet cur = k;
  for (const auto& e : out.sequence) cur = szlenk_derivative(cur, e);
  bool alive = !cur.empty;
  bool next_dies = szlenk_derivative(cur, unit).empty;
  out.verified = alive && next_dies;
  return out;
}

C0Check c0_predicate(const TailBudgetSet& k, const Rational& eps) {
  require(eps > 0 && eps < 1, "eps must lie in (0,1)");
  TailBudgetSet d = szlenk_derivative(k, 2 * eps);
  TailBudgetSet s = scale(k, 1 - eps);
  Inclusion a = includes(d, s), b = includes(s, d);
  C0Check out;
  out.holds = a.contained && b.contained;
  out.discrepancy = std::max(a.violation, b.violation);
  return out;
}

}  // namespace bwb
