#include "node.hpp"

#include "bwb/dense.hpp"
#include "bwb/polytope.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <mutex>

namespace bwb {


// ---------------------------------------------------------------- Exponent

Exponent Exponent::from_double(double p) {
  if (std::isinf(p)) return infinity();
  return finite(nearest_rational(p, 1L << 20));
}

double Exponent::as_double() const {
  return kind == Kind::finite ? to_double(value) : std::numeric_limits<double>::infinity();
}

double Exponent::conjugate() const {
  if (is_sup()) return 1.0;
  if (value == 1) return std::numeric_limits<double>::infinity();
  double p = as_double();
  return p / (p - 1.0);
}

Exponent parse_exponent(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "oo") return Exponent::infinity();
  if (text == "0" || text == "c0") return Exponent::c0();
  Rational p = parse_rational(text);
  require(p >= 1, "exponent p must be >= 1, got " + text);
  return Exponent::finite(p);
}

std::string to_string(const Exponent& p) {
  switch (p.kind) {
    case Exponent::Kind::infinity: return "inf";
    case Exponent::Kind::c0: return "0";
    default: return to_string(p.value);
  }
}

// ---------------------------------------------------------------- helpers

VecQ unit_vector_q(int dim, int i) {
  VecQ v = VecQ::Zero(dim);
  v[i] = 1;
  return v;
}

Eigen::VectorXd unit_vector(int dim, int i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  v[i] = 1;
  return v;
}

namespace {

MatQ columns_of(const std::vector<VecQ>& vs, int rows) {
  MatQ m(rows, int(vs.size()));
  for (size_t j = 0; j < vs.size(); ++j) m.col(int(j)) = vs[j];
  return m;
}

// basis of the column span
MatQ column_basis(const MatQ& m) {
  auto piv = greedy_independent_columns<Rational>(m);
  MatQ out(m.rows(), int(piv.size()));
  for (size_t k = 0; k < piv.size(); ++k) out.col(int(k)) = m.col(piv[k]);
  return out;
}

MatQ empty_kernel(int dim) { return MatQ(dim, 0); }

std::vector<VecQ> sign_vectors(int n) {
  std::vector<VecQ> out;
  for (long pat = 0; pat < (1L << (n - 1)); ++pat) {
    VecQ s(n);
    s[0] = 1;
    for (int i = 1; i < n; ++i) s[i] = (pat >> (i - 1)) & 1 ? -1 : 1;
    out.push_back(s);
  }
  return out;
}

constexpr long kFacetCap = 4096;

void finish_double(PolytopeRep& r, int dim) {
  r.vertices = Eigen::MatrixXd(dim, int(r.vertices_q.size()));
  for (size_t j = 0; j < r.vertices_q.size(); ++j) r.vertices.col(int(j)) = to_double(r.vertices_q[j]);
  r.facets = Eigen::MatrixXd(int(r.facets_q.size()), dim);
  for (size_t j = 0; j < r.facets_q.size(); ++j)
    r.facets.row(int(j)) = to_double(r.facets_q[j]).transpose();
}

std::unique_ptr<PolytopeRep> compute_polytope(const NormSpec& s);

std::vector<VecQ> embed_block(const std::vector<VecQ>& vs, int offset, int total) {
  std::vector<VecQ> out;
  for (const auto& v : vs) {
    VecQ e = VecQ::Zero(total);
    e.segment(offset, v.size()) = v;
    out.push_back(e);
  }
  return out;
}

// all signed tuples (one block vector from each part), up to a global sign
std::optional<std::vector<VecQ>> signed_products(const std::vector<std::vector<VecQ>>& blocks,
                                                 const std::vector<int>& dims, int total) {
  long count = 1;
  for (const auto& b : blocks) {
    count *= long(2 * b.size());
    if (count > 2 * kFacetCap) return std::nullopt;
  }
  count /= 2;
  std::vector<VecQ> out;
  std::vector<size_t> idx(blocks.size(), 0);
  std::vector<int> sg(blocks.size(), 1);
  std::function<void(size_t, VecQ&)> rec = [&](size_t k, VecQ& acc) {
    if (k == blocks.size()) {
      out.push_back(acc);
      return;
    }
    int off = 0;
    for (size_t j = 0; j < k; ++j) off += dims[j];
    for (const auto& v : blocks[k]) {
      for (int sign : {1, -1}) {
        if (k == 0 && sign < 0) continue;
        acc.segment(off, v.size()) = v * Rational(sign);
        rec(k + 1, acc);
      }
    }
  };
  VecQ acc = VecQ::Zero(total);
  rec(0, acc);
  return out;
}

std::unique_ptr<PolytopeRep> compute_polytope(const NormSpec& s) {
  if (s.is_pseudonorm()) return nullptr;
  const int n = s.dim();
  auto rep = std::make_unique<PolytopeRep>();
  rep->exact = true;
  const auto& d = s.descriptor().value;

  if (auto* lp = std::get_if<LpDesc>(&d)) {
    if (lp->p.is(1)) {
      for (int i = 0; i < n; ++i) rep->vertices_q.push_back(unit_vector_q(n, i));
      rep->has_vertices = true;
      if ((1L << std::min(n - 1, 40)) <= kFacetCap) {
        rep->facets_q = sign_vectors(n);
        rep->has_facets = true;
      }
    } else if (lp->p.is_sup()) {
      for (int i = 0; i < n; ++i) rep->facets_q.push_back(unit_vector_q(n, i));
      rep->has_facets = true;
      if ((1L << std::min(n - 1, 40)) <= kFacetCap) {
        rep->vertices_q = sign_vectors(n);
        rep->has_vertices = true;
      }
    } else {
      return nullptr;
    }
  } else if (auto* g = std::get_if<GeneratorsDesc>(&d)) {
    auto gens = dedupe_up_to_sign(g->generators);
    auto facets = symmetric_vertices_exact(gens, n);
    if (facets) {
      rep->facets_q = *facets;
      rep->has_facets = true;
      MatQ fm = columns_of(*facets, n).transpose();
      for (const auto& v : gens) {
        VecQ vals = fm * v;
        std::vector<int> tight;
        for (int i = 0; i < vals.size(); ++i)
          if (abs(vals[i]) == 1) tight.push_back(i);
        if (int(tight.size()) < n) continue;
        MatQ t(int(tight.size()), n);
        for (size_t r = 0; r < tight.size(); ++r) t.row(int(r)) = fm.row(tight[r]);
        if (matrix_rank<Rational>(t) == n) rep->vertices_q.push_back(v);
      }
    } else {
      rep->vertices_q = gens;  // superset of the extreme points
    }
    rep->has_vertices = true;
  } else if (auto* f = std::get_if<FacetsDesc>(&d)) {
    rep->facets_q = dedupe_up_to_sign(f->functionals);
    rep->has_facets = true;
    if (auto v = symmetric_vertices_exact(rep->facets_q, n)) {
      rep->vertices_q = *v;
      rep->has_vertices = true;
    }
  } else if (auto* ck = std::get_if<FiniteCKDesc>(&d)) {
    std::vector<VecQ> rows;
    for (int i = 0; i < ck->evaluations.rows(); ++i) rows.push_back(ck->evaluations.row(i).transpose());
    rep->facets_q = dedupe_up_to_sign(rows);
    rep->has_facets = true;
    if (auto v = symmetric_vertices_exact(rep->facets_q, n)) {
      rep->vertices_q = *v;
      rep->has_vertices = true;
    }
  } else if (auto* dl = std::get_if<DiscreteLpDesc>(&d)) {
    if (dl->p.is(1)) {
      for (int i = 0; i < n; ++i) rep->vertices_q.push_back(unit_vector_q(n, i) / dl->weights[i]);
      rep->has_vertices = true;
      if ((1L << std::min(n - 1, 40)) <= kFacetCap) {
        for (auto sv : sign_vectors(n)) {
          for (int i = 0; i < n; ++i) sv[i] *= dl->weights[i];
          rep->facets_q.push_back(sv);
        }
        rep->has_facets = true;
      }
    } else if (dl->p.is_sup()) {
      for (int i = 0; i < n; ++i) rep->facets_q.push_back(unit_vector_q(n, i));
      rep->has_facets = true;
      if ((1L << std::min(n - 1, 40)) <= kFacetCap) {
        rep->vertices_q = sign_vectors(n);
        rep->has_vertices = true;
      }
    } else {
      return nullptr;
    }
  } else if (auto* pb = std::get_if<PullbackDesc>(&d)) {
    const PolytopeRep* hr = pb->host.polytope();
    const auto& hd = pb->host.descriptor().value;
    std::optional<VecQ> l1w;
    if (auto* hl = std::get_if<LpDesc>(&hd); hl && hl->p.is(1)) l1w = VecQ::Ones(hl->dim);
    if (auto* hw = std::get_if<DiscreteLpDesc>(&hd); hw && hw->p.is(1)) {
      VecQ w(hw->weights.size());
      for (size_t i = 0; i < hw->weights.size(); ++i) w[int(i)] = hw->weights[i];
      l1w = w;
    }
    if (hr && hr->has_facets) {
      for (const auto& fq : hr->facets_q) rep->facets_q.push_back(pb->matrix.transpose() * fq);
      rep->facets_q = dedupe_up_to_sign(rep->facets_q);
      rep->has_facets = true;
    }
    if (l1w) {
      if (auto v = weighted_l1_section_vertices_exact(pb->matrix, *l1w)) {
        rep->vertices_q = *v;
        rep->has_vertices = true;
      }
    } else if (rep->has_facets) {
      if (auto v = symmetric_vertices_exact(rep->facets_q, n)) {
        rep->vertices_q = *v;
        rep->has_vertices = true;
      }
    }
    if (!rep->has_vertices && !rep->has_facets) return nullptr;
  } else if (auto* ds = std::get_if<DirectSumDesc>(&d)) {
    std::vector<const PolytopeRep*> reps;
    std::vector<int> dims;
    for (const auto& part : ds->parts) {
      reps.push_back(part.polytope());
      dims.push_back(part.dim());
      if (!reps.back()) return nullptr;
    }
    const bool l1 = ds->p.is(1);
    const bool sup = ds->p.is_sup();
    if (!l1 && !sup) return nullptr;
    // the "union" side and the "product" side swap between the two sums
    std::vector<std::vector<VecQ>> unions_src, prod_src;
    bool union_ok = true, prod_ok = true;
    for (auto* r : reps) {
      bool has_u = l1 ? r->has_vertices : r->has_facets;
      bool has_p = l1 ? r->has_facets : r->has_vertices;
      union_ok = union_ok && has_u;
      prod_ok = prod_ok && has_p;
      unions_src.push_back(l1 ? r->vertices_q : r->facets_q);
      prod_src.push_back(l1 ? r->facets_q : r->vertices_q);
    }
    std::vector<VecQ> uni;
    if (union_ok) {
      int off = 0;
      for (size_t k = 0; k < reps.size(); ++k) {
        auto e = embed_block(unions_src[k], off, n);
        uni.insert(uni.end(), e.begin(), e.end());
        off += dims[k];
      }
    }
    std::optional<std::vector<VecQ>> prod;
    if (prod_ok) prod = signed_products(prod_src, dims, n);
    if (l1) {
      rep->has_vertices = union_ok;
      rep->vertices_q = uni;
      if (prod) { rep->facets_q = *prod; rep->has_facets = true; }
    } else {
      rep->has_facets = union_ok;
      rep->facets_q = uni;
      if (prod) { rep->vertices_q = *prod; rep->has_vertices = true; }
    }
    if (!rep->has_vertices && !rep->has_facets) return nullptr;
  } else {
    return nullptr;  // quotient: evaluated lazily, no global enumeration
  }
  finish_double(*rep, n);
  return rep;
}

bool is_positive_definite(const Eigen::MatrixXd& g) {
  if (g.rows() == 0) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  return es.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
}

}  // namespace

// ---------------------------------------------------------------- NormSpec

int NormSpec::dim() const { return node_->dim; }
const Descriptor& NormSpec::descriptor() const { return node_->desc; }
std::string NormSpec::kind() const { return node_->kind; }
const MatQ& NormSpec::kernel() const { return node_->kernel; }
const Eigen::MatrixXd& NormSpec::kernel_double() const { return node_->kernel_d; }
const Eigen::MatrixXd* NormSpec::gram() const { return node_->gram ? &*node_->gram : nullptr; }
bool NormSpec::lp_representable() const { return node_->lp_repr; }
bool NormSpec::exact() const { return node_->exact; }

const PolytopeRep* NormSpec::polytope() const {
  std::call_once(node_->poly_once, [this] { node_->poly = compute_polytope(*this); });
  return node_->poly.get();
}

NormSpec construct_space(const Descriptor& desc) {
  auto node = std::make_shared<detail::Node>();
  node->desc = desc;
  const auto& d = node->desc.value;

  if (auto* lp = std::get_if<LpDesc>(&d)) {
    require(lp->dim >= 1, "Lp dimension must be >= 1");
    require(lp->p.is_sup() || lp->p.value >= 1, "exponent p must be >= 1");
    node->kind = "lp";
    node->dim = lp->dim;
    node->kernel = empty_kernel(lp->dim);
    node->lp_repr = lp->p.is_sup() || lp->p.is(1);
    if (lp->p.is(2)) node->gram = Eigen::MatrixXd::Identity(lp->dim, lp->dim);
  } else if (auto* g = std::get_if<GeneratorsDesc>(&d)) {
    require(!g->generators.empty(), "empty generator list");
    const int n = int(g->generators[0].size());
    require(n >= 1, "generators must have positive dimension");
    for (const auto& v : g->generators) require(int(v.size()) == n, "generator dimension mismatch");
    node->kind = "polytope_generators";
    node->dim = n;
    MatQ gm = columns_of(g->generators, n);
    node->kernel = nullspace<Rational>(MatQ(gm.transpose()));
    node->mat = to_double(gm);
    node->lp_repr = true;
  } else if (auto* f = std::get_if<FacetsDesc>(&d)) {
    require(!f->functionals.empty(), "empty functional list");
    const int n = int(f->functionals[0].size());
    require(n >= 1, "functionals must have positive dimension");
    for (const auto& v : f->functionals) require(int(v.size()) == n, "functional dimension mismatch");
    node->kind = "polytope_facets";
    node->dim = n;
    MatQ fm = columns_of(f->functionals, n).transpose();
    node->kernel = nullspace<Rational>(fm);
    node->mat = to_double(fm);
    node->lp_repr = true;
  } else if (auto* pb = std::get_if<PullbackDesc>(&d)) {
    require(pb->host.valid(), "pullback without host");
    require(pb->matrix.rows() == pb->host.dim(), "pullback matrix rows must equal host dimension");
    require(pb->matrix.cols() >= 1, "pullback matrix needs at least one column");
    node->kind = "pullback";
    node->dim = int(pb->matrix.cols());
    const MatQ& hk = pb->host.kernel();
    MatQ joined(pb->matrix.rows(), pb->matrix.cols() + hk.cols());
    joined.leftCols(pb->matrix.cols()) = pb->matrix;
    if (hk.cols() > 0) joined.rightCols(hk.cols()) = -hk;
    MatQ ns = nullspace<Rational>(joined);
    node->kernel = column_basis(MatQ(ns.topRows(pb->matrix.cols())));
    node->mat = to_double(pb->matrix);
    node->lp_repr = pb->host.lp_representable();
    node->exact = pb->host.exact();
    if (auto* hg = pb->host.gram()) {
      Eigen::MatrixXd gg = node->mat.transpose() * (*hg) * node->mat;
      if (is_positive_definite(gg)) node->gram = gg;
    }
  } else if (auto* ds = std::get_if<DirectSumDesc>(&d)) {
    require(!ds->parts.empty(), "direct sum of an empty family");
    require(ds->p.is_sup() || ds->p.value >= 1, "exponent p must be >= 1");
    node->kind = "direct_sum";
    int n = 0, kcols = 0;
    bool lp_ok = ds->p.is_sup() || ds->p.is(1);
    bool all_gram = ds->p.is(2);
    for (const auto& part : ds->parts) {
      require(part.valid(), "direct sum part missing");
      n += part.dim();
      kcols += int(part.kernel().cols());
      lp_ok = lp_ok && part.lp_representable();
      all_gram = all_gram && part.gram();
      node->exact = node->exact && part.exact();
    }
    node->dim = n;
    node->kernel = MatQ::Zero(n, kcols);
    int off = 0, kc = 0;
    for (const auto& part : ds->parts) {
      const MatQ& pk = part.kernel();
      if (pk.cols() > 0) node->kernel.block(off, kc, part.dim(), pk.cols()) = pk;
      off += part.dim();
      kc += int(pk.cols());
    }
    node->lp_repr = lp_ok;
    if (all_gram) {
      Eigen::MatrixXd gg = Eigen::MatrixXd::Zero(n, n);
      off = 0;
      for (const auto& part : ds->parts) {
        gg.block(off, off, part.dim(), part.dim()) = *part.gram();
        off += part.dim();
      }
      node->gram = gg;
    }
  } else if (auto* q = std::get_if<QuotientDesc>(&d)) {
    require(q->host.valid(), "quotient without host");
    const int n = q->host.dim();
    for (const auto& v : q->basis) require(int(v.size()) == n, "quotient basis dimension mismatch");
    node->kind = "quotient";
    node->dim = n;
    MatQ z = columns_of(q->basis, n);
    require(matrix_rank<Rational>(z) == int(q->basis.size()),
            "quotient subspace basis is linearly dependent");
    const MatQ& hk = q->host.kernel();
    MatQ joined(n, z.cols() + hk.cols());
    if (hk.cols() > 0) joined.leftCols(hk.cols()) = hk;
    if (z.cols() > 0) joined.rightCols(z.cols()) = z;
    node->kernel = column_basis(joined);
    node->mat = to_double(z);
    node->lp_repr = q->host.lp_representable();
    node->exact = q->basis.empty() && q->host.exact();
  } else if (auto* dl = std::get_if<DiscreteLpDesc>(&d)) {
    require(!dl->weights.empty(), "discrete L_p needs at least one atom");
    require(dl->p.is_sup() || dl->p.value >= 1, "exponent p must be >= 1");
    const int n = int(dl->weights.size());
    node->kind = "discrete_lp";
    node->dim = n;
    node->weights.resize(n);
    std::vector<VecQ> ker;
    for (int i = 0; i < n; ++i) {
      require(dl->weights[i] >= 0, "negative atom weight");
      node->weights[i] = to_double(dl->weights[i]);
      if (dl->weights[i] == 0) ker.push_back(unit_vector_q(n, i));
    }
    node->kernel = columns_of(ker, n);
    node->lp_repr = dl->p.is_sup() || dl->p.is(1);
    if (dl->p.is(2) && ker.empty()) node->gram = Eigen::MatrixXd(node->weights.asDiagonal());
  } else if (auto* ck = std::get_if<FiniteCKDesc>(&d)) {
    require(ck->evaluations.rows() >= 1, "finite C(K) needs a nonempty K");
    require(ck->evaluations.cols() >= 1, "finite C(K) needs at least one coordinate");
    node->kind = "finite_ck";
    node->dim = int(ck->evaluations.cols());
    node->kernel = nullspace<Rational>(ck->evaluations);
    node->mat = to_double(ck->evaluations);
    node->lp_repr = true;
  }
  node->kernel_d = to_double(node->kernel);
  NormSpec s;
  s.node_ = std::move(node);
  return s;
}

NormSpec lp_space(const Exponent& p, int dim) { return construct_space({LpDesc{p, dim}}); }

NormSpec lp_space(double p, int dim) { return lp_space(Exponent::from_double(p), dim); }

NormSpec polytope_by_generators(std::vector<VecQ> generators) {
  return construct_space({GeneratorsDesc{std::move(generators)}});
}

NormSpec polytope_by_facets(std::vector<VecQ> functionals) {
  return construct_space({FacetsDesc{std::move(functionals)}});
}

NormSpec pullback(MatQ matrix, NormSpec host) {
  return construct_space({PullbackDesc{std::move(matrix), std::move(host)}});
}

NormSpec pullback(const Eigen::MatrixXd& matrix, NormSpec host) {
  return pullback(exact_rational(matrix), std::move(host));
}

NormSpec direct_sum(const Exponent& p, std::vector<NormSpec> parts) {
  return construct_space({DirectSumDesc{p, std::move(parts)}});
}

NormSpec quotient(NormSpec host, std::vector<VecQ> basis) {
  return construct_space({QuotientDesc{std::move(host), std::move(basis)}});
}

NormSpec discrete_lp(const Exponent& p, std::vector<Rational> weights) {
  return construct_space({DiscreteLpDesc{p, std::move(weights)}});
}

NormSpec finite_ck(MatQ evaluations) { return construct_space({FiniteCKDesc{std::move(evaluations)}}); }

}  // namespace bwb
