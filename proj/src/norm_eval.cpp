#include "bwb/lp.hpp"
#include "bwb/norm_spec.hpp"
#include "node.hpp"
#include "bwb/optim.hpp"

#include <cmath>
#include <limits>

namespace bwb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lp_norm_of(const Eigen::VectorXd& v, const Exponent& p) {
  if (v.size() == 0) return 0;
  if (p.is_sup()) return v.cwiseAbs().maxCoeff();
  if (p.is(1)) return v.cwiseAbs().sum();
  double m = v.cwiseAbs().maxCoeff();
  if (m == 0) return 0;
  double pp = p.as_double();
  double s = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::fabs(v[i]) / m, pp);
  return m * std::pow(s, 1.0 / pp);
}

// ---------------------------------------------------------------- LP model

struct Affine {
  std::vector<std::pair<int, double>> t;
  double c = 0;
};

using DLp = LinearProgram<double>;

void add_rel(DLp& lp, const Affine& e, RowSense s) { lp.add_row(e.t, s, -e.c); }

Affine lin(const std::vector<Affine>& x, const Eigen::RowVectorXd& coeffs) {
  Affine out;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    double a = coeffs[i];
    if (a == 0) continue;
    for (const auto& [var, c] : x[i].t) out.t.emplace_back(var, a * c);
    out.c += a * x[i].c;
  }
  return out;
}

Affine with_var(Affine e, int var, double coef) {
  e.t.emplace_back(var, coef);
  return e;
}

Affine neg(Affine e) {
  for (auto& tc : e.t) tc.second = -tc.second;
  e.c = -e.c;
  return e;
}

std::vector<Affine> map_affine(const Eigen::MatrixXd& m, const std::vector<Affine>& x) {
  std::vector<Affine> out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(lin(x, m.row(r)));
  return out;
}

void bound_abs(DLp& lp, const Affine& y, int s, double scale = 1.0) {
  add_rel(lp, with_var(y, s, -scale), RowSense::le);
  add_rel(lp, with_var(neg(y), s, -scale), RowSense::le);
}

bool build_epigraph(const NormSpec& spec, const std::vector<Affine>& x, int s, DLp& lp) {
  const auto& d = spec.descriptor().value;
  if (auto* lp1 = std::get_if<LpDesc>(&d)) {
    if (lp1->p.is_sup()) {
      for (const auto& xi : x) bound_abs(lp, xi, s);
      return true;
    }
    if (lp1->p.is(1)) {
      Affine total;
      for (const auto& xi : x) {
        int a = lp.add_var(0, false);
        bound_abs(lp, xi, a);
        total.t.emplace_back(a, 1.0);
      }
      add_rel(lp, with_var(total, s, -1), RowSense::le);
      return true;
    }
    return false;
  }
  if (auto* dl = std::get_if<DiscreteLpDesc>(&d)) {
    if (dl->p.is_sup()) {
      for (size_t i = 0; i < x.size(); ++i)
        if (dl->weights[i] > 0) bound_abs(lp, x[i], s);
      return true;
    }
    if (dl->p.is(1)) {
      Affine total;
      for (size_t i = 0; i < x.size(); ++i) {
        int a = lp.add_var(0, false);
        bound_abs(lp, x[i], a);
        total.t.emplace_back(a, to_double(dl->weights[i]));
      }
      add_rel(lp, with_var(total, s, -1), RowSense::le);
      return true;
    }
    return false;
  }
  if (std::holds_alternative<FacetsDesc>(d) || std::holds_alternative<FiniteCKDesc>(d)) {
    for (const auto& y : map_affine(spec.node().mat, x)) bound_abs(lp, y, s);
    return true;
  }
  if (auto* g = std::get_if<GeneratorsDesc>(&d)) {
    const PolytopeRep* rep = spec.polytope();
    if (rep && rep->has_facets) {
      for (const auto& y : map_affine(rep->facets, x)) bound_abs(lp, y, s);
      return true;
    }
    const int n = spec.dim();
    std::vector<Affine> resid = x;  // x - G(l+ - l-) - W mu == 0
    Affine total;
    for (const auto& gen : g->generators) {
      Eigen::VectorXd gd = to_double(gen);
      int lp_pos = lp.add_var(0, false), lp_neg = lp.add_var(0, false);
      total.t.emplace_back(lp_pos, 1.0);
      total.t.emplace_back(lp_neg, 1.0);
      for (int i = 0; i < n; ++i) {
        if (gd[i] == 0) continue;
        resid[i].t.emplace_back(lp_pos, -gd[i]);
        resid[i].t.emplace_back(lp_neg, gd[i]);
      }
    }
    const Eigen::MatrixXd& w = spec.kernel_double();
    for (Eigen::Index k = 0; k < w.cols(); ++k) {
      int mu = lp.add_var(0, true);
      for (int i = 0; i < n; ++i)
        if (w(i, k) != 0) resid[i].t.emplace_back(mu, -w(i, k));
    }
    for (const auto& r : resid) add_rel(lp, r, RowSense::eq);
    add_rel(lp, with_var(total, s, -1), RowSense::le);
    return true;
  }
  if (auto* pb = std::get_if<PullbackDesc>(&d)) {
    return build_epigraph(pb->host, map_affine(spec.node().mat, x), s, lp);
  }
  if (auto* ds = std::get_if<DirectSumDesc>(&d)) {
    if (!ds->p.is_sup() && !ds->p.is(1)) return false;
    Affine total;
    size_t off = 0;
    for (const auto& part : ds->parts) {
      std::vector<Affine> xp(x.begin() + off, x.begin() + off + part.dim());
      off += part.dim();
      int sp = s;
      if (ds->p.is(1)) {
        sp = lp.add_var(0, false);
        total.t.emplace_back(sp, 1.0);
      }
      if (!build_epigraph(part, xp, sp, lp)) return false;
    }
    if (ds->p.is(1)) add_rel(lp, with_var(total, s, -1), RowSense::le);
    return true;
  }
  if (auto* q = std::get_if<QuotientDesc>(&d)) {
    std::vector<Affine> y = x;
    for (const auto& z : q->basis) {
      int t = lp.add_var(0, true);
      for (Eigen::Index i = 0; i < z.size(); ++i)
        if (z[i] != 0) y[i].t.emplace_back(t, -to_double(z[i]));
    }
    return build_epigraph(q->host, y, s, lp);
  }
  return false;
}

std::vector<Affine> constants(const Eigen::VectorXd& v) {
  std::vector<Affine> x(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) x[i].c = v[i];
  return x;
}

double lp_eval(const NormSpec& spec, const Eigen::VectorXd& v) {
  DLp lp;
  int s = lp.add_var(1.0, false);
  if (!build_epigraph(spec, constants(v), s, lp))
    throw SolverError("descriptor has no linear-programming model");
  auto sol = lp.minimize();
  if (!sol.optimal()) throw SolverError(std::string("norm LP ended ") + to_string(sol.status));
  return std::max(0.0, sol.x[s]);
}

// ---------------------------------------------------------------- helpers

double radius_hint(const NormSpec& host, const Eigen::MatrixXd& z, const Eigen::VectorXd& w) {
  // smallest ||z u|| / |u| over a few probe directions, as a coercivity estimate
  const int k = int(z.cols());
  double c = kInf;
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd u = unit_vector(k, j);
    c = std::min(c, eval_norm(host, Eigen::VectorXd(z * u)));
    for (int i = j + 1; i < k; ++i) {
      for (double sg : {1.0, -1.0}) {
        Eigen::VectorXd uu = (unit_vector(k, j) + sg * unit_vector(k, i)) / std::sqrt(2.0);
        c = std::min(c, eval_norm(host, Eigen::VectorXd(z * uu)));
      }
    }
  }
  double hw = eval_norm(host, w);
  if (!(c > 1e-9)) c = 1e-9;
  return std::min(1e7, 4.0 * (hw + 1.0) / c);
}

}  // namespace

// ---------------------------------------------------------------- evaluation

double eval_norm(const NormSpec& spec, const Eigen::VectorXd& v) {
  require(v.size() == spec.dim(), "dimension mismatch: vector has " + std::to_string(v.size()) +
                                      " coordinates, space has " + std::to_string(spec.dim()));
  const auto& d = spec.descriptor().value;
  if (auto* lp = std::get_if<LpDesc>(&d)) return lp_norm_of(v, lp->p);
  if (auto* dl = std::get_if<DiscreteLpDesc>(&d)) {
    const Eigen::VectorXd& w = spec.node().weights;
    if (dl->p.is_sup()) {
      double m = 0;
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (w[i] > 0) m = std::max(m, std::fabs(v[i]));
      return m;
    }
    if (dl->p.is(1)) return w.dot(v.cwiseAbs());
    double pp = dl->p.as_double();
    double m = v.cwiseAbs().maxCoeff();
    if (m == 0) return 0;
    double s = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += w[i] * std::pow(std::fabs(v[i]) / m, pp);
    return m * std::pow(s, 1.0 / pp);
  }
  if (std::holds_alternative<FacetsDesc>(d) || std::holds_alternative<FiniteCKDesc>(d))
    return (spec.node().mat * v).cwiseAbs().maxCoeff();
  if (std::holds_alternative<GeneratorsDesc>(d)) {
    const PolytopeRep* rep = spec.polytope();
    if (rep && rep->has_facets) return (rep->facets * v).cwiseAbs().maxCoeff();
    return lp_eval(spec, v);
  }
  if (auto* pb = std::get_if<PullbackDesc>(&d)) return eval_norm(pb->host, Eigen::VectorXd(spec.node().mat * v));
  if (auto* ds = std::get_if<DirectSumDesc>(&d)) {
    Eigen::VectorXd parts(ds->parts.size());
    int off = 0;
    for (size_t k = 0; k < ds->parts.size(); ++k) {
      int n = ds->parts[k].dim();
      parts[int(k)] = eval_norm(ds->parts[k], Eigen::VectorXd(v.segment(off, n)));
      off += n;
    }
    return lp_norm_of(parts, ds->p);
  }
  if (auto* q = std::get_if<QuotientDesc>(&d)) {
    if (q->basis.empty()) return eval_norm(q->host, v);
    auto r = quotient_norm(q->host, spec.node().mat, v);
    if (!r.converged) throw SolverError("quotient program did not converge", r.gap);
    return r.value;
  }
  throw PreconditionError("unknown descriptor");
}

double eval_norm(const NormSpec& spec, const VecQ& v) { return eval_norm(spec, to_double(v)); }

std::optional<Rational> eval_norm_exact(const NormSpec& spec, const VecQ& v) {
  require(v.size() == spec.dim(), "dimension mismatch");
  const auto& d = spec.descriptor().value;
  auto maxabs = [](const VecQ& y) {
    Rational m = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) m = std::max(m, abs(y[i]));
    return m;
  };
  int nonzero = 0, last = -1;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0) { ++nonzero; last = int(i); }
  if (auto* lp = std::get_if<LpDesc>(&d)) {
    if (lp->p.is_sup()) return maxabs(v);
    if (lp->p.is(1)) {
      Rational s = 0;
      for (Eigen::Index i = 0; i < v.size(); ++i) s += abs(v[i]);
      return s;
    }
    if (nonzero <= 1) return nonzero ? abs(v[last]) : Rational(0);
    return std::nullopt;
  }
  if (auto* dl = std::get_if<DiscreteLpDesc>(&d)) {
    if (dl->p.is_sup()) {
      Rational m = 0;
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dl->weights[i] > 0) m = std::max(m, abs(v[i]));
      return m;
    }
    if (dl->p.is(1)) {
      Rational s = 0;
      for (Eigen::Index i = 0; i < v.size(); ++i) s += dl->weights[i] * abs(v[i]);
      return s;
    }
    if (nonzero == 0) return Rational(0);
    if (nonzero == 1 && dl->weights[last] == 1) return abs(v[last]);
    return std::nullopt;
  }
  if (auto* f = std::get_if<FacetsDesc>(&d)) {
    Rational m = 0;
    for (const auto& fn : f->functionals) m = std::max(m, abs(Rational(fn.dot(v))));
    return m;
  }
  if (auto* ck = std::get_if<FiniteCKDesc>(&d)) return maxabs(VecQ(ck->evaluations * v));
  if (std::holds_alternative<GeneratorsDesc>(d)) {
    const PolytopeRep* rep = spec.polytope();
    if (!rep || !rep->has_facets || !rep->exact) return std::nullopt;
    Rational m = 0;
    for (const auto& fn : rep->facets_q) m = std::max(m, abs(Rational(fn.dot(v))));
    return m;
  }
  if (auto* pb = std::get_if<PullbackDesc>(&d)) return eval_norm_exact(pb->host, VecQ(pb->matrix * v));
  if (auto* ds = std::get_if<DirectSumDesc>(&d)) {
    std::vector<Rational> parts;
    int off = 0, nz = 0;
    for (const auto& part : ds->parts) {
      auto val = eval_norm_exact(part, VecQ(v.segment(off, part.dim())));
      if (!val) return std::nullopt;
      if (*val != 0) ++nz;
      parts.push_back(*val);
      off += part.dim();
    }
    Rational acc = 0;
    if (ds->p.is_sup()) {
      for (auto& x : parts) acc = std::max(acc, x);
      return acc;
    }
    if (ds->p.is(1) || nz <= 1) {
      for (auto& x : parts) acc = ds->p.is(1) ? acc + x : std::max(acc, x);
      return acc;
    }
    return std::nullopt;
  }
  if (auto* q = std::get_if<QuotientDesc>(&d)) {
    if (q->basis.empty()) return eval_norm_exact(q->host, v);
    return std::nullopt;
  }
  return std::nullopt;
}

QuotientResult quotient_norm(const NormSpec& host, const Eigen::MatrixXd& basis,
                             const Eigen::VectorXd& w) {
  require(w.size() == host.dim(), "dimension mismatch in quotient");
  require(basis.rows() == host.dim(), "subspace basis dimension mismatch");
  QuotientResult res;
  const int k = int(basis.cols());
  if (k == 0) {
    res.value = eval_norm(host, w);
    res.coeffs = Eigen::VectorXd(0);
    res.z = Eigen::VectorXd::Zero(w.size());
    res.method = "trivial";
    return res;
  }
  if (host.lp_representable()) {
    DLp lp;
    std::vector<int> t(k);
    for (int j = 0; j < k; ++j) t[j] = lp.add_var(0, true);
    int s = lp.add_var(1.0, false);
    auto x = constants(w);
    for (int i = 0; i < host.dim(); ++i)
      for (int j = 0; j < k; ++j)
        if (basis(i, j) != 0) x[i].t.emplace_back(t[j], -basis(i, j));
    build_epigraph(host, x, s, lp);
    auto sol = lp.minimize();
    if (!sol.optimal())
      throw SolverError(std::string("quotient LP ended ") + to_string(sol.status) +
                        " (host kernel not compatible with the subspace?)");
    res.coeffs.resize(k);
    for (int j = 0; j < k; ++j) res.coeffs[j] = sol.x[t[j]];
    res.z = basis * res.coeffs;
    res.value = std::max(0.0, sol.x[s]);
    res.method = "lp";
    return res;
  }
  SubgradientObjective f = [&](const Eigen::VectorXd& t, Eigen::VectorXd* g) {
    Eigen::VectorXd r = w - basis * t;
    if (g) *g = -basis.transpose() * norming_functional(host, r);
    return eval_norm(host, r);
  };
  double radius = radius_hint(host, basis, w);
  ConvexResult cr;
  for (int attempt = 0; attempt < 5; ++attempt) {
    cr = ellipsoid_minimize(f, Eigen::VectorXd::Zero(k), radius, 1e-11, 10000);
    if (cr.x.norm() < 0.6 * radius) break;
    radius *= 4;
  }
  res.coeffs = cr.x;
  res.z = basis * cr.x;
  res.value = std::max(0.0, cr.value);
  res.gap = cr.value - cr.lower;
  res.converged = res.gap <= 1e-8 * std::max(1.0, res.value);
  res.method = "ellipsoid";
  return res;
}

Eigen::VectorXd norming_functional(const NormSpec& spec, const Eigen::VectorXd& v) {
  require(v.size() == spec.dim(), "dimension mismatch");
  const int n = spec.dim();
  const auto& d = spec.descriptor().value;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  auto argmax_abs = [](const Eigen::VectorXd& y) {
    Eigen::Index i;
    y.cwiseAbs().maxCoeff(&i);
    return int(i);
  };
  auto sgn = [](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); };
  auto lp_grad = [&](const Eigen::VectorXd& y, const Exponent& p, const Eigen::VectorXd* w) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(y.size());
    if (y.size() == 0) return out;
    if (p.is_sup()) {
      Eigen::VectorXd yy = y;
      if (w)
        for (Eigen::Index i = 0; i < y.size(); ++i)
          if ((*w)[i] <= 0) yy[i] = 0;
      int i = argmax_abs(yy);
      out[i] = sgn(yy[i]);
      return out;
    }
    if (p.is(1)) {
      for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = (w ? (*w)[i] : 1.0) * sgn(y[i]);
      return out;
    }
    double pp = p.as_double();
    double m = y.cwiseAbs().maxCoeff();
    if (m == 0) return out;
    Eigen::VectorXd u = y / m;
    double s = 0;
    for (Eigen::Index i = 0; i < u.size(); ++i) s += (w ? (*w)[i] : 1.0) * std::pow(std::fabs(u[i]), pp);
    double nrm = std::pow(s, 1.0 / pp);
    for (Eigen::Index i = 0; i < u.size(); ++i)
      out[i] = (w ? (*w)[i] : 1.0) * sgn(u[i]) * std::pow(std::fabs(u[i]) / nrm, pp - 1);
    return out;
  };
  if (auto* lp = std::get_if<LpDesc>(&d)) return lp_grad(v, lp->p, nullptr);
  if (auto* dl = std::get_if<DiscreteLpDesc>(&d)) return lp_grad(v, dl->p, &spec.node().weights);
  auto facet_grad = [&](const Eigen::MatrixXd& fm) {
    Eigen::VectorXd y = fm * v;
    int i = argmax_abs(y);
    return Eigen::VectorXd(fm.row(i).transpose() * (y[i] < 0 ? -1.0 : 1.0));
  };
  if (std::holds_alternative<FacetsDesc>(d) || std::holds_alternative<FiniteCKDesc>(d))
    return facet_grad(spec.node().mat);
  if (auto* gd = std::get_if<GeneratorsDesc>(&d)) {
    const PolytopeRep* rep = spec.polytope();
    if (rep && rep->has_facets) return facet_grad(rep->facets);
    // dual program: max y.v subject to |g.y| <= 1 and y orthogonal to the kernel
    DLp lp;
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) y[i] = lp.add_var(-v[i], true);
    for (const auto& gq : gd->generators) {
      Eigen::VectorXd gg = to_double(gq);
      DLp::Terms t;
      for (int i = 0; i < n; ++i)
        if (gg[i] != 0) t.emplace_back(y[i], gg[i]);
      lp.add_row(t, RowSense::le, 1.0);
      lp.add_row(t, RowSense::ge, -1.0);
    }
    const Eigen::MatrixXd& w = spec.kernel_double();
    for (Eigen::Index k = 0; k < w.cols(); ++k) {
      DLp::Terms t;
      for (int i = 0; i < n; ++i)
        if (w(i, k) != 0) t.emplace_back(y[i], w(i, k));
      lp.add_row(t, RowSense::eq, 0.0);
    }
    auto sol = lp.minimize();
    if (!sol.optimal()) throw SolverError("generator dual program failed");
    for (int i = 0; i < n; ++i) g[i] = sol.x[y[i]];
    return g;
  }
  if (auto* pb = std::get_if<PullbackDesc>(&d)) {
    const Eigen::MatrixXd& a = spec.node().mat;
    return a.transpose() * norming_functional(pb->host, Eigen::VectorXd(a * v));
  }
  if (auto* ds = std::get_if<DirectSumDesc>(&d)) {
    Eigen::VectorXd norms(ds->parts.size());
    int off = 0;
    for (size_t k = 0; k < ds->parts.size(); ++k) {
      norms[int(k)] = eval_norm(ds->parts[k], Eigen::VectorXd(v.segment(off, ds->parts[k].dim())));
      off += ds->parts[k].dim();
    }
    Eigen::VectorXd outer = lp_grad(norms, ds->p, nullptr);
    off = 0;
    for (size_t k = 0; k < ds->parts.size(); ++k) {
      int pd = ds->parts[k].dim();
      if (outer[int(k)] != 0)
        g.segment(off, pd) =
            outer[int(k)] * norming_functional(ds->parts[k], Eigen::VectorXd(v.segment(off, pd)));
      off += pd;
    }
    return g;
  }
  if (auto* q = std::get_if<QuotientDesc>(&d)) {
    if (q->basis.empty()) return norming_functional(q->host, v);
    auto r = quotient_norm(q->host, spec.node().mat, v);
    return norming_functional(q->host, Eigen::VectorXd(v - r.z));
  }
  return g;
}

std::optional<double> dual_norm(const NormSpec& spec, const Eigen::VectorXd& f) {
  require(f.size() == spec.dim(), "dimension mismatch");
  const Eigen::MatrixXd& ker = spec.kernel_double();
  if (ker.cols() > 0) {
    Eigen::VectorXd proj = ker.transpose() * f;
    double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < ker.cols(); ++k)
      if (std::fabs(proj[k]) > 1e-10 * scale * std::max(1.0, ker.col(k).norm())) return kInf;
  }
  const auto& d = spec.descriptor().value;
  if (auto* lp = std::get_if<LpDesc>(&d)) {
    double q = lp->p.conjugate();
    if (std::isinf(q)) return f.cwiseAbs().maxCoeff();
    if (q == 1.0) return f.cwiseAbs().sum();
    return lp_norm_of(f, Exponent::from_double(q));
  }
  if (auto* dl = std::get_if<DiscreteLpDesc>(&d)) {
    const Eigen::VectorXd& w = spec.node().weights;
    if (dl->p.is(1)) {
      double m = 0;
      for (Eigen::Index i = 0; i < f.size(); ++i)
        if (w[i] > 0) m = std::max(m, std::fabs(f[i]) / w[i]);
      return m;
    }
    if (dl->p.is_sup()) {
      double s = 0;
      for (Eigen::Index i = 0; i < f.size(); ++i)
        if (w[i] > 0) s += std::fabs(f[i]);
      return s;
    }
    double q = dl->p.conjugate();
    double s = 0;
    for (Eigen::Index i = 0; i < f.size(); ++i)
      if (w[i] > 0) s += std::pow(w[i], 1 - q) * std::pow(std::fabs(f[i]), q);
    return std::pow(s, 1 / q);
  }
  if (const PolytopeRep* rep = spec.polytope(); rep && rep->has_vertices) {
    if (rep->vertices.cols() == 0) return 0.0;
    return (rep->vertices.transpose() * f).cwiseAbs().maxCoeff();
  }
  if (const Eigen::MatrixXd* g = spec.gram()) return std::sqrt(std::max(0.0, f.dot(g->ldlt().solve(f))));
  if (auto* ds = std::get_if<DirectSumDesc>(&d)) {
    Eigen::VectorXd parts(ds->parts.size());
    int off = 0;
    for (size_t k = 0; k < ds->parts.size(); ++k) {
      auto v = dual_norm(ds->parts[k], Eigen::VectorXd(f.segment(off, ds->parts[k].dim())));
      if (!v) return std::nullopt;
      parts[int(k)] = *v;
      off += ds->parts[k].dim();
    }
    double q = ds->p.conjugate();
    if (std::isinf(q)) return parts.maxCoeff();
    return lp_norm_of(parts, Exponent::from_double(q));
  }
  if (auto* pb = std::get_if<PullbackDesc>(&d)) {
    const Eigen::MatrixXd& a = spec.node().mat;
    if (a.rows() == a.cols()) {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (lu.isInvertible()) return dual_norm(pb->host, Eigen::VectorXd(lu.transpose().solve(f)));
    }
  }
  if (spec.lp_representable()) {
    DLp lp;
    std::vector<Affine> x(spec.dim());
    for (int i = 0; i < spec.dim(); ++i) {
      int xi = lp.add_var(-f[i], true);
      x[i].t.emplace_back(xi, 1.0);
    }
    int s = lp.add_var(0, false);
    lp.add_row({{s, 1.0}}, RowSense::le, 1.0);
    build_epigraph(spec, x, s, lp);
    auto sol = lp.minimize();
    if (sol.status == LpStatus::unbounded) return kInf;
    if (!sol.optimal()) throw SolverError("dual norm program failed");
    return -sol.objective;
  }
  return std::nullopt;
}

}  // namespace bwb
