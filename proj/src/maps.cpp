#include "bwb/maps.hpp"

#include "bwb/dense.hpp"
#include "bwb/eps_net.hpp"
#include "bwb/optim.hpp"
#include "bwb/rng.hpp"

#include <cmath>
#include <limits>

namespace bwb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool cheap_dual(const NormSpec& s) {
  if (s.is_pseudonorm()) return false;
  const auto& d = s.descriptor().value;
  if (std::holds_alternative<LpDesc>(d) || std::holds_alternative<DiscreteLpDesc>(d)) return true;
  if (s.gram()) return true;
  const PolytopeRep* rep = s.polytope();
  if (rep && rep->has_vertices) return true;
  if (auto* ds = std::get_if<DirectSumDesc>(&d)) {
    for (const auto& p : ds->parts)
      if (!cheap_dual(p)) return false;
    return true;
  }
  if (auto* pb = std::get_if<PullbackDesc>(&d))
    return pb->matrix.rows() == pb->matrix.cols() && cheap_dual(pb->host);
  return false;
}

// exponent shared by l_p and discrete l_p descriptors
std::optional<Exponent> lp_type(const NormSpec& s) {
  const auto& d = s.descriptor().value;
  if (auto* lp = std::get_if<LpDesc>(&d)) return lp->p;
  if (auto* dl = std::get_if<DiscreteLpDesc>(&d)) return dl->p;
  return std::nullopt;
}

// columns with pairwise disjoint supports
bool disjoint_columns(const Eigen::MatrixXd& t) {
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    if ((t.row(i).array() != 0).count() > 1) return false;
  return true;
}

Eigen::MatrixXd complement_basis(const Eigen::MatrixXd& ker, int n) {
  if (ker.cols() == 0) return Eigen::MatrixXd::Identity(n, n);
  return nullspace<double>(Eigen::MatrixXd(ker.transpose()));
}

// Local ascent of ||T x|| / ||x|| from x0.
double polish_ratio(const Eigen::MatrixXd& t, const NormData& src, const NormData& tgt,
                    Eigen::VectorXd& x) {
  auto neg_ratio = [&](const Eigen::VectorXd& y) {
    double s = src.eval(y);
    if (!(s > 1e-300)) return 0.0;
    return -tgt.eval(Eigen::VectorXd(t * y)) / s;
  };
  auto r = nelder_mead(neg_ratio, x, 0.05 * std::max(1e-3, x.norm()), 400 * int(x.size() + 1));
  if (-r.value > -neg_ratio(x)) x = r.x;
  double s = src.eval(x);
  if (s > 0) x /= s;
  return -neg_ratio(x);
}

}  // namespace

NormData norm_data(const NormSpec& spec) {
  NormData d;
  d.dim = spec.dim();
  d.eval = [spec](const Eigen::VectorXd& v) { return eval_norm(spec, v); };
  if (const PolytopeRep* rep = spec.polytope()) {
    if (rep->has_vertices) d.vertices = rep->vertices;
    if (rep->has_facets) d.facets = rep->facets;
  }
  if (const Eigen::MatrixXd* g = spec.gram()) d.gram = *g;
  if (cheap_dual(spec)) d.dual = [spec](const Eigen::VectorXd& f) { return *dual_norm(spec, f); };
  return d;
}

NormData pullback_data(const NormData& host, const Eigen::MatrixXd& t) {
  NormData d;
  d.dim = int(t.cols());
  auto h = host.eval;
  d.eval = [h, t](const Eigen::VectorXd& v) { return h(Eigen::VectorXd(t * v)); };
  if (host.facets) d.facets = Eigen::MatrixXd(*host.facets * t);
  if (host.gram) {
    Eigen::MatrixXd g = t.transpose() * *host.gram * t;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    if (es.eigenvalues().size() > 0 && es.eigenvalues().minCoeff() > 1e-12 * es.eigenvalues().maxCoeff())
      d.gram = g;
  }
  if (t.rows() == t.cols()) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(t);
    if (lu.isInvertible()) {
      Eigen::MatrixXd inv = lu.inverse();
      if (host.vertices) d.vertices = Eigen::MatrixXd(inv * *host.vertices);
      if (host.dual) {
        auto hd = host.dual;
        Eigen::MatrixXd invt = inv.transpose();
        d.dual = [hd, invt](const Eigen::VectorXd& f) { return hd(Eigen::VectorXd(invt * f)); };
      }
    }
  }
  return d;
}

std::optional<double> op_norm_exact(const Eigen::MatrixXd& t, const NormData& src,
                                    const NormData& tgt) {
  if (src.vertices) {
    double m = 0;
    const Eigen::MatrixXd& v = *src.vertices;
    for (Eigen::Index j = 0; j < v.cols(); ++j) m = std::max(m, tgt.eval(Eigen::VectorXd(t * v.col(j))));
    return m;
  }
  if (tgt.facets && src.dual) {
    Eigen::MatrixXd g = *tgt.facets * t;
    double m = 0;
    for (Eigen::Index i = 0; i < g.rows(); ++i) m = std::max(m, src.dual(Eigen::VectorXd(g.row(i).transpose())));
    return m;
  }
  if (src.gram && tgt.gram) {
    Eigen::MatrixXd a = t.transpose() * *tgt.gram * t;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, *src.gram);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  return std::nullopt;
}

double riesz_thorin_bound(const Eigen::MatrixXd& t, double p) {
  double n1 = t.cwiseAbs().colwise().sum().maxCoeff();
  double ninf = t.cwiseAbs().rowwise().sum().maxCoeff();
  if (std::isinf(p)) return ninf;
  double best = std::pow(n1, 1.0 / p) * std::pow(ninf, 1.0 - 1.0 / p);
  // through the spectral norm at p = 2
  double s2 = t.rows() && t.cols() ? Eigen::JacobiSVD<Eigen::MatrixXd>(t).singularValues()[0] : 0.0;
  if (p >= 2) best = std::min(best, std::pow(s2, 2.0 / p) * std::pow(ninf, 1.0 - 2.0 / p));
  else best = std::min(best, std::pow(n1, 2.0 / p - 1.0) * std::pow(s2, 2.0 - 2.0 / p));
  return best;
}

NormBounds op_norm(const Eigen::MatrixXd& t, const NormSpec& src, const NormSpec& tgt,
                   const OpNormOptions& opt) {
  require(t.rows() == tgt.dim() && t.cols() == src.dim(),
          "map is " + std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + ", spaces have dims " +
              std::to_string(src.dim()) + " -> " + std::to_string(tgt.dim()));
  NormBounds out;
  if (src.is_pseudonorm()) {
    // ||x + k|| = ||x|| for k in the kernel, so the kernel must be killed
    const Eigen::MatrixXd& ker = src.kernel_double();
    for (Eigen::Index j = 0; j < ker.cols(); ++j) {
      Eigen::VectorXd img = t * ker.col(j);
      if (eval_norm(tgt, img) > 1e-12 * std::max(1.0, t.norm())) {
        out.lower = out.upper = kInf;
        out.witness = ker.col(j);
        out.method = "kernel";
        return out;
      }
    }
    Eigen::MatrixXd c = complement_basis(ker, src.dim());
    if (c.cols() == 0) {
      out.method = "kernel";
      return out;
    }
    NormBounds r = op_norm(Eigen::MatrixXd(t * c), pullback(c, src), tgt, opt);
    if (r.witness.size()) r.witness = c * r.witness;
    return r;
  }
  if (t.isZero(0)) {
    out.method = "zero";
    out.witness = unit_vector(src.dim(), 0) / eval_norm(src, unit_vector(src.dim(), 0));
    return out;
  }
  if (src.dim() == 1) {
    Eigen::VectorXd e = unit_vector(1, 0) / eval_norm(src, unit_vector(1, 0));
    out.lower = out.upper = eval_norm(tgt, Eigen::VectorXd(t * e));
    out.witness = e;
    out.method = "line";
    return out;
  }
  auto ps = lp_type(src), pt = lp_type(tgt);
  if (ps && pt && *ps == *pt && disjoint_columns(t)) {
    double best = 0;
    int arg = 0;
    for (int j = 0; j < src.dim(); ++j) {
      if (t.col(j).isZero(0)) continue;
      Eigen::VectorXd e = unit_vector(src.dim(), j);
      double r = eval_norm(tgt, Eigen::VectorXd(t * e)) / eval_norm(src, e);
      if (r > best) { best = r; arg = j; }
    }
    out.lower = out.upper = best;
    out.witness = unit_vector(src.dim(), arg) / eval_norm(src, unit_vector(src.dim(), arg));
    out.method = "disjoint";
    return out;
  }
  NormData sd = norm_data(src), td = norm_data(tgt);
  if (sd.vertices) {
    const Eigen::MatrixXd& v = *sd.vertices;
    double best = -1;
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      double r = td.eval(Eigen::VectorXd(t * v.col(j)));
      if (r > best) { best = r; out.witness = v.col(j); }
    }
    out.lower = out.upper = best;
    out.method = "vertices";
    return out;
  }
  if (auto val = op_norm_exact(t, sd, td)) {
    out.lower = out.upper = *val;
    out.method = sd.gram && td.gram && !(td.facets && sd.dual) ? "gram" : "facets";
    if (sd.gram && td.gram && out.method == "gram") {
      Eigen::MatrixXd a = t.transpose() * *td.gram * t;
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, *sd.gram);
      Eigen::Index k;
      es.eigenvalues().maxCoeff(&k);
      out.witness = es.eigenvectors().col(k);
      out.witness /= sd.eval(out.witness);
    }
    return out;
  }
  // net certification
  Rng rng(derive_seed(opt.seed, "op_norm"));
  double rt = kInf;
  if (ps && pt && *ps == *pt && !ps->is_sup() && std::holds_alternative<LpDesc>(src.descriptor().value) &&
      std::holds_alternative<LpDesc>(tgt.descriptor().value))
    rt = riesz_thorin_bound(t, ps->as_double());
  double best = 0;
  Eigen::VectorXd arg = unit_vector(src.dim(), 0);
  if (src.dim() <= opt.net_dim_cap) {
    EpsNet net = eps_net(src, Eigen::MatrixXd::Identity(src.dim(), src.dim()), opt.net_eps, opt.net_dim_cap);
    for (const auto& p : net.points) {
      double r = td.eval(Eigen::VectorXd(t * p)) / sd.eval(p);
      if (r > best) { best = r; arg = p; }
    }
    double delta = net.coverage + net.witness_mesh;
    out.upper = std::min(rt, best * (1 + phi1(2 * delta)));
    out.method = "net";
  } else {
    require(std::isfinite(rt), "operator norm not certifiable: source has no vertices and exceeds the net cap");
    out.upper = rt;
    out.method = "riesz-thorin";
  }
  Eigen::VectorXd x = arg;
  best = std::max(best, polish_ratio(t, sd, td, x));
  for (int r = 0; r < opt.restarts; ++r) {
    Eigen::VectorXd y = normal_vector(rng, src.dim());
    double v = polish_ratio(t, sd, td, y);
    if (v > best) { best = v; x = y; }
  }
  out.lower = std::min(best, out.upper);
  out.witness = x / sd.eval(x);
  return out;
}

NormBounds inverse_norm(const Eigen::MatrixXd& t, const NormSpec& src, const NormSpec& tgt,
                        const OpNormOptions& opt) {
  require(t.cols() == src.dim() && t.rows() == tgt.dim(), "map dimensions do not match the spaces");
  require(matrix_rank<double>(t, 1e-10) == src.dim(), "map is not injective");
  auto ps = lp_type(src), pt = lp_type(tgt);
  if (ps && pt && *ps == *pt && disjoint_columns(t) && !src.is_pseudonorm()) {
    NormBounds out;
    for (int j = 0; j < src.dim(); ++j) {
      Eigen::VectorXd e = unit_vector(src.dim(), j);
      double r = eval_norm(src, e) / eval_norm(tgt, Eigen::VectorXd(t * e));
      if (r > out.upper) {
        out.upper = out.lower = r;
        out.witness = e / eval_norm(src, e);
      }
    }
    out.method = "disjoint";
    return out;
  }
  NormSpec range = pullback(t, tgt);
  return op_norm(Eigen::MatrixXd::Identity(src.dim(), src.dim()), range, src, opt);
}

const NormBounds& LinearMap::bounds(const OpNormOptions& opt) {
  if (!norm) norm = op_norm(matrix, source, target, opt);
  return *norm;
}

const NormBounds& LinearMap::inverse_bounds(const OpNormOptions& opt) {
  if (!inverse) inverse = inverse_norm(matrix, source, target, opt);
  return *inverse;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "true";
    case Verdict::no: return "false";
    default: return "unknown";
  }
}

ApproxCertificate approximates(const Eigen::MatrixXd& tuple, const NormSpec& source, double K,
                               const NormSpec& target, const OpNormOptions& opt) {
  require(K > 1, "K must exceed 1");
  require(tuple.rows() == source.dim(), "tuple vectors do not live in the source space");
  require(tuple.cols() == target.dim(), "tuple length must equal the target dimension");
  require(matrix_rank<double>(tuple, 1e-10) == tuple.cols(), "tuple is linearly dependent");
  ApproxCertificate c;
  c.K = K;
  // S e_i = x_i, T = S^-1 on the span
  c.backward = op_norm(tuple, target, source, opt);
  c.forward = inverse_norm(tuple, target, source, opt);
  if (c.forward.upper < K && c.backward.upper < K) c.verdict = Verdict::yes;
  else if (c.forward.lower >= K || c.backward.lower >= K) c.verdict = Verdict::no;
  return c;
}

NormBounds basis_constant(const Eigen::MatrixXd& tuple, const NormSpec& spec, const OpNormOptions& opt) {
  require(tuple.rows() == spec.dim(), "tuple dimension mismatch");
  const int k = int(tuple.cols());
  require(k >= 1, "empty tuple");
  require(matrix_rank<double>(tuple, 1e-10) == k, "tuple is linearly dependent");
  NormSpec coeff = pullback(tuple, spec);
  require(!coeff.is_pseudonorm(), "tuple meets the kernel of the pseudonorm");
  NormBounds out;
  out.lower = out.upper = 1;
  out.method = "identity";
  for (int j = 1; j < k; ++j) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < j; ++i) p(i, i) = 1;
    NormBounds b = op_norm(p, coeff, coeff, opt);
    if (b.upper > out.upper) out.method = b.method;
    if (b.lower > out.lower) out.witness = b.witness;
    out.lower = std::max(out.lower, b.lower);
    out.upper = std::max(out.upper, b.upper);
  }
  return out;
}

double phi1(double eps) {
  require(eps >= 0 && eps < 1.0 / 3.0, "phi1 is defined on [0, 1/3)");
  return 3 * eps / (1 - 3 * eps);
}

Phi2 phi2(const Eigen::MatrixXd& tuple, const NormSpec& spec, double eps, const OpNormOptions& opt) {
  require(eps >= 0, "eps must be nonnegative");
  const int k = int(tuple.cols());
  require(tuple.rows() == spec.dim() && k >= 1, "tuple dimension mismatch");
  require(matrix_rank<double>(tuple, 1e-10) == k, "tuple is linearly dependent");
  NormSpec coeff = pullback(tuple, spec);
  require(!coeff.is_pseudonorm(), "tuple meets the kernel of the pseudonorm");
  NormBounds b = op_norm(Eigen::MatrixXd::Identity(k, k), coeff, lp_space(1.0, k), opt);
  Phi2 out;
  out.C = 1.0 / b.upper;
  require(eps < out.C, "eps must be below C = " + std::to_string(out.C));
  out.value = eps / (out.C - eps);
  return out;
}

}  // namespace bwb
