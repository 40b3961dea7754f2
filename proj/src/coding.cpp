#include "bwb/coding.hpp"

#include "bwb/dense.hpp"
#include "bwb/lp.hpp"

#include <cmath>
#include <limits>

namespace bwb {

namespace {

MatQ image_matrix(const PseudonormCode& code) {
  const int rows = code.host.dim(), n = code.truncation();
  MatQ x(rows, n);
  for (int j = 0; j < n; ++j) x.col(j) = code.images[j];
  return x;
}

int exact_rank_with_kernel(const MatQ& cols, const MatQ& ker) {
  MatQ joined(cols.rows(), cols.cols() + ker.cols());
  if (cols.cols()) joined.leftCols(cols.cols()) = cols;
  if (ker.cols()) joined.rightCols(ker.cols()) = ker;
  return matrix_rank<Rational>(joined) - int(ker.cols());
}

int double_rank_with_kernel(const Eigen::MatrixXd& cols, const Eigen::MatrixXd& ker, double tol) {
  Eigen::MatrixXd joined(cols.rows(), cols.cols() + ker.cols());
  if (cols.cols()) joined.leftCols(cols.cols()) = cols;
  if (ker.cols()) joined.rightCols(ker.cols()) = ker;
  return matrix_rank<double>(joined, tol) - int(ker.cols());
}

}  // namespace

PseudonormCode make_code(NormSpec host, std::vector<VecQ> images) {
  require(host.valid(), "code without host");
  require(!images.empty(), "code needs at least one image");
  for (const auto& x : images) require(x.size() == host.dim(), "image dimension differs from the host");
  return PseudonormCode{std::move(host), std::move(images)};
}

NormSpec PseudonormCode::as_spec() const { return pullback(image_matrix(*this), host); }

bool PseudonormCode::in_class_b() const {
  return exact_rank_with_kernel(image_matrix(*this), host.kernel()) == truncation();
}

double pseudonorm_eval(const PseudonormCode& code, const VecQ& v) {
  require(v.size() <= code.truncation(), "support of v exceeds the truncation");
  VecQ img = VecQ::Zero(code.host.dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) img += v[i] * code.images[i];
  return eval_norm(code.host, img);
}

std::optional<Rational> pseudonorm_eval_exact(const PseudonormCode& code, const VecQ& v) {
  require(v.size() <= code.truncation(), "support of v exceeds the truncation");
  VecQ img = VecQ::Zero(code.host.dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) img += v[i] * code.images[i];
  return eval_norm_exact(code.host, img);
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::inside: return "inside";
    case Membership::outside: return "outside";
    default: return "abstain";
  }
}

MemberResult subbasic_member(const PseudonormCode& code, const VecQ& v, const Interval& iv, double band) {
  if (iv.lo && iv.hi) require(*iv.lo < *iv.hi, "interval must have left < right");
  MemberResult r;
  if (auto ex = pseudonorm_eval_exact(code, v)) {
    r.exact = true;
    r.value = to_double(*ex);
    bool in = (!iv.lo || *iv.lo < *ex) && (!iv.hi || *ex < *iv.hi);
    r.verdict = in ? Membership::inside : Membership::outside;
    return r;
  }
  r.value = pseudonorm_eval(code, v);
  auto near = [&](const std::optional<Rational>& e) { return e && std::fabs(r.value - to_double(*e)) <= band; };
  if (near(iv.lo) || near(iv.hi)) return r;
  bool in = (!iv.lo || to_double(*iv.lo) < r.value) && (!iv.hi || r.value < to_double(*iv.hi));
  r.verdict = in ? Membership::inside : Membership::outside;
  return r;
}

Reduction reduce_to_B(const PseudonormCode& code, double rank_tol) {
  const int n = code.truncation();
  Reduction red;
  red.exact_rank = code.host.polytope() != nullptr || code.host.is_pseudonorm();
  MatQ ker = code.host.kernel();
  Eigen::MatrixXd kerd = to_double(ker);
  MatQ chosen(code.host.dim(), 0);
  int rank = 0;
  for (int j = 0; j < n; ++j) {
    MatQ trial(chosen.rows(), chosen.cols() + 1);
    if (chosen.cols()) trial.leftCols(chosen.cols()) = chosen;
    trial.col(chosen.cols()) = code.images[j];
    int r = red.exact_rank ? exact_rank_with_kernel(trial, ker)
                           : double_rank_with_kernel(to_double(trial), kerd, rank_tol);
    if (r > rank) {
      rank = r;
      chosen = trial;
      red.selection.push_back(j);
    }
  }
  require(!red.selection.empty(), "all images are zero in the host");
  std::vector<VecQ> imgs;
  for (int j : red.selection) imgs.push_back(code.images[j]);
  red.code = make_code(code.host, imgs);
  red.truncation_incomplete = int(red.selection.size()) < n;
  return red;
}

PseudonormCode rho_of_K(const MatQ& evaluations) {
  require(evaluations.rows() >= 1, "K must be nonempty");
  require(evaluations.cols() >= 1, "empty dictionary");
  const int n = int(evaluations.cols());
  std::vector<VecQ> imgs;
  for (int i = 0; i < n; ++i) imgs.push_back(unit_vector_q(n, i));
  return make_code(finite_ck(evaluations), imgs);
}

PseudonormCode sigma_of_lambda(const std::vector<Rational>& weights, const MatQ& table, const Exponent& p) {
  require(!weights.empty(), "lambda needs at least one atom");
  require(int(weights.size()) == table.rows(), "table rows must match the atoms");
  Rational total = 0;
  for (const auto& w : weights) {
    require(w >= 0, "negative weight");
    total += w;
  }
  require(total == 1, "weights must sum to 1");
  std::vector<VecQ> imgs;
  for (int j = 0; j < table.cols(); ++j) imgs.push_back(table.col(j));
  return make_code(discrete_lp(p, weights), imgs);
}

namespace {

// inf { sum_{j != i} |alpha_j| cost_j : sum alpha_j a_j = a_i }, +inf if a_i is outside the span
double representation_cost(const std::vector<Eigen::VectorXd>& a, const std::vector<double>& cost, int i) {
  LinearProgram<double> lp;
  const int d = int(a[i].size());
  std::vector<std::pair<int, int>> vars(a.size(), {-1, -1});
  for (size_t j = 0; j < a.size(); ++j) {
    if (int(j) == i) continue;
    vars[j] = {lp.add_var(cost[j], false), lp.add_var(cost[j], false)};
  }
  for (int r = 0; r < d; ++r) {
    LinearProgram<double>::Terms t;
    for (size_t j = 0; j < a.size(); ++j) {
      if (int(j) == i || a[j][r] == 0) continue;
      t.emplace_back(vars[j].first, a[j][r]);
      t.emplace_back(vars[j].second, -a[j][r]);
    }
    lp.add_row(t, RowSense::eq, a[i][r]);
  }
  auto sol = lp.minimize();
  if (sol.status == LpStatus::infeasible) return std::numeric_limits<double>::infinity();
  if (!sol.optimal()) throw SolverError("representation program failed");
  return sol.objective;
}

}  // namespace

Rationalized rationalize_norm(const PseudonormCode& code, const std::vector<VecQ>& probes, const Rational& eps) {
  require(eps > 0, "eps must be positive");
  require(!probes.empty(), "empty probe set");
  const int n = code.truncation();
  for (const auto& a : probes) {
    require(a.size() == n, "probe dimension differs from the truncation");
    require(!a.isZero(), "0 is not allowed in the probe set");
  }
  Rationalized out;
  // collapse scalar multiples
  for (const auto& a : probes) {
    bool dup = false;
    for (const auto& b : out.probes) {
      MatQ pair(n, 2);
      pair << a, b;
      if (matrix_rank<Rational>(pair) == 1) dup = true;
    }
    if (!dup) out.probes.push_back(a);
  }
  NormSpec mu = code.as_spec();

  // already rational on the probes and a genuine norm: nothing to do
  if (code.in_class_b()) {
    std::vector<Rational> vals;
    bool all = true;
    for (const auto& a : out.probes) {
      auto ex = eval_norm_exact(mu, a);
      if (!ex) { all = false; break; }
      vals.push_back(*ex);
    }
    if (all) {
      out.code = code;
      out.values = vals;
      out.unchanged = true;
      return out;
    }
  }

  // order: a basis of span A first
  std::vector<VecQ> ordered;
  {
    MatQ acc(n, 0);
    std::vector<bool> used(out.probes.size(), false);
    for (size_t i = 0; i < out.probes.size(); ++i) {
      MatQ t(n, acc.cols() + 1);
      if (acc.cols()) t.leftCols(acc.cols()) = acc;
      t.col(acc.cols()) = out.probes[i];
      if (matrix_rank<Rational>(t) == t.cols()) {
        acc = t;
        used[i] = true;
        ordered.push_back(out.probes[i]);
      }
    }
    for (size_t i = 0; i < out.probes.size(); ++i)
      if (!used[i]) ordered.push_back(out.probes[i]);
    out.probes = ordered;
  }
  const int cnt = int(ordered.size());
  int k = 0;
  {
    MatQ acc(n, 0);
    for (const auto& a : ordered) {
      MatQ t(n, acc.cols() + 1);
      if (acc.cols()) t.leftCols(acc.cols()) = acc;
      t.col(acc.cols()) = a;
      if (matrix_rank<Rational>(t) > int(acc.cols())) { acc = t; ++k; } else break;
    }
  }
  // Euclidean norm with a_1..a_k orthonormal
  MatQ basis(n, k);
  for (int i = 0; i < k; ++i) basis.col(i) = ordered[i];
  Eigen::MatrixXd bd = to_double(basis);
  Eigen::MatrixXd pinv = bd.completeOrthogonalDecomposition().pseudoInverse();
  std::vector<Eigen::VectorXd> ad;
  std::vector<double> mu_a, l2_a;
  for (const auto& a : ordered) {
    ad.push_back(to_double(a));
    mu_a.push_back(eval_norm(mu, ad.back()));
    l2_a.push_back((pinv * ad.back()).norm());
  }
  const double e = to_double(eps);
  double l2max = *std::max_element(l2_a.begin(), l2_a.end());
  long m = 1;
  while (l2max / m >= e / 4) m *= 2;

  for (int attempt = 0; attempt < 40; ++attempt, m *= 2) {
    std::vector<double> mm(cnt);
    for (int i = 0; i < cnt; ++i) mm[i] = mu_a[i] + l2_a[i] / m;
    bool claim = true;
    std::vector<double> kk(cnt);
    for (int i = 0; i < cnt && claim; ++i) {
      kk[i] = representation_cost(ad, mm, i);
      claim = mm[i] < kk[i] * (1 - 1e-12);
    }
    if (!claim) continue;
    std::vector<Rational> vals;
    for (int i = 0; i < cnt; ++i) {
      Rational lo = exact_rational(mm[i] * (1 + 1e-15));
      double hi_d = std::min(kk[i] * (1 - 1e-13), mm[i] + e / 2);
      Rational hi = exact_rational(hi_d);
      if (!(lo < hi)) { claim = false; break; }
      vals.push_back(dyadic_in(lo, hi));
    }
    if (!claim) continue;
    // generators a_i / nu'(a_i) plus unit vectors completing a basis of R^N
    std::vector<VecQ> gens;
    for (int i = 0; i < cnt; ++i) gens.push_back(ordered[i] / vals[i]);
    MatQ acc = basis;
    for (int j = 0; j < n && acc.cols() < n; ++j) {
      MatQ t(n, acc.cols() + 1);
      t.leftCols(acc.cols()) = acc;
      t.col(acc.cols()) = unit_vector_q(n, j);
      if (matrix_rank<Rational>(t) == t.cols()) {
        acc = t;
        gens.push_back(unit_vector_q(n, j));
      }
    }
    NormSpec host = polytope_by_generators(gens);
    std::vector<VecQ> imgs;
    for (int j = 0; j < n; ++j) imgs.push_back(unit_vector_q(n, j));
    PseudonormCode nu = make_code(host, imgs);
    bool consistent = true;
    for (int i = 0; i < cnt && consistent; ++i) {
      auto ex = eval_norm_exact(host, ordered[i]);
      consistent = ex && *ex == vals[i];
    }
    if (!consistent) continue;
    out.code = nu;
    out.values = vals;
    out.m = m;
    for (const auto& a : probes) {
      double nv = to_double(*eval_norm_exact(host, a));
      out.max_change = std::max(out.max_change, std::fabs(nv - eval_norm(mu, to_double(a))));
    }
    return out;
  }
  throw SolverError("rationalization did not find consistent rational values");
}

}  // namespace bwb
