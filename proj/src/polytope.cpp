#include "bwb/polytope.hpp"

#include <algorithm>
#include <functional>

namespace bwb {

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > (1L << 50)) return 1L << 50;
  }
  return r;
}

namespace {

template <class F> void for_each_subset(int n, int k, F&& f) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

bool same_up_to_sign(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
  double s = std::max(1.0, std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
  return (a - b).cwiseAbs().maxCoeff() <= tol * s || (a + b).cwiseAbs().maxCoeff() <= tol * s;
}

bool same_up_to_sign(const VecQ& a, const VecQ& b) {
  bool eq = true, neg = true;
  for (Eigen::Index i = 0; i < a.size() && (eq || neg); ++i) {
    if (a[i] != b[i]) eq = false;
    if (a[i] != -b[i]) neg = false;
  }
  return eq || neg;
}

struct Candidate {
  std::vector<int> subset;
  std::vector<int> signs;
  Eigen::VectorXd x;
};

std::vector<Candidate> enumerate_double(const std::vector<Eigen::VectorXd>& fs, int dim,
                                        double tol) {
  const int m = int(fs.size());
  Eigen::MatrixXd all(m, dim);
  for (int i = 0; i < m; ++i) all.row(i) = fs[i].transpose();
  std::vector<Candidate> out;
  for_each_subset(m, dim, [&](const std::vector<int>& sub) {
    Eigen::MatrixXd a(dim, dim);
    for (int r = 0; r < dim; ++r) a.row(r) = all.row(sub[r]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-11);
    if (lu.rank() < dim) return;
    Eigen::MatrixXd inv = lu.inverse();
    const int patterns = 1 << (dim - 1);
    for (int pat = 0; pat < patterns; ++pat) {
      Eigen::VectorXd s(dim);
      s[0] = 1;
      for (int r = 1; r < dim; ++r) s[r] = (pat >> (r - 1)) & 1 ? -1.0 : 1.0;
      Eigen::VectorXd x = inv * s;
      if ((all * x).cwiseAbs().maxCoeff() > 1 + tol) continue;
      bool dup = false;
      for (const auto& c : out)
        if (same_up_to_sign(c.x, x, 1e-9)) { dup = true; break; }
      if (dup) continue;
      Candidate c;
      c.subset = sub;
      c.signs.resize(dim);
      for (int r = 0; r < dim; ++r) c.signs[r] = int(s[r]);
      c.x = x;
      out.push_back(std::move(c));
    }
  });
  return out;
}

}  // namespace

std::vector<Eigen::VectorXd> dedupe_up_to_sign(const std::vector<Eigen::VectorXd>& vs,
                                               double tol) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& v : vs) {
    if (v.size() == 0 || v.cwiseAbs().maxCoeff() <= tol) continue;
    bool dup = false;
    for (const auto& u : out)
      if (same_up_to_sign(u, v, tol)) { dup = true; break; }
    if (!dup) out.push_back(v);
  }
  return out;
}

std::vector<VecQ> dedupe_up_to_sign(const std::vector<VecQ>& vs) {
  std::vector<VecQ> out;
  for (const auto& v : vs) {
    bool zero = true;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (v[i] != 0) { zero = false; break; }
    if (zero) continue;
    bool dup = false;
    for (const auto& u : out)
      if (same_up_to_sign(u, v)) { dup = true; break; }
    if (!dup) out.push_back(v);
  }
  return out;
}

std::optional<std::vector<Eigen::VectorXd>> symmetric_vertices(
    const std::vector<Eigen::VectorXd>& functionals, int dim, long cap, double tol) {
  auto fs = dedupe_up_to_sign(functionals, 1e-14);
  if (dim == 0) return std::vector<Eigen::VectorXd>{};
  const int m = int(fs.size());
  if (m < dim) return std::nullopt;
  if (binomial(m, dim) * (1L << (dim - 1)) > cap) return std::nullopt;
  Eigen::MatrixXd all(m, dim);
  for (int i = 0; i < m; ++i) all.row(i) = fs[i].transpose();
  if (Eigen::FullPivLU<Eigen::MatrixXd>(all).rank() < dim) return std::nullopt;
  auto cands = enumerate_double(fs, dim, tol);
  std::vector<Eigen::VectorXd> out;
  for (auto& c : cands) out.push_back(std::move(c.x));
  return out;
}

std::optional<std::vector<VecQ>> symmetric_vertices_exact(const std::vector<VecQ>& functionals,
                                                          int dim, long cap) {
  auto fq = dedupe_up_to_sign(functionals);
  if (dim == 0) return std::vector<VecQ>{};
  const int m = int(fq.size());
  if (m < dim) return std::nullopt;
  if (binomial(m, dim) * (1L << (dim - 1)) > cap) return std::nullopt;
  MatQ allq(m, dim);
  for (int i = 0; i < m; ++i) allq.row(i) = fq[i].transpose();
  if (matrix_rank<Rational>(allq) < dim) return std::nullopt;
  std::vector<Eigen::VectorXd> fd;
  for (const auto& f : fq) fd.push_back(to_double(f));
  auto cands = enumerate_double(fd, dim, 1e-7);
  std::vector<VecQ> out;
  for (const auto& c : cands) {
    MatQ a(dim, dim);
    VecQ s(dim);
    for (int r = 0; r < dim; ++r) {
      a.row(r) = allq.row(c.subset[r]);
      s[r] = c.signs[r];
    }
    auto x = solve_square<Rational>(a, s);
    if (!x) continue;
    VecQ vals = allq * (*x);
    bool feasible = true;
    for (Eigen::Index i = 0; i < vals.size(); ++i)
      if (abs(vals[i]) > 1) { feasible = false; break; }
    if (!feasible) continue;
    bool dup = false;
    for (const auto& u : out)
      if (same_up_to_sign(u, *x)) { dup = true; break; }
    if (!dup) out.push_back(*x);
  }
  return out;
}

std::optional<std::vector<Eigen::VectorXd>> weighted_l1_section_vertices(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& w, long cap) {
  const int m = int(a.rows()), k = int(a.cols());
  if (Eigen::FullPivLU<Eigen::MatrixXd>(a).rank() < k) return std::nullopt;
  auto value = [&](const Eigen::VectorXd& x) { return w.dot((a * x).cwiseAbs()); };
  std::vector<Eigen::VectorXd> raw;
  if (k == 1) {
    Eigen::VectorXd x(1);
    x[0] = 1.0 / value(Eigen::VectorXd::Ones(1));
    raw.push_back(x);
    return raw;
  }
  if (binomial(m, k - 1) > cap) return std::nullopt;
  for_each_subset(m, k - 1, [&](const std::vector<int>& sub) {
    Eigen::MatrixXd b(k - 1, k);
    for (int r = 0; r < k - 1; ++r) b.row(r) = a.row(sub[r]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
    lu.setThreshold(1e-11);
    if (lu.rank() < k - 1) return;
    Eigen::MatrixXd ker = lu.kernel();
    if (ker.cols() != 1) return;
    Eigen::VectorXd d = ker.col(0);
    double v = value(d);
    if (v <= 0) return;
    raw.push_back(d / v);
  });
  return dedupe_up_to_sign(raw, 1e-9);
}

std::optional<std::vector<VecQ>> weighted_l1_section_vertices_exact(const MatQ& a, const VecQ& w,
                                                                    long cap) {
  const int m = int(a.rows()), k = int(a.cols());
  if (matrix_rank<Rational>(a) < k) return std::nullopt;
  auto value = [&](const VecQ& x) {
    VecQ y = a * x;
    Rational s = 0;
    for (int i = 0; i < m; ++i) s += w[i] * abs(y[i]);
    return s;
  };
  std::vector<VecQ> raw;
  if (k == 1) {
    VecQ x(1);
    x[0] = Rational(1) / value(VecQ::Ones(1));
    raw.push_back(x);
    return raw;
  }
  if (binomial(m, k - 1) > cap) return std::nullopt;
  for_each_subset(m, k - 1, [&](const std::vector<int>& sub) {
    MatQ b(k - 1, k);
    for (int r = 0; r < k - 1; ++r) b.row(r) = a.row(sub[r]);
    MatQ ker = nullspace<Rational>(b);
    if (ker.cols() != 1) return;
    VecQ d = ker.col(0);
    Rational v = value(d);
    if (v <= 0) return;
    VecQ x = d / v;
    raw.push_back(x);
  });
  return dedupe_up_to_sign(raw);
}

}  // namespace bwb
