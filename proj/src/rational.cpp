#include "bwb/rational.hpp"

#include "bwb/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace bwb {

namespace {

bool is_integer_text(std::string_view s) {
  if (s.empty()) return false;
  size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

Rational integer_of(std::string_view s) {
  if (!is_integer_text(s)) throw PreconditionError("not an integer: " + std::string(s));
  std::string t(s[0] == '+' ? s.substr(1) : s);
  return Rational(boost::multiprecision::mpz_int(t));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw PreconditionError("empty rational");
  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    Rational num = integer_of(text.substr(0, slash));
    Rational den = integer_of(text.substr(slash + 1));
    if (den == 0) throw PreconditionError("zero denominator in " + std::string(text));
    return num / den;
  }
  auto dot = text.find('.');
  if (dot != std::string_view::npos) {
    std::string_view ip = text.substr(0, dot), fp = text.substr(dot + 1);
    bool neg = !ip.empty() && ip[0] == '-';
    if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) ip.remove_prefix(1);
    if (ip.empty()) ip = "0";
    if (fp.empty() || !is_integer_text(fp) || fp[0] == '-' || fp[0] == '+')
      throw PreconditionError("bad decimal: " + std::string(text));
    Rational scale = 1;
    for (size_t i = 0; i < fp.size(); ++i) scale *= 10;
    Rational q = integer_of(ip) + integer_of(fp) / scale;
    return neg ? -q : q;
  }
  return integer_of(text);
}

std::string to_string(const Rational& q) {
  auto n = boost::multiprecision::numerator(q);
  auto d = boost::multiprecision::denominator(q);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

Eigen::VectorXd to_double(const VecQ& v) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

Eigen::MatrixXd to_double(const MatQ& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
  return out;
}

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw PreconditionError("non-finite value has no rational form");
  return Rational(x);
}

VecQ exact_rational(const Eigen::VectorXd& v) {
  VecQ out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = exact_rational(v[i]);
  return out;
}

MatQ exact_rational(const Eigen::MatrixXd& m) {
  MatQ out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = exact_rational(m(i, j));
  return out;
}

Rational nearest_rational(double x, long max_den) {
  if (!std::isfinite(x)) throw PreconditionError("non-finite value has no rational form");
  bool neg = x < 0;
  double y = std::fabs(x);
  // convergents h/k
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = y;
  for (int it = 0; it < 64; ++it) {
    double a = std::floor(r);
    if (a > 9e15) break;
    long long ai = static_cast<long long>(a);
    long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) {
      // best semiconvergent within the bound
      long long t = (max_den - k0) / k1;
      long long hs = t * h1 + h0, ks = t * k1 + k0;
      double e1 = std::fabs(y - double(h1) / double(k1));
      double es = ks > 0 ? std::fabs(y - double(hs) / double(ks)) : 1e300;
      if (es < e1) { h1 = hs; k1 = ks; }
      break;
    }
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  Rational q = Rational(h1) / Rational(k1);
  return neg ? Rational(-q) : q;
}

Rational dyadic_in(const Rational& lo, const Rational& hi, int max_bits) {
  if (!(lo < hi)) return lo;
  Rational scale = 1;
  for (int j = 0; j <= max_bits; ++j) {
    Rational t = lo * scale;
    // ceil(t)
    auto n = boost::multiprecision::numerator(t);
    auto d = boost::multiprecision::denominator(t);
    decltype(n) c = n / d;
    if (c * d < n) c += 1;
    Rational cand = Rational(c) / scale;
    if (cand >= lo && cand < hi) return cand;
    scale *= 2;
  }
  return lo;
}

Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace bwb
