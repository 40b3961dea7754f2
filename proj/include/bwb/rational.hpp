#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace bwb {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <class S> using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S> using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

using VecQ = Vec<Rational>;
using MatQ = Mat<Rational>;

// Accepts "a", "-a/b" and plain decimals such as "0.125" (read exactly).
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

double to_double(const Rational& q);
Eigen::VectorXd to_double(const VecQ& v);
Eigen::MatrixXd to_double(const MatQ& m);

// Exact binary value of a finite double.
Rational exact_rational(double x);
VecQ exact_rational(const Eigen::VectorXd& v);
MatQ exact_rational(const Eigen::MatrixXd& m);

// Best rational approximation with denominator <= max_den (continued fractions).
Rational nearest_rational(double x, long max_den);

// Smallest k/2^j (j <= max_bits) lying in [lo, hi); falls back to lo itself.
Rational dyadic_in(const Rational& lo, const Rational& hi, int max_bits = 60);

Rational abs(const Rational& q);

}  // namespace bwb
