// Jacobi forms on (q, y): theta functions, the weak generators, the Weierstrass
// function and its derivatives, cusp and Eisenstein forms of index one.
#pragma once

#include <array>
#include <map>

#include "banana/classical.hpp"

namespace ban {

enum class JacobiKind { weak, holomorphic, cusp, meromorphic };

struct JacobiSeries {
  MultiSeries series;
  int weight = 0;
  Rational index = 0;
  JacobiKind kind = JacobiKind::weak;
  int unit_power = 0;  // the series is multiplied by (-i)^unit_power
};

// Integral frame: q <= N and q + y <= N + L, so every box q <= N, |l| <= L is known.
FramePtr jacobi_frame(int N, int L);
// Frame for theta functions: q in steps of 1/8, y in steps of 1/2; truncated in q only.
FramePtr theta_frame(int N);

// Series with integral exponents in any frame -> the given integral frame.
MultiSeries to_integral(const MultiSeries& a, FramePtr target);

JacobiSeries theta1(int N, int L);      // product form
JacobiSeries theta1_sum(int N, int L);  // sum form
// theta_i(tau, z) for i = 1..4 from the sum definition; with z = 0 if at_zero.
MultiSeries theta_sum(int i, int N, bool at_zero);

JacobiSeries theta_sq(int N, int L);
JacobiSeries phi_0_1(int N, int L);
JacobiSeries weierstrass_p(int N, int L);
JacobiSeries wp_derivative(int r, int N, int L);

// Polynomial in (X, Y, Z) with weights (2, 4, 6).
using TriPoly = std::map<std::array<int, 3>, Rational>;
TriPoly wp_poly(int g);
std::string format_tripoly(const TriPoly& p);
MultiSeries eval_tripoly(const TriPoly& p, const MultiSeries& X, const MultiSeries& Y, const MultiSeries& Z);

JacobiSeries jacobi_cusp(int k, int N, int L);
JacobiSeries jacobi_eisenstein(int k, int N, int L);

// Modular form in q embedded into the frame of a Jacobi series.
MultiSeries lift_q(const ModularQSeries& f, FramePtr target);

struct Index1CoefficientFn {
  std::map<int, Rational> values;  // nonzero values only
  int D_max = -1;
  Rational at(int D) const;  // throws UnknownCoefficient beyond D_max
  std::string to_table() const;  // rows D,numerator,denominator
};
Index1CoefficientFn index1_coefficients(const JacobiSeries& phi);

// Theta^2 with y -> exp(i lambda), to lambda^order.
MultiSeries theta_sq_lambda(int N, int order);

struct JacobiCheckError : SeriesError {
  using SeriesError::SeriesError;
};

}  // namespace ban
