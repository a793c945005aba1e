// Equivariant elliptic genus of C^2 in (q, y, t), its coefficient table c(D, k),
// the lambda-expansion into psi_{2g-2}, and small localization examples.
#pragma once

#include "banana/jacobi.hpp"

namespace ban {

// (q, y, t): q <= N and t + q <= N + K, so every box q <= N, |k| <= K is known.
FramePtr phi0_frame(int N, int K);

MultiSeries phi0_product(int N, int L, int K);
MultiSeries phi0_theta(int N, int L, int K);

struct EllGenTable {
  std::map<std::pair<int, int>, Rational> coeffs;  // (D, k) -> nonzero value
  std::map<int, int> k_max;                         // D -> exact for every k <= k_max
  int D_max = -1;
  int N_q = 0, L_y = 0, K_t = 0;

  Rational at(int D, int k) const;  // throws UnknownCoefficient outside the exact window
  // Lowest k with a nonzero coefficient (exact: the window is unbounded below).
  std::optional<int> k_min(int D) const;
  std::string to_table() const;  // manifest header lines start with '#'
};

EllGenTable extract_table(const MultiSeries& phi0, int L = 0, int K = 0);

// psi_{2g-2} for g = 0..G from the lambda-expansion of phi0 (t = exp(i lambda)).
std::vector<JacobiSeries> psi_from_lambda(const MultiSeries& phi0, int G, int L);
JacobiSeries psi_formula(int g, int N, int L);

// lambda^2 * sum_k c(D, k) exp(i k lambda), coefficients of lambda^0..lambda^order.
std::vector<Rational> profile_lambda(const EllGenTable& table, int D, int order);

// Power series in lambda of (2 cos(lambda) - 2) / (-lambda^2) to lambda^order.
std::vector<Rational> cos_unit(int order);

Rational equivariant_chi_y_c2(const Rational& y, const Rational& t1, const Rational& t2);
// Sum of the three fixed-point contributions on P^2.
Rational chi_y_p2_fixed_points(const Rational& y, const Rational& t1, const Rational& t2);
// chi_y(P^2) as polynomial coefficients in y, from the fixed-point sum at random weights.
std::vector<Rational> chi_y_p2_localization(unsigned seed = 1);

}  // namespace ban
