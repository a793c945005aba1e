// Banana manifold: DT partition function, GW potentials by three routes, GV
// extraction, lattice symmetries, degree-zero terms and the Schoen manifold.
#pragma once

#include <array>

#include "banana/lifts.hpp"
#include "banana/nekrasov.hpp"

namespace ban {

// d1 C1 + d2 C2 + d3 C3; the chart is (m, n, l) = (d1, d2, d3 - d1 - d2).
struct FiberClass {
  int d1 = 0, d2 = 0, d3 = 0;
  bool operator==(const FiberClass&) const = default;
};
int quadratic_form(const FiberClass& d);
FiberClass class_of_chart(int m, int n, int l);
std::array<int, 3> chart_of_class(const FiberClass& d);

enum class LatticeGenerator { gamma1, gamma2, gamma3 };
FiberClass lattice_action(LatticeGenerator g, const FiberClass& d);

// Table of Phi_0 coefficients exact for D <= 4 Nq and k <= K.
EllGenTable ellgen_table(int Nq, int K);

// (Q1, Q2, Q3, t): d1 + d2 + d3 <= S and t + alpha (d1 + d2 + d3) <= T.
FramePtr dt_frame(int S, int T, int alpha);
// prod_{d, k} (1 - Q1^d1 Q2^d2 Q3^d3 t^k)^{-12 c(||d||, k)}; reduced drops d = 0.
MultiSeries dt_partition_function(const EllGenTable& table, int S, int T, int alpha, bool reduced = false);
// Q1 = Q/y, Q2 = q/y, Q3 = y: into borcherds_frame(S, T, alpha).
MultiSeries dt_to_siegel(const MultiSeries& dt);

Rational deg0_fg(int g);

// ML(12 psi_{2g-2}) for g >= 0.
SiegelFJSeries gw_potential_ml(int g, int M, int N, int L);
// Closed form in chi12/chi10 and the Siegel-Eisenstein series, g = 2..5.
SiegelFJSeries gw_potential_closed(int g, int M, int N, int L);
// Coefficients c_{2g-2}(D) of psi_{2g-2} up to D_max.
Index1CoefficientFn psi_coefficients(int g, int D_max);

// sum_{r | d} r^{2g-3} 12 c_{2g-2}(||d|| / r^2), with c from psi_{2g-2}.
Rational gw_invariant(int g, const FiberClass& d, const Index1CoefficientFn& psi);

struct CheckReport {
  bool pass = false;
  bool sufficient = true;
  std::string detail;
  std::size_t compared = 0;
};

// sum_g lambda^{2g-2} ML(12 psi_{2g-2}) against -12 zeta(3)/lambda^2 + sum F_g^0 lambda^{2g-2}
// + log Z'_DT at t = exp(i lambda), for g <= G on Q <= M, q <= N, |l| <= L.  log Z'_DT
// is tied to the literal product on total degree <= S_small.
CheckReport gwdt_identity_check(int G, int M, int N, int L, int S_small = 4);

struct GVResult {
  std::vector<Rational> n;  // n_{0, D} .. n_{g_max, D}
  bool valid = false;
  std::string detail;
};
// Peel sum_k 12 c(D, k) (-t)^k (t + 2 + 1/t) into powers of (t + 2 + 1/t) using |k| <= K.
GVResult gv_extract(const EllGenTable& table, int D, int K);

struct GVTable {
  std::map<std::pair<int, int>, Rational> values;  // (g, D) -> n_{g, D}
  std::map<int, int> g_max;
  std::map<int, bool> valid;
  std::map<int, std::string> detail;
  int n_max = 0, g_cols = 0;

  Rational at(int g, int D) const;
  std::string render() const;  // both tables of n / 12, text
  std::string to_csv() const;  // D,form_parity,g,n_over_12_numerator,denominator,validity
};
GVTable gv_tables(int n_max, int g_max);

// Shape checks on a GV table: g_max = n + 1 and the top-genus values.
std::optional<std::string> gv_shape_check(const GVTable& t);

// sum_g n_{g,D} (2 sin(lambda/2))^{2g-2} and 12 sum_g c_{2g-2}(D) lambda^{2g-2}, as
// coefficients of lambda^{-2} .. lambda^{order}.
std::pair<std::vector<Rational>, std::vector<Rational>> gv_psi_bridge(const GVResult& gv, int D, int order);

// Reference tables of n_{g, 4n-1}/12 (odd) and n_{g, 4n}/12 (even), n <= 5, g <= 6.
const std::vector<std::vector<long>>& reference_gv_table(bool even);

// prod_n (1 - Q^n)^-12 (1 - q^n)^-12 to Q, q <= N.
MultiSeries schoen_dt(int N);
struct SchoenReport {
  bool log_matches_ml = false;
  bool mixed_vanish = false;
  std::map<std::pair<int, int>, Rational> gv;  // nonzero genus-one invariants on primitive classes
  std::string detail;
};
SchoenReport schoen_f1_check(int N);

}  // namespace ban
