// Hecke operators on index-one Jacobi forms, Maass and formal Borcherds lifts,
// Igusa cusp forms, Siegel-Eisenstein series and genus-two Siegel arithmetic.
#pragma once

#include "banana/ellgen.hpp"

namespace ban {

// Expansion region for y in Siegel objects: |y| < 1 lifts y^l with l > 0 at
// Q^0 q^0; |y| > 1 lifts y^l with l < 0 there.
enum class Chamber { y_small, y_large };

// (Q, q, y): Q <= M, q <= N and Q + q +- y <= M + N + L (sign by chamber).
FramePtr siegel_frame(int M, int N, int L, Chamber ch = Chamber::y_small);

struct SiegelFJSeries {
  MultiSeries series;
  int weight = 0;
  bool meromorphic = false;
  bool spezialschar = false;
  std::optional<Exps> log_monomial;
};

// epsilon(k): -B_k/(2k) for k > 0, 0 for k = 0, zeta(3)/2 for k = -2.
struct ZetaValue {
  Rational rational = 0, zeta3 = 0;
};
ZetaValue epsilon(int k);

// Divisor-sum coefficient A(m, n, l) = sum_{r | (m, n, l)} r^{k-1} c((4mn - l^2)/r^2).
Rational lift_coefficient(const Index1CoefficientFn& c, int k, int m, int n, int l);

JacobiSeries hecke_vn(const Index1CoefficientFn& c, int k, int N, int Nq, int L);
JacobiSeries hecke_vn(const JacobiSeries& phi, int N, int Nq, int L);
// Index-zero image, in jacobi_frame(Nq, L) (|y| < 1).
JacobiSeries hecke_v0(const Index1CoefficientFn& c, int k, int Nq, int L);
// Same from the closed form in E_k and derivatives of the Weierstrass function (k > 0).
JacobiSeries hecke_v0_closed(const Index1CoefficientFn& c, int k, int Nq, int L);

// Fourier-Jacobi assembly sum_m Q^m (phi | V_m).
SiegelFJSeries maass_lift(const Index1CoefficientFn& c, int k, int M, int N, int L, Chamber ch = Chamber::y_small);
SiegelFJSeries maass_lift(const JacobiSeries& phi, int M, int N, int L, Chamber ch = Chamber::y_small);
// c(0,0) epsilon(k) + sum_{(m,n,l) > 0} c(4nm - l^2) Li_{1-k}(Q^m q^n y^l).
SiegelFJSeries maass_lift_polylog(const Index1CoefficientFn& c, int k, int M, int N, int L,
                                  Chamber ch = Chamber::y_small);
// Lift of the index-zero constant c00 of weight k into a frame containing Q and q.
MultiSeries maass_lift_index0(const Rational& c00, int k, FramePtr f);

// sum over generators of coeff * Li_a(monomial), to the frame's default windows.
MultiSeries polylog_sum(FramePtr f, int a, const std::vector<std::pair<Exps, Rational>>& gens);

// First coefficient violating the divisor-sum law, if any.
std::optional<std::string> spezialschar_check(const SiegelFJSeries& F, const Index1CoefficientFn& c, int k);

// (Q, q, y, t) frame graded by s = 2Q + 2q + y and t + alpha s.
FramePtr borcherds_frame(int S, int T, int alpha);
// prod_{(m,n,l,k) > 0} (1 - Q^m q^n y^l t^k)^{-multiplier c(4nm - l^2, k)} as exp of the Li_1 sum.
// reduced omits the m = n = l = 0 factors.
MultiSeries borcherds_lift_formal(const EllGenTable& table, int multiplier, int S, int T, int alpha,
                                  bool reduced = false);
// Smallest alpha >= 1 keeping every generator of the lift positive on the window.
int borcherds_alpha(const EllGenTable& table, int S);

SiegelFJSeries igusa_chi(int k, int M, int N, int L, Chamber ch = Chamber::y_small);
SiegelFJSeries gritsenko_nikulin_chi10(int M, int N, int L, Chamber ch = Chamber::y_small);
SiegelFJSeries siegel_eisenstein(int k, int M, int N, int L);
ModularQSeries siegel_phi(const SiegelFJSeries& F);
SiegelFJSeries siegel_divide(const SiegelFJSeries& a, const SiegelFJSeries& b);
SiegelFJSeries siegel_mul(const SiegelFJSeries& a, const SiegelFJSeries& b);

struct LiftCheckError : SeriesError {
  using SeriesError::SeriesError;
};

}  // namespace ban
