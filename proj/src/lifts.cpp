#include "banana/lifts.hpp"

#include <cmath>
#include <numeric>

namespace ban {

namespace {

int isqrt(long x) {
  if (x < 0) return -1;
  long r = static_cast<long>(std::sqrt(static_cast<double>(x)));
  while (r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return static_cast<int>(r);
}

Rational rpow(long r, int e) {
  Integer p;
  mpz_ui_pow_ui(p.get_mpz_t(), r, std::abs(e));
  return e >= 0 ? Rational(p) : Rational(Integer(1), p);
}

// Lower bounds read off stored terms; valid when the lowest-weight terms of the
// true support are inside the window (all constructions here).
std::vector<std::int64_t> support_vals(const Frame& f, const std::map<Exps, Rational>& terms) {
  std::vector<std::int64_t> val(f.ngrad(), kInf);
  for (const auto& [e, c] : terms)
    for (int g = 0; g < f.ngrad(); ++g) val[g] = std::min(val[g], f.weigh(g, e));
  for (auto& v : val)
    if (v >= kInf) v = 0;
  return val;
}

MultiSeries build(FramePtr f, std::map<Exps, Rational> terms, std::vector<std::int64_t> cut) {
  std::erase_if(terms, [](const auto& t) { return sgn(t.second) == 0; });
  auto val = support_vals(*f, terms);
  return MultiSeries::from_terms(f, {terms.begin(), terms.end()}, std::move(cut), std::move(val));
}

bool in_window(const Frame& f, const std::vector<std::int64_t>& cut, const Exps& e) {
  for (int g = 0; g < f.ngrad(); ++g)
    if (cut[g] < kInf && f.weigh(g, e) > cut[g]) return false;
  return true;
}

// |l| bound for nonzero A(m, n, l) of a weak index-one lift: some r | (m, n, l) with
// (4mn - l^2)/r^2 >= -1.
int l_bound(int m, int n) {
  const int g = std::gcd(m, n);
  return isqrt(4L * m * n + static_cast<long>(g) * g);
}

bool positive(int m, int n, int l, Chamber ch) {
  if (m > 0 || n > 0) return true;
  return ch == Chamber::y_small ? l > 0 : l < 0;
}

MultiSeries with_constant(MultiSeries s, const Index1CoefficientFn& c, int k) {
  Rational c00 = c.at(0);
  if (sgn(c00) == 0) return s;
  ZetaValue e = epsilon(k);
  FramePtr f = s.frame_ptr();
  s += MultiSeries::constant(f, c00 * e.rational);
  return s.with_zeta3(s.zeta3() + c00 * e.zeta3);
}

}  // namespace

FramePtr siegel_frame(int M, int N, int L, Chamber ch) {
  if (M < 0 || N < 0 || L < 0) throw DomainError("negative window");
  const int s = ch == Chamber::y_small ? 1 : -1;
  return make_frame({{"Q", 1}, {"q", 1}, {"y", 1}}, {{1, 0, 0}, {0, 1, 0}, {1, 1, s}}, {M, N, M + N + L});
}

ZetaValue epsilon(int k) {
  if (k > 0) {
    if (k % 2) throw DomainError("epsilon needs even weight");
    Rational r = -bernoulli(k) / (2 * k);
    r.canonicalize();
    return {r, 0};
  }
  if (k == 0) return {0, 0};
  if (k == -2) return {0, Rational(1, 2)};
  throw DomainError("epsilon(k) out of scope for k = " + std::to_string(k));
}

Rational lift_coefficient(const Index1CoefficientFn& c, int k, int m, int n, int l) {
  const int g = std::gcd(std::gcd(m, n), std::abs(l));
  if (g == 0) throw DomainError("lift coefficient at the origin");
  const long D = 4L * m * n - static_cast<long>(l) * l;
  Rational s = 0;
  for (int r = 1; r <= g; ++r) {
    if (g % r) continue;
    const long r2 = static_cast<long>(r) * r;
    if (D % r2) continue;
    const long d = D / r2;
    if (d < -1) continue;
    Rational v = c.at(static_cast<int>(d));
    if (sgn(v)) s += rpow(r, k - 1) * v;
  }
  return s;
}

JacobiSeries hecke_vn(const Index1CoefficientFn& c, int k, int N, int Nq, int L) {
  if (N < 1) throw DomainError("V_N needs N >= 1");
  FramePtr f = jacobi_frame(Nq, L);
  std::map<Exps, Rational> terms;
  for (int n = 0; n <= Nq; ++n) {
    const int b = l_bound(N, n);
    for (int l = -b; l <= std::min(b, Nq + L - n); ++l) terms[{n, l}] = lift_coefficient(c, k, N, n, l);
  }
  return {build(f, std::move(terms), {Nq, Nq + L}), k, N, JacobiKind::weak, 0};
}

JacobiSeries hecke_vn(const JacobiSeries& phi, int N, int Nq, int L) {
  return hecke_vn(index1_coefficients(phi), phi.weight, N, Nq, L);
}

JacobiSeries hecke_v0(const Index1CoefficientFn& c, int k, int Nq, int L) {
  FramePtr f = jacobi_frame(Nq, L);
  std::map<Exps, Rational> terms;
  for (int n = 0; n <= Nq; ++n) {
    const int b = n == 0 ? Nq + L : n;
    for (int l = -b; l <= std::min(b, Nq + L - n); ++l)
      if (positive(0, n, l, Chamber::y_small)) terms[{n, l}] = lift_coefficient(c, k, 0, n, l);
  }
  MultiSeries s = with_constant(build(f, std::move(terms), {Nq, Nq + L}), c, k);
  return {s, k, 0, JacobiKind::meromorphic, 0};
}

JacobiSeries hecke_v0_closed(const Index1CoefficientFn& c, int k, int Nq, int L) {
  if (k <= 0 || k % 2) throw DomainError("closed form of V_0 needs even k > 0");
  FramePtr f = jacobi_frame(Nq, L);
  MultiSeries s = lift_q(eisenstein(k, Nq), f) * (-c.at(0) * bernoulli(k) / (2 * k));
  MultiSeries w = wp_derivative(k - 2, Nq, L).series;
  if (k == 2) w -= lift_q(eisenstein(2, Nq), f) * Rational(1, 12);
  s += w * c.at(-1);
  return {s, k, 0, JacobiKind::meromorphic, 0};
}

SiegelFJSeries maass_lift(const Index1CoefficientFn& c, int k, int M, int N, int L, Chamber ch) {
  FramePtr f = siegel_frame(M, N, L, ch);
  const std::vector<std::int64_t> cut = f->cutoffs;
  std::map<Exps, Rational> terms;
  // Fourier-Jacobi coefficients: Q^0 from V_0, Q^m from V_m.  V_0 is built for
  // |y| < 1 and every coefficient is even in l, so |y| > 1 is the mirror image.
  for (int m = 0; m <= M; ++m) {
    JacobiSeries jm = m == 0 ? hecke_v0(c, k, N, M + L) : hecke_vn(c, k, m, N, M + L);
    jm.series.for_each([&](const Exps& e, const Rational& v) {
      if (m == 0 && e[0] == 0 && e[1] == 0) return;  // constant added below
      Exps x{m, e[0], ch == Chamber::y_small ? e[1] : -e[1]};
      if (in_window(*f, cut, x)) terms[x] = v;
    });
  }
  MultiSeries s = with_constant(build(f, std::move(terms), cut), c, k);
  return {s, k, false, true, std::nullopt};
}

SiegelFJSeries maass_lift(const JacobiSeries& phi, int M, int N, int L, Chamber ch) {
  return maass_lift(index1_coefficients(phi), phi.weight, M, N, L, ch);
}

MultiSeries polylog_sum(FramePtr f, int a, const std::vector<std::pair<Exps, Rational>>& gens) {
  const std::vector<std::int64_t>& cut = f->cutoffs;
  std::map<Exps, Rational> acc;
  std::vector<std::int64_t> val(f->ngrad(), kInf);
  for (const auto& [gen, c] : gens) {
    bool grows = false;
    for (int g = 0; g < f->ngrad(); ++g) {
      const std::int64_t w = f->weigh(g, gen);
      if (w < 0) throw DomainError("polylog argument " + format_monomial(*f, gen) + " has negative degree");
      grows = grows || (w > 0 && cut[g] < kInf);
      val[g] = std::min(val[g], w);
    }
    if (!grows) throw DomainError("polylog argument " + format_monomial(*f, gen) + " is not truncated");
    if (sgn(c) == 0) continue;
    for (long r = 1;; ++r) {
      Exps x(gen.size());
      for (std::size_t v = 0; v < gen.size(); ++v) x[v] = static_cast<int>(gen[v] * r);
      if (!in_window(*f, cut, x)) break;
      acc[x] += c * rpow(r, -a);
    }
  }
  std::erase_if(acc, [](const auto& t) { return sgn(t.second) == 0; });
  for (auto& v : val)
    if (v >= kInf) v = 0;
  return MultiSeries::from_terms(f, {acc.begin(), acc.end()}, cut, val);
}

SiegelFJSeries maass_lift_polylog(const Index1CoefficientFn& c, int k, int M, int N, int L, Chamber ch) {
  FramePtr f = siegel_frame(M, N, L, ch);
  std::vector<std::pair<Exps, Rational>> gens;
  for (int m = 0; m <= M; ++m)
    for (int n = 0; n <= N; ++n) {
      const int b = m == 0 && n == 0 ? M + N + L : isqrt(4L * m * n + 1);
      for (int l = -b; l <= b; ++l) {
        if (!positive(m, n, l, ch)) continue;
        const long D = 4L * m * n - static_cast<long>(l) * l;
        if (D < -1 || !in_window(*f, f->cutoffs, {m, n, l})) continue;
        Rational v = c.at(static_cast<int>(D));
        if (sgn(v)) gens.push_back({{m, n, l}, v});
      }
    }
  MultiSeries s = with_constant(polylog_sum(f, 1 - k, gens), c, k);
  return {s, k, false, true, std::nullopt};
}

MultiSeries maass_lift_index0(const Rational& c00, int k, FramePtr f) {
  const int iQ = f->index("Q"), iq = f->index("q");
  if (iQ < 0 || iq < 0) throw IncompatibleVariables("index-zero lift needs Q and q");
  std::vector<std::pair<Exps, Rational>> gens;
  for (int v : {iQ, iq})
    for (int n = 1;; ++n) {
      Exps e(f->nvars(), 0);
      e[v] = n;
      if (!in_window(*f, f->cutoffs, e)) break;
      gens.push_back({e, c00});
    }
  MultiSeries s = polylog_sum(f, 1 - k, gens);
  ZetaValue eps = epsilon(k);
  s += MultiSeries::constant(f, c00 * eps.rational);
  return s.with_zeta3(c00 * eps.zeta3);
}

std::optional<std::string> spezialschar_check(const SiegelFJSeries& F, const Index1CoefficientFn& c, int k) {
  const MultiSeries& s = F.series;
  const Frame& f = s.frame();
  const bool small = f.weights[2][2] > 0;
  const Chamber ch = small ? Chamber::y_small : Chamber::y_large;
  std::optional<std::string> bad;
  auto check = [&](const Exps& e, const Rational& v) {
    if (bad) return;
    Rational want;
    if (e == Exps{0, 0, 0}) {
      want = c.at(0) * epsilon(k).rational;
    } else if (!positive(e[0], e[1], e[2], ch) || e[0] < 0 || e[1] < 0) {
      want = 0;
    } else {
      want = lift_coefficient(c, k, e[0], e[1], e[2]);
    }
    if (want != v)
      bad = "A" + format_monomial(f, e) + " = " + v.get_str() + ", divisor sum gives " + want.get_str();
  };
  s.for_each(check);
  // also every window point where the law predicts a nonzero value must be stored
  const int M = static_cast<int>(s.cutoffs()[0]), N = static_cast<int>(s.cutoffs()[1]);
  for (int m = 0; m <= M && !bad; ++m)
    for (int n = 0; n <= N && !bad; ++n) {
      const int b = m == 0 && n == 0 ? static_cast<int>(std::min<std::int64_t>(s.cutoffs()[2], 200)) : l_bound(m, n);
      for (int l = -b; l <= b && !bad; ++l) {
        Exps e{m, n, l};
        if (e == Exps{0, 0, 0} || !s.is_known(e)) continue;
        check(e, s.coefficient(e));
      }
    }
  if (!bad && F.series.zeta3() != c.at(0) * epsilon(k).zeta3) bad = "zeta(3) constant differs";
  return bad;
}

FramePtr borcherds_frame(int S, int T, int alpha) {
  if (S < 0 || alpha < 1) throw DomainError("bad Borcherds window");
  return make_frame({{"Q", 1}, {"q", 1}, {"y", 1}, {"t", 1}},
                    {{2, 2, 1, 0}, {2 * alpha, 2 * alpha, alpha, 1}}, {S, T});
}

namespace {

// (m, n, l) > 0 with |y| < 1 and s = 2m + 2n + l <= S, 4mn - l^2 >= -1.
template <class F>
void for_each_class(int S, F&& fn) {
  for (int m = 0; 2 * m <= S + 1; ++m)
    for (int n = 0; 2 * m + 2 * n <= S + isqrt(4L * m * n + 1); ++n) {
      const int b = isqrt(4L * m * n + 1);
      for (int l = -b; l <= b; ++l) {
        if (!positive(m, n, l, Chamber::y_small)) continue;
        if (2 * m + 2 * n + l > S) continue;
        fn(m, n, l, 4 * m * n - l * l);
      }
    }
}

}  // namespace

int borcherds_alpha(const EllGenTable& table, int S) {
  int alpha = 1;
  for_each_class(S, [&](int m, int n, int l, int D) {
    auto kmin = table.k_min(D);
    if (!kmin) return;
    const int s = 2 * m + 2 * n + l;
    // need kmin + alpha s >= 1
    while (*kmin + alpha * s < 1) ++alpha;
  });
  return alpha;
}

MultiSeries borcherds_lift_formal(const EllGenTable& table, int multiplier, int S, int T, int alpha, bool reduced) {
  FramePtr f = borcherds_frame(S, T, alpha);
  if (multiplier == 0) return MultiSeries::constant(f, 1);
  std::vector<std::pair<Exps, Rational>> gens;
  for_each_class(S, [&](int m, int n, int l, int D) {
    auto kmin = table.k_min(D);
    if (!kmin) {
      table.at(D, T);  // range check
      return;
    }
    const int s = 2 * m + 2 * n + l;
    for (int k = *kmin; k + alpha * s <= T; ++k) {
      Rational v = table.at(D, k);
      if (sgn(v)) gens.push_back({{m, n, l, k}, v * multiplier});
    }
  });
  if (!reduced)
    for (int k = 1; k <= T; ++k) {
      Rational v = table.at(0, k);
      if (sgn(v)) gens.push_back({{0, 0, 0, k}, v * multiplier});
    }
  return exp_series(polylog_sum(f, 1, gens));
}

SiegelFJSeries igusa_chi(int k, int M, int N, int L, Chamber ch) {
  if (k != 10 && k != 12) throw DomainError("Igusa cusp forms of weight 10 or 12");
  auto c = index1_coefficients(jacobi_cusp(k, std::max(1, M * N), 2));
  return maass_lift(c, k, M, N, L, ch);
}

SiegelFJSeries gritsenko_nikulin_chi10(int M, int N, int L, Chamber ch) {
  FramePtr f = siegel_frame(M, N, L, ch);
  JacobiSeries k3 = phi_0_1(std::max(1, M * N), 2);
  k3.series *= Rational(2);
  auto c = index1_coefficients(k3);
  MultiSeries phi10 = jacobi_cusp(10, N, 2).series;
  std::map<Exps, Rational> lead;
  phi10.for_each([&](const Exps& e, const Rational& v) {
    Exps x{1, e[0], e[1]};
    if (in_window(*f, f->cutoffs, x)) lead[x] = v;
  });
  // Q phi_{10,1}: exact in each q-order, so only Q and q bound it.
  auto val = support_vals(*f, lead);
  MultiSeries p = MultiSeries::from_terms(f, {lead.begin(), lead.end()}, {M, N, kInf}, val);
  for (int m = 1; m <= M; ++m)
    for (int n = 0; n <= N; ++n) {
      const int b = isqrt(4L * m * n + 1);
      for (int l = -b; l <= b; ++l) {
        Rational e = c.at(4 * m * n - l * l);
        if (sgn(e) == 0) continue;
        if (e.get_den() != 1) throw LiftCheckError("non-integral product exponent");
        p = (p * MultiSeries::one_minus_power(f, {m, n, l}, e.get_num().get_si(), 1, f->cutoffs)).truncate(f->cutoffs);
      }
    }
  return {p, 10, false, false, std::nullopt};
}

SiegelFJSeries siegel_eisenstein(int k, int M, int N, int L) {
  if (k == 8) {
    SiegelFJSeries e4 = siegel_eisenstein(4, M, N, L);
    SiegelFJSeries e8 = siegel_mul(e4, e4);
    e8.spezialschar = false;
    if (compare_box(siegel_phi(e8).series, eisenstein(8, N).series, {{0, N}}))
      throw LiftCheckError("Phi(E_8) != E_8");
    return e8;
  }
  if (k != 4 && k != 6) throw DomainError("Siegel-Eisenstein series of weight 4, 6 or 8");
  auto c = index1_coefficients(jacobi_eisenstein(k, std::max(1, M * N), 2));
  SiegelFJSeries F = maass_lift(c, k, M, N, L);
  F.series *= 1 / epsilon(k).rational;
  if (compare_box(siegel_phi(F).series, eisenstein(k, N).series, {{0, N}}))
    throw LiftCheckError("Phi(E_k) != E_k");
  return F;
}

ModularQSeries siegel_phi(const SiegelFJSeries& F) {
  const MultiSeries& s = F.series;
  const int N = static_cast<int>(std::min<std::int64_t>(s.cutoffs()[1], s.cutoffs()[2]));
  std::vector<std::pair<Exps, Rational>> terms;
  s.for_each([&](const Exps& e, const Rational& c) {
    if (e[0] != 0) return;
    if (e[2] != 0) throw LiftCheckError("Q^0 coefficient depends on y at " + format_monomial(s.frame(), e));
    if (e[1] <= N) terms.push_back({{e[1]}, c});
  });
  if (sgn(s.zeta3())) throw LiftCheckError("Phi of an object carrying zeta(3)");
  return {MultiSeries::from_terms(q_frame(N), terms, {N}, {0}), F.weight};
}

SiegelFJSeries siegel_divide(const SiegelFJSeries& a, const SiegelFJSeries& b) {
  return {divide(a.series, b.series), a.weight - b.weight, true, false, std::nullopt};
}

SiegelFJSeries siegel_mul(const SiegelFJSeries& a, const SiegelFJSeries& b) {
  return {a.series * b.series, a.weight + b.weight, a.meromorphic || b.meromorphic, false, std::nullopt};
}

}  // namespace ban
