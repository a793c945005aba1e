#include "banana/banana.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace ban {

namespace {

Rational rpow(long r, int e) {
  Integer p;
  mpz_ui_pow_ui(p.get_mpz_t(), r, std::abs(e));
  return e >= 0 ? Rational(p) : Rational(Integer(1), p);
}

Integer factorial(int n) {
  Integer f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

int gcd3(int a, int b, int c) { return std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c)); }

bool chart_positive(int m, int n, int l) { return m > 0 || n > 0 || l > 0; }

}  // namespace

int quadratic_form(const FiberClass& d) {
  return 2 * d.d1 * d.d2 + 2 * d.d1 * d.d3 + 2 * d.d2 * d.d3 - d.d1 * d.d1 - d.d2 * d.d2 - d.d3 * d.d3;
}

FiberClass class_of_chart(int m, int n, int l) { return {m, n, l + m + n}; }

std::array<int, 3> chart_of_class(const FiberClass& d) { return {d.d1, d.d2, d.d3 - d.d1 - d.d2}; }

FiberClass lattice_action(LatticeGenerator g, const FiberClass& d) {
  switch (g) {
    case LatticeGenerator::gamma1:
      return {d.d1, d.d2, 2 * d.d1 + 2 * d.d2 - d.d3};
    case LatticeGenerator::gamma2:
      return {d.d2, d.d1, d.d3};
    case LatticeGenerator::gamma3:
      return {d.d3, d.d2, d.d1};
  }
  throw DomainError("unknown lattice generator");
}

EllGenTable ellgen_table(int Nq, int K) { return extract_table(phi0_product(Nq, 2, K), 2, K); }

FramePtr dt_frame(int S, int T, int alpha) {
  if (S < 0 || alpha < 1) throw DomainError("bad DT window");
  return make_frame({{"Q1", 1}, {"Q2", 1}, {"Q3", 1}, {"t", 1}}, {{1, 1, 1, 0}, {alpha, alpha, alpha, 1}}, {S, T});
}

MultiSeries dt_partition_function(const EllGenTable& table, int S, int T, int alpha, bool reduced) {
  FramePtr f = dt_frame(S, T, alpha);
  MultiSeries z = MultiSeries::constant(f, 1);
  for (int d1 = 0; d1 <= S; ++d1)
    for (int d2 = 0; d1 + d2 <= S; ++d2)
      for (int d3 = 0; d1 + d2 + d3 <= S; ++d3) {
        const FiberClass d{d1, d2, d3};
        const int D = quadratic_form(d), s = d1 + d2 + d3;
        if (D < -1) continue;
        if (s == 0 && reduced) continue;
        auto lo = table.k_min(D);
        if (!lo) {
          table.at(D, T);  // range check
          continue;
        }
        for (int k = s == 0 ? 1 : *lo; k + alpha * s <= T; ++k) {
          Rational c = table.at(D, k);
          if (sgn(c) == 0) continue;
          if (c.get_den() != 1) throw JacobiCheckError("non-integral elliptic genus coefficient");
          if (k + alpha * s < 1) throw DomainError("alpha too small for the DT window");
          z = (z * MultiSeries::one_minus_power(f, {d1, d2, d3, k}, -12 * c.get_num().get_si(), 1, f->cutoffs))
                  .truncate(f->cutoffs);
        }
      }
  return z;
}

MultiSeries dt_to_siegel(const MultiSeries& dt) {
  const Frame& f = dt.frame();
  if (f.nvars() != 4 || f.index("Q1") != 0 || f.index("Q2") != 1 || f.index("Q3") != 2 || f.index("t") != 3)
    throw IncompatibleVariables("dt_to_siegel needs a (Q1, Q2, Q3, t) series");
  return substitute_monomial(dt, {{"Q", 1}, {"q", 1}, {"y", 1}, {"t", 1}},
                             {{1, 0, -1, 0}, {0, 1, -1, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
}

Rational deg0_fg(int g) {
  if (g < 2) throw DomainError("degree-zero constant defined for g >= 2");
  Rational v = Rational(12) / Rational(factorial(2 * g - 2)) * (abs(bernoulli(2 * g)) / (2 * g)) *
               (bernoulli(2 * g - 2) / (2 * g - 2));
  v.canonicalize();
  return v;
}

Index1CoefficientFn psi_coefficients(int g, int D_max) {
  const int N = std::max(1, (D_max + 3) / 4);
  return index1_coefficients(psi_formula(g, N, 2));
}

SiegelFJSeries gw_potential_ml(int g, int M, int N, int L) {
  JacobiSeries psi = psi_formula(g, std::max(1, M * N), 2);
  psi.series *= Rational(12);
  return maass_lift(psi, M, N, L);
}

SiegelFJSeries gw_potential_closed(int g, int M, int N, int L) {
  if (g < 2 || g > 5) throw DomainError("closed Siegel formula for g = 2..5");
  FramePtr f = siegel_frame(M, N, L);
  auto cut = f->cutoffs;
  // chi10 starts at Q q: one extra order in Q and q, two in y
  SiegelFJSeries c10 = igusa_chi(10, M + 1, N + 1, L + 2), c12 = igusa_chi(12, M + 1, N + 1, L + 2);
  MultiSeries X = siegel_divide(c12, c10).series.truncate(cut);
  if (g == 2) return {X * Rational(1, 240), 2, true, false, std::nullopt};
  const Rational lead = 6 * abs(bernoulli(2 * g)) / (g * Rational(factorial(2 * g - 2)));
  MultiSeries E4 = siegel_eisenstein(4, M, N, L).series, E6 = siegel_eisenstein(6, M, N, L).series;
  MultiSeries s = eval_tripoly(wp_poly(g), X, E4, E6) * lead;
  MultiSeries E = g == 3 ? E4 : g == 4 ? E6 : siegel_eisenstein(8, M, N, L).series;
  s += E * deg0_fg(g);
  return {s.truncate(cut), 2 * g - 2, true, false, std::nullopt};
}

Rational gw_invariant(int g, const FiberClass& d, const Index1CoefficientFn& psi) {
  const int r0 = gcd3(d.d1, d.d2, d.d3);
  if (r0 == 0) throw DomainError("GW invariant of the zero class");
  const int D = quadratic_form(d);
  Rational s = 0;
  for (int r = 1; r <= r0; ++r) {
    if (r0 % r || D % (r * r)) continue;
    s += rpow(r, 2 * g - 3) * 12 * psi.at(D / (r * r));
  }
  return s;
}

namespace {

CheckReport gwdt_run(int G, int M, int N, int L, int S_small) {
  CheckReport rep;
  const int Dmax = 4 * M * N;
  const int order = 2 * G;
  // Phi_0 table wide enough for the lambda profile of every D <= Dmax
  const int Nq = std::max(1, M * N);
  EllGenTable tab = ellgen_table(Nq, Dmax / 4 + 4);
  // (1) log Z'_DT against the literal product on a small window
  {
    const int alpha = borcherds_alpha(tab, S_small);
    const int T = std::min(tab.K_t, 2 * alpha * S_small + 2);
    MultiSeries lz = log_series(dt_to_siegel(dt_partition_function(tab, S_small, T, alpha, true)));
    // sum_{h >= 1} (12/h) c(D, k) Q^{hm} q^{hn} y^{hl} t^{hk} over the product generators
    std::map<Exps, Rational> want;
    for (int d1 = 0; d1 <= S_small; ++d1)
      for (int d2 = 0; d1 + d2 <= S_small; ++d2)
        for (int d3 = 0; d1 + d2 + d3 <= S_small; ++d3) {
          const int s = d1 + d2 + d3;
          if (s == 0) continue;
          const int D = quadratic_form({d1, d2, d3});
          auto lo = D >= -1 ? tab.k_min(D) : std::nullopt;
          if (!lo) continue;
          auto [m, n, l] = chart_of_class({d1, d2, d3});
          for (int k = *lo; k + alpha * s <= T; ++k) {
            const Rational c = tab.at(D, k);
            if (sgn(c) == 0) continue;
            for (int h = 1; h * (k + alpha * s) <= T && h * s <= S_small; ++h) want[{h * m, h * n, h * l, h * k}] += 12 * c / h;
          }
        }
    ++rep.compared;
    std::optional<std::string> bad;
    auto cmp = [&](const Exps& e) {
      if (bad || !lz.is_known(e)) return;
      const Rational w = want.count(e) ? want.at(e) : Rational(0);
      if (lz.coefficient(e) != w)
        bad = "log Z'_DT at " + format_monomial(lz.frame(), e) + ": " + lz.coefficient(e).get_str() + " vs " + w.get_str();
    };
    lz.for_each([&](const Exps& e, const Rational&) { cmp(e); });
    for (const auto& [e, w] : want) cmp(e);
    if (bad) {
      rep.detail = *bad;
      return rep;
    }
  }
  // (2) per (m, n, l): lambda-expansion of the Li_1 section against the Maass lifts
  std::vector<SiegelFJSeries> ml;
  for (int g = 0; g <= G; ++g) ml.push_back(gw_potential_ml(g, M, N, L));
  std::map<int, std::vector<Rational>> prof;
  auto profile = [&](int D) -> const std::vector<Rational>& {
    auto it = prof.find(D);
    if (it == prof.end()) it = prof.emplace(D, profile_lambda(tab, D, order)).first;
    return it->second;
  };
  if (ml[0].series.zeta3() != -12) {
    rep.detail = "zeta(3) coefficient of ML(12 psi_-2) is " + ml[0].series.zeta3().get_str();
    return rep;
  }
  for (int m = 0; m <= M; ++m)
    for (int n = 0; n <= N; ++n)
      for (int l = -L; l <= L; ++l) {
        for (int g = 0; g <= G; ++g) {
          const Exps e{m, n, l};
          Rational rhs = 0;
          if (m == 0 && n == 0 && l == 0) {
            if (g < 2) continue;  // lambda^-2 carries zeta(3), lambda^0 has no constant
            rhs = deg0_fg(g);
          } else if (chart_positive(m, n, l)) {
            const int r0 = gcd3(m, n, l);
            const int D = 4 * m * n - l * l;
            for (int h = 1; h <= r0; ++h) {
              if (r0 % h || D % (h * h) || D / (h * h) < -1) continue;
              rhs += 12 * rpow(h, 2 * g - 3) * profile(D / (h * h))[2 * g];
            }
          }
          const Rational lhs = ml[g].series.coefficient(e);
          ++rep.compared;
          if (lhs != rhs) {
            rep.detail = "lambda^" + std::to_string(2 * g - 2) + " at " + format_monomial(ml[g].series.frame(), e) +
                         ": ML " + lhs.get_str() + " vs DT " + rhs.get_str();
            return rep;
          }
        }
      }
  rep.pass = true;
  return rep;
}

}  // namespace

CheckReport gwdt_identity_check(int G, int M, int N, int L, int S_small) {
  try {
    return gwdt_run(G, M, N, L, S_small);
  } catch (const UnknownCoefficient& e) {
    return {false, false, e.what(), 0};
  } catch (const WindowOverflow& e) {
    return {false, false, e.what(), 0};
  }
}

GVResult gv_extract(const EllGenTable& table, int D, int K) {
  GVResult out;
  if (K < 4) throw DomainError("GV peeling needs K >= 4");
  std::map<int, Rational> f, P;
  for (int k = -K; k <= K; ++k) f[k] = 12 * table.at(D, k) * (k % 2 ? -1 : 1);
  auto F = [&](int k) -> Rational { return f.count(k) ? f[k] : Rational(0); };
  for (int k = -(K - 1); k <= K - 1; ++k) P[k] = F(k - 1) + 2 * F(k) + F(k + 1);
  int gmax = -1;
  for (int k = K - 2; k >= 0; --k)
    if (sgn(P[k])) {
      gmax = k;
      break;
    }
  if (gmax > K - 4) {
    out.detail = "t-window too small: top genus " + std::to_string(gmax) + " with K = " + std::to_string(K);
    return out;
  }
  out.n.assign(std::max(gmax, 0) + 1, 0);
  for (int g = gmax; g >= 0; --g) {
    const Rational ng = P[g];
    out.n[g] = ng;
    if (sgn(ng) == 0) continue;
    // (t + 2 + 1/t)^g = sum_j binom(2g, j) t^{g-j}
    for (int j = 0; j <= 2 * g; ++j) {
      Integer b;
      mpz_bin_uiui(b.get_mpz_t(), 2 * g, j);
      P[g - j] -= ng * Rational(b);
    }
  }
  if (gmax < 0) out.n.clear();
  for (int k = -(K - 2); k <= K - 2; ++k)
    if (sgn(P[k])) {
      out.detail = "remainder " + P[k].get_str() + " at t^" + std::to_string(k);
      return out;
    }
  out.valid = true;
  return out;
}

Rational GVTable::at(int g, int D) const {
  auto it = values.find({g, D});
  return it == values.end() ? Rational(0) : it->second;
}

std::string GVTable::render() const {
  std::ostringstream os;
  for (int parity : {1, 0}) {
    os << std::left << std::setw(13) << (parity ? "n_{g,4n-1}/12" : "n_{g,4n}/12") << std::right;
    for (int g = 0; g <= g_cols; ++g) os << std::setw(8) << ("g=" + std::to_string(g));
    os << "\n";
    for (int n = 0; n <= n_max; ++n) {
      const int D = 4 * n - parity;
      os << std::setw(13) << ("n=" + std::to_string(n));
      for (int g = 0; g <= g_cols; ++g) os << std::setw(8) << Rational(at(g, D) / 12).get_str();
      os << (valid.count(D) && valid.at(D) ? "" : "  INVALID") << "\n";
    }
    os << "\n";
  }
  return os.str();
}

std::string GVTable::to_csv() const {
  std::ostringstream os;
  os << "D,form_parity,g,n_over_12_numerator,denominator,validity\n";
  for (int n = 0; n <= n_max; ++n)
    for (int parity : {1, 0}) {
      const int D = 4 * n - parity;
      for (int g = 0; g <= g_cols; ++g) {
        Rational v = at(g, D) / 12;
        os << D << "," << (parity ? "odd" : "even") << "," << g << "," << v.get_num() << "," << v.get_den() << ","
           << (valid.count(D) && valid.at(D) ? "ok" : "invalid") << "\n";
      }
    }
  return os.str();
}

GVTable gv_tables(int n_max, int g_max) {
  if (n_max < 0 || g_max < 0) throw DomainError("negative table size");
  GVTable t;
  t.n_max = n_max;
  t.g_cols = g_max;
  const int K = std::max(n_max + 6, g_max + 4);
  EllGenTable tab = ellgen_table(std::max(1, n_max), K);
  for (int n = 0; n <= n_max; ++n)
    for (int D : {4 * n - 1, 4 * n}) {
      GVResult r = gv_extract(tab, D, K);
      t.valid[D] = r.valid;
      t.detail[D] = r.detail;
      t.g_max[D] = static_cast<int>(r.n.size()) - 1;
      for (std::size_t g = 0; g < r.n.size(); ++g)
        if (sgn(r.n[g])) t.values[{static_cast<int>(g), D}] = r.n[g];
    }
  return t;
}

std::optional<std::string> gv_shape_check(const GVTable& t) {
  for (int n = 1; n <= t.n_max; ++n) {
    const Rational sign = n % 2 ? 1 : -1;
    const int Dodd = 4 * n - 1, Deven = 4 * n;
    if (t.g_max.at(Dodd) != n + 1) return "g_max(" + std::to_string(Dodd) + ") != " + std::to_string(n + 1);
    if (t.g_max.at(Deven) != n + 1) return "g_max(" + std::to_string(Deven) + ") != " + std::to_string(n + 1);
    if (t.at(n + 1, Dodd) / 12 != sign * n) return "top value at D=" + std::to_string(Dodd);
    if (t.at(n + 1, Deven) / 12 != -sign * 2 * n) return "top value at D=" + std::to_string(Deven);
  }
  return std::nullopt;
}

std::pair<std::vector<Rational>, std::vector<Rational>> gv_psi_bridge(const GVResult& gv, int D, int order) {
  // index i <-> lambda^{i-2}
  const int len = order + 3;
  std::vector<Rational> lhs(len, 0), rhs(len, 0);
  std::vector<Rational> u = cos_unit(order + 2);  // (2 sin(lambda/2))^2 = lambda^2 u
  for (std::size_t g = 0; g < gv.n.size(); ++g) {
    // lambda^{2g-2} u^{g-1}: u^{-1} for g = 0
    std::vector<Rational> p(len, 0);
    if (g == 0) {
      // inverse of u as a power series
      p[0] = 1;
      for (int i = 1; i < len; ++i) {
        Rational s = 0;
        for (int j = 1; j <= i; ++j) s += u[j] * p[i - j];
        p[i] = -s;
      }
    } else {
      p[0] = 1;
      for (std::size_t r = 1; r < g; ++r) {
        std::vector<Rational> q(len, 0);
        for (int i = 0; i < len; ++i)
          for (int j = 0; i + j < len; ++j) q[i + j] += p[i] * u[j];
        p = q;
      }
    }
    for (int i = 0; i < len; ++i)
      if (i + 2 * static_cast<int>(g) < len) lhs[i + 2 * g] += gv.n[g] * p[i];
  }
  for (int g = 0; 2 * g < len; ++g) rhs[2 * g] = 12 * psi_coefficients(g, std::max(D, 0) + 4).at(D);
  return {lhs, rhs};
}

MultiSeries schoen_dt(int N) {
  FramePtr f = make_frame({{"Q", 1}, {"q", 1}}, {{1, 0}, {0, 1}}, {N, N});
  MultiSeries z = MultiSeries::constant(f, 1);
  for (int n = 1; n <= N; ++n) {
    z *= MultiSeries::one_minus_power(f, {n, 0}, -12);
    z *= MultiSeries::one_minus_power(f, {0, n}, -12);
  }
  return z;
}

SchoenReport schoen_f1_check(int N) {
  SchoenReport rep;
  MultiSeries z = schoen_dt(N);
  MultiSeries lz = log_series(z);
  MultiSeries ml = maass_lift_index0(12, 0, z.frame_ptr());
  auto mm = compare_box(lz, ml, {{0, N}, {0, N}});
  rep.log_matches_ml = !mm;
  if (mm) rep.detail = mm->describe(lz.frame());
  rep.mixed_vanish = true;
  lz.for_each([&](const Exps& e, const Rational&) {
    if (e[0] > 0 && e[1] > 0) rep.mixed_vanish = false;
  });
  // product exponents by Moebius inversion of log = sum_d a_d Q^d, a_d = sum_{r | d} e_{d/r} / r
  std::map<std::pair<int, int>, Rational> expo;
  for (int a = 0; a <= N; ++a)
    for (int b = 0; b <= N; ++b) {
      if (a + b == 0) continue;
      Rational s = lz.coefficient({a, b});
      const int r0 = std::gcd(a, b);
      for (int r = 2; r <= r0; ++r)
        if (r0 % r == 0) s -= expo[{a / r, b / r}] / r;
      expo[{a, b}] = s;
    }
  // genus-one elliptic classes: prod_k (1 - Q^{k beta})^{-n_beta} for primitive beta
  for (const auto& [d, e] : expo) {
    const int r0 = std::gcd(d.first, d.second);
    const std::pair<int, int> prim{d.first / r0, d.second / r0};
    if (r0 == 1) {
      if (sgn(e)) rep.gv[prim] = e;
    } else if (e != expo[prim]) {
      rep.detail = "exponent at (" + std::to_string(d.first) + "," + std::to_string(d.second) +
                   ") differs from its primitive class";
      rep.mixed_vanish = false;
    }
  }
  return rep;
}

}  // namespace ban
