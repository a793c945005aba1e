#include "banana/ellgen.hpp"

#include <random>
#include <set>
#include <sstream>

namespace ban {

namespace {

// Shrink to the requested cutoffs, failing if the computed region is smaller.
MultiSeries require_cut(const MultiSeries& s, const std::vector<std::int64_t>& cut) {
  for (std::size_t g = 0; g < cut.size(); ++g)
    if (s.cutoffs()[g] < cut[g]) throw WindowOverflow("computed window smaller than requested");
  return s.truncate(cut);
}

Rational factorial(int n) {
  Integer f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return Rational(f);
}

int grading_of(const Frame& f, const std::string& var) {
  const int v = f.index(var);
  for (int g = 0; g < f.ngrad(); ++g) {
    bool alone = f.weights[g][v] > 0;
    for (int u = 0; u < f.nvars(); ++u) alone = alone && (u == v || f.weights[g][u] == 0);
    if (alone) return g;
  }
  throw DomainError("no grading for " + var);
}

std::vector<Rational> series_mul(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  std::vector<Rational> c(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size() && j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

std::vector<Rational> series_inv(const std::vector<Rational>& a) {
  std::vector<Rational> b(a.size(), 0);
  b[0] = 1 / a[0];
  for (std::size_t n = 1; n < a.size(); ++n) {
    Rational s = 0;
    for (std::size_t j = 1; j <= n; ++j) s += a[j] * b[n - j];
    b[n] = -s / a[0];
  }
  return b;
}

}  // namespace

FramePtr phi0_frame(int N, int K) {
  if (N < 0 || K < 0) throw DomainError("negative window");
  return make_frame({{"q", 1}, {"y", 1}, {"t", 1}}, {{1, 0, 0}, {1, 0, 1}}, {N, N + K});
}

MultiSeries phi0_product(int N, int L, int K) {
  if (L < 0) throw DomainError("negative window");
  FramePtr f = phi0_frame(N, K);
  const std::vector<std::int64_t> cut = f->cutoffs;
  // n = 1 denominators: (1 - t)(1 - t^{-1}) = -t^{-1}(1 - t)^2
  MultiSeries p = shift(MultiSeries::one_minus_power(f, {0, 0, 1}, -2), {0, -1, 1}, -1);
  p *= MultiSeries::polynomial(f, {{{0, 0, 0}, 1}, {{0, 1, 1}, -1}});
  p *= MultiSeries::polynomial(f, {{{0, 0, 0}, 1}, {{0, 1, -1}, -1}});
  for (int n = 1; n <= N; ++n) {
    // q^n factors of the numerator: (1 - y^{-1} q^n t^{+-1}) (1 - y q^n t^{+-1})
    for (int s : {1, -1}) {
      p *= MultiSeries::one_minus_power(f, {n, -1, s}, 1);
      p *= MultiSeries::one_minus_power(f, {n, 1, s}, 1);
      p = p.truncate(cut);
    }
    // denominators (1 - q^n t^{+-1}) twice each: from q^{n-1} at n+1 and q^n at n
    for (int s : {1, -1}) p = (p * MultiSeries::one_minus_power(f, {n, 0, s}, -2)).truncate(cut);
  }
  return require_cut(p, cut);
}

MultiSeries phi0_theta(int N, int L, int K) {
  if (L < 0) throw DomainError("negative window");
  // Theta functions in q^{1/8}, y^{1/2}, t^{1/2}; truncated in q, then t + q.
  const int Nq = N + 1;
  const std::int64_t qcut = 8 * Nq, tcut = 8 * (N + K + 2);
  FramePtr f = make_frame({{"q", 8}, {"y", 2}, {"t", 2}}, {{1, 0, 0}, {1, 0, 4}}, {qcut, tcut});
  std::vector<std::pair<Exps, Rational>> plus, minus, at_x;
  for (int s = -1; s * s <= qcut; s -= 2)
    for (int sg : {s, -s}) {
      Rational c = ((sg - 1) / 2) % 2 == 0 ? 1 : -1;
      plus.push_back({{sg * sg, sg, sg}, c});
      minus.push_back({{sg * sg, sg, -sg}, c});
      at_x.push_back({{sg * sg, 0, sg}, c});
    }
  auto exact_in_q = [&](const std::vector<std::pair<Exps, Rational>>& t) {
    std::vector<std::int64_t> val(2, kInf);
    for (const auto& [e, c] : t)
      for (int g = 0; g < 2; ++g) val[g] = std::min(val[g], f->weigh(g, e));
    return MultiSeries::from_terms(f, t, {qcut, kInf}, val);
  };
  // The unit -i cancels between numerator and denominator.
  MultiSeries num = exact_in_q(plus) * exact_in_q(minus);
  MultiSeries den = exact_in_q(at_x);
  MultiSeries q = -(num * invert_unit(den * den));
  MultiSeries out = to_integral(q, phi0_frame(N, K));
  return require_cut(out, phi0_frame(N, K)->cutoffs);
}

Rational EllGenTable::at(int D, int k) const {
  if (D < -1) return 0;
  if (D > D_max) throw UnknownCoefficient("c(" + std::to_string(D) + ", k) beyond computed range");
  const int m = ((D % 4) + 4) % 4;
  if (m == 1 || m == 2) return 0;
  auto it = k_max.find(D);
  if (it == k_max.end() || k > it->second)
    throw UnknownCoefficient("c(" + std::to_string(D) + ", " + std::to_string(k) + ") outside exact window");
  auto c = coeffs.find({D, k});
  return c == coeffs.end() ? Rational(0) : c->second;
}

std::optional<int> EllGenTable::k_min(int D) const {
  auto it = coeffs.lower_bound({D, std::numeric_limits<int>::min()});
  if (it == coeffs.end() || it->first.first != D) return std::nullopt;
  return it->first.second;
}

std::string EllGenTable::to_table() const {
  std::ostringstream os;
  os << "# N_q=" << N_q << " L_y=" << L_y << " K_t=" << K_t << " D_max=" << D_max << "\n";
  os << "# exact k-window per D (unbounded below):";
  for (const auto& [D, k] : k_max) os << " " << D << ":" << k;
  os << "\nD,k,numerator,denominator\n";
  for (const auto& [dk, c] : coeffs)
    if (dk.second <= k_max.at(dk.first))
      os << dk.first << "," << dk.second << "," << c.get_num() << "," << c.get_den() << "\n";
  return os.str();
}

EllGenTable extract_table(const MultiSeries& phi0, int L, int K) {
  const Frame& f = phi0.frame();
  if (f.nvars() != 3 || f.index("q") != 0 || f.index("y") != 1 || f.index("t") != 2)
    throw IncompatibleVariables("extract_table needs a (q, y, t) series");
  if (f.weights != std::vector<std::vector<int>>{{1, 0, 0}, {1, 0, 1}})
    throw IncompatibleVariables("extract_table needs the (q, t + q) gradings");
  const std::int64_t N = phi0.cutoffs()[0], W = phi0.cutoffs()[1];
  if (N >= kInf || W >= kInf) throw WindowOverflow("phi0 must carry finite windows");
  EllGenTable out;
  out.N_q = static_cast<int>(N);
  out.L_y = L;
  out.K_t = K;
  out.D_max = static_cast<int>(4 * N);
  std::map<std::pair<int, int>, Exps> first;
  phi0.for_each([&](const Exps& e, const Rational& c) {
    const int D = 4 * e[0] - e[1] * e[1];
    if (D < -1) throw JacobiCheckError("c(D, k) nonzero for D < -1 at " + format_monomial(f, e));
    auto [it, fresh] = out.coeffs.try_emplace({D, e[2]}, c);
    if (fresh) first[{D, e[2]}] = e;
    else if (it->second != c)
      throw JacobiCheckError("c(" + std::to_string(D) + ", " + std::to_string(e[2]) + ") differs between " +
                             format_monomial(f, first[{D, e[2]}]) + " and " + format_monomial(f, e));
  });
  for (int D = -1; D <= out.D_max; ++D) {
    const int m = ((D % 4) + 4) % 4;
    if (m == 1 || m == 2) continue;
    int nmin = -1;
    for (int l = 0; l * l <= 4 * N - D; ++l) {
      if ((D + l * l) % 4) continue;
      const int n = (D + l * l) / 4;
      if (nmin < 0) nmin = n;
      // every representative must carry every (D, k) value it knows
      for (const auto& [dk, c] : out.coeffs) {
        if (dk.first != D || dk.second > W - n) continue;
        for (int sl : {l, -l})
          if (phi0.coefficient({n, sl, dk.second}) != c)
            throw JacobiCheckError("representative (" + std::to_string(n) + ", " + std::to_string(sl) +
                                   ") disagrees at D=" + std::to_string(D));
      }
    }
    out.k_max[D] = static_cast<int>(W - nmin);
  }
  return out;
}

std::vector<Rational> cos_unit(int order) {
  std::vector<Rational> u(order + 1, 0);
  for (int j = 1; 2 * j - 2 <= order; ++j) u[2 * j - 2] = Rational(j % 2 ? 2 : -2) / factorial(2 * j);
  return u;
}

std::vector<JacobiSeries> psi_from_lambda(const MultiSeries& phi0, int G, int L) {
  const Frame& f = phi0.frame();
  if (f.index("t") != 2 || f.nvars() != 3) throw IncompatibleVariables("psi_from_lambda needs a (q, y, t) series");
  FramePtr fp = phi0.frame_ptr();
  // (t - 2 + 1/t) phi0 is a Laurent polynomial in t at each q^n with |k| <= 2n + 1.
  MultiSeries P = phi0 * MultiSeries::polynomial(fp, {{{0, 0, 1}, 1}, {{0, 0, 0}, -2}, {{0, 0, -1}, 1}});
  const std::int64_t Np = std::min<std::int64_t>(P.cutoffs()[0], (P.cutoffs()[1] - 1) / 3);
  if (Np < 0) throw WindowOverflow("t-window too small for the lambda-expansion");
  std::vector<std::pair<Exps, Rational>> terms;
  std::vector<std::int64_t> val(2, kInf);
  P.for_each([&](const Exps& e, const Rational& c) {
    if (e[0] > Np) return;
    if (std::abs(e[2]) > 2 * e[0] + 1) throw JacobiCheckError("t-degree bound violated at " + format_monomial(f, e));
    terms.push_back({e, c});
    for (int g = 0; g < 2; ++g) val[g] = std::min(val[g], f.weigh(g, e));
  });
  MultiSeries exact = MultiSeries::from_terms(fp, terms, {Np, kInf}, val);
  MultiSeries lam = substitute_exponential(exact, "t", "lambda", 2 * G);
  FramePtr lf = lam.frame_ptr();
  const int lg = grading_of(*lf, "lambda");
  std::vector<std::pair<Exps, Rational>> ut;
  auto u = cos_unit(2 * G);
  for (int j = 0; j <= 2 * G; ++j)
    if (sgn(u[j])) ut.push_back({{0, 0, j}, u[j]});
  std::vector<std::int64_t> ucut(lf->ngrad(), kInf), uval(lf->ngrad(), 0);
  ucut[lg] = 2 * G;
  MultiSeries R = -(lam * invert_unit(MultiSeries::from_terms(lf, ut, ucut, uval)));
  std::vector<JacobiSeries> out;
  FramePtr jf = jacobi_frame(static_cast<int>(Np), L);
  for (int g = 0; g <= G; ++g) {
    std::vector<std::pair<Exps, Rational>> slice;
    std::vector<std::int64_t> sval(2, kInf);
    R.for_each([&](const Exps& e, const Rational& c) {
      if (e[2] != 2 * g) return;
      Exps x{e[0], e[1]};
      slice.push_back({x, c});
      for (int h = 0; h < 2; ++h) sval[h] = std::min(sval[h], jf->weigh(h, x));
    });
    if (!R.is_known({0, 0, 2 * g})) throw WindowOverflow("lambda order too small");
    out.push_back({MultiSeries::from_terms(jf, slice, {Np, kInf}, sval), 2 * g - 2, 1, JacobiKind::weak, 0});
  }
  return out;
}

JacobiSeries psi_formula(int g, int N, int L) {
  if (g < 0) throw DomainError("genus must be nonnegative");
  JacobiSeries T = theta_sq(N, L + 1);
  MultiSeries s;
  if (g == 0) {
    s = T.series;
  } else if (g == 1) {
    s = T.series * weierstrass_p(N, L + 1).series;
  } else {
    Rational c = abs(bernoulli(2 * g)) / (2 * g * factorial(2 * g - 2));
    s = T.series * lift_q(eisenstein(2 * g, N), T.series.frame_ptr()) * c;
  }
  FramePtr jf = jacobi_frame(N, L);
  std::vector<std::pair<Exps, Rational>> terms = s.terms();
  std::vector<std::int64_t> cut{std::min<std::int64_t>(s.cutoffs()[0], N), std::min<std::int64_t>(s.cutoffs()[1], N + L)};
  std::vector<std::int64_t> val = s.vals();
  return {MultiSeries::from_terms(jf, terms, cut, val), 2 * g - 2, 1, JacobiKind::weak, 0};
}

std::vector<Rational> profile_lambda(const EllGenTable& table, int D, int order) {
  const int kmax = table.k_max.at(D);
  auto lo = table.k_min(D);
  if (!lo) return std::vector<Rational>(order + 1, 0);
  // P(k) = c(k-1) - 2c(k) + c(k+1): symmetric, supported on |k| <= -k_lo + 1
  const int top = 1 - *lo;
  if (top + 1 > kmax) throw WindowOverflow("t-window too small for the profile of D=" + std::to_string(D));
  auto c = [&](int k) { return table.at(D, k); };
  std::map<int, Rational> P;
  for (int k = *lo - 1; k + 1 <= kmax; ++k) {
    Rational v = c(k - 1) - 2 * c(k) + c(k + 1);
    if (sgn(v) == 0) continue;
    if (std::abs(k) > top) throw JacobiCheckError("profile of D=" + std::to_string(D) + " is not a Laurent polynomial");
    P[k] = v;
  }
  for (const auto& [k, v] : P)
    if (!P.count(-k) || P.at(-k) != v) throw NonRealSubstitution();
  std::vector<Rational> num(order + 1, 0);
  for (int j = 0; j <= order; j += 2) {
    Rational s = 0;
    for (const auto& [k, v] : P) {
      Integer kj;
      mpz_pow_ui(kj.get_mpz_t(), Integer(k).get_mpz_t(), j);
      s += v * kj;
    }
    num[j] = ((j / 2) % 2 ? -s : s) / factorial(j);
  }
  auto r = series_mul(num, series_inv(cos_unit(order)));
  for (auto& x : r) x = -x;
  return r;
}

Rational equivariant_chi_y_c2(const Rational& y, const Rational& t1, const Rational& t2) {
  if (t1 == 1 || t2 == 1) throw DomainError("pole of the equivariant chi_y genus");
  return (1 + y * t1) * (1 + y * t2) / ((1 - t1) * (1 - t2));
}

Rational chi_y_p2_fixed_points(const Rational& y, const Rational& t1, const Rational& t2) {
  auto term = [&](const Rational& a, const Rational& b) -> Rational {
    if (a == 1 || b == 1) throw DomainError("degenerate torus weights");
    return (1 + y * a) / (1 - a) * (1 + y * b) / (1 - b);
  };
  Rational i1 = 1 / t1, i2 = 1 / t2;
  return term(t1, t2) + term(i1, i1 * t2) + term(i2, t1 * i2);
}

std::vector<Rational> chi_y_p2_localization(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> num(-50, 50), den(1, 30);
  auto weight = [&]() -> Rational {
    while (true) {
      Rational r(num(rng), den(rng));
      r.canonicalize();
      if (r != 0 && r != 1 && r != -1) return r;
    }
  };
  auto sample = [&](Rational& t1, Rational& t2) {
    do {
      t1 = weight();
      t2 = weight();
    } while (t1 == t2 || t1 * t2 == 1 || t1 == t2 * t2 || t2 == t1 * t1);
  };
  Rational t1, t2;
  sample(t1, t2);
  // degree <= 2 in y: interpolate at y = 0, 1, 2
  Rational v0 = chi_y_p2_fixed_points(0, t1, t2), v1 = chi_y_p2_fixed_points(1, t1, t2),
           v2 = chi_y_p2_fixed_points(2, t1, t2);
  Rational c2 = (v2 - 2 * v1 + v0) / 2, c1 = v1 - v0 - c2, c0 = v0;
  std::vector<Rational> poly{c0, c1, c2};
  // the result must not depend on the weights or exceed degree 2
  Rational s1, s2;
  sample(s1, s2);
  for (int y = -2; y <= 3; ++y) {
    Rational expect = c0 + c1 * y + c2 * y * y;
    if (chi_y_p2_fixed_points(y, s1, s2) != expect || chi_y_p2_fixed_points(y, t1, t2) != expect)
      throw JacobiCheckError("fixed-point sum depends on the torus weights");
  }
  return poly;
}

}  // namespace ban
