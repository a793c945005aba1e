#include "banana/jacobi.hpp"

#include <sstream>

namespace ban {

namespace {

void check_windows(int N, int L) {
  if (N < 0 || L < 0) throw DomainError("negative window");
}

// Terms given exactly on the q-window; lower bounds read off the stored support.
MultiSeries from_q_window(FramePtr f, const std::map<Exps, Rational>& terms, std::int64_t qcut) {
  std::vector<std::pair<Exps, Rational>> v(terms.begin(), terms.end());
  const int G = f->ngrad();
  std::vector<std::int64_t> cut(G, kInf), val(G, kInf);
  cut[0] = qcut;
  for (const auto& [e, c] : v)
    for (int g = 0; g < G; ++g) val[g] = std::min(val[g], f->weigh(g, e));
  return MultiSeries::from_terms(f, v, cut, val);
}

std::vector<std::int64_t> q_only(const Frame& f, std::int64_t W) {
  std::vector<std::int64_t> cut(f.ngrad(), kInf);
  cut[0] = W;
  return cut;
}

}  // namespace

FramePtr jacobi_frame(int N, int L) {
  check_windows(N, L);
  return make_frame({{"q", 1}, {"y", 1}}, {{1, 0}, {1, 1}}, {N, N + L});
}

FramePtr theta_frame(int N) {
  check_windows(N, 0);
  return make_frame({{"q", 8}, {"y", 2}}, {{1, 0}, {1, 4}}, {8 * N, kInf});
}

MultiSeries to_integral(const MultiSeries& a, FramePtr target) {
  const Frame& f = a.frame();
  std::vector<VarSpec> vars;
  std::vector<Exps> images;
  for (int v = 0; v < f.nvars(); ++v) {
    vars.push_back({f.vars[v].name, 1});
    Exps e(f.nvars(), 0);
    e[v] = 1;
    images.push_back(e);
  }
  return embed(substitute_monomial(a, vars, images), std::move(target));
}

MultiSeries theta_sum(int i, int N, bool at_zero) {
  if (i < 1 || i > 4) throw DomainError("theta index must be 1..4");
  FramePtr f = theta_frame(N);
  std::map<Exps, Rational> terms;
  if (i <= 2) {
    // r = s/2 with s odd: q^{r^2/2} y^r
    for (int s = -1; s * s <= 8 * N; s -= 2)
      for (int sg : {s, -s}) {
        Rational c = i == 2 ? 1 : (((sg - 1) / 2) % 2 == 0 ? 1 : -1);
        terms[{sg * sg, at_zero ? 0 : sg}] += c;
      }
  } else {
    for (int n = 0; 4 * n * n <= 8 * N; ++n)
      for (int m : n ? std::vector<int>{n, -n} : std::vector<int>{0}) {
        Rational c = (i == 4 && n % 2) ? -1 : 1;
        terms[{4 * m * m, at_zero ? 0 : 2 * m}] += c;
      }
  }
  std::erase_if(terms, [](const auto& t) { return sgn(t.second) == 0; });
  return from_q_window(f, terms, 8 * N);
}

JacobiSeries theta1(int N, int L) {
  check_windows(N, L);
  FramePtr f = theta_frame(N);
  auto cut = q_only(*f, 8 * N);
  MultiSeries p = MultiSeries::polynomial(f, {{{0, 1}, 1}, {{0, -1}, -1}});
  for (int n = 1; 8 * n <= 8 * N; ++n) {
    p *= MultiSeries::one_minus_power(f, {8 * n, 0}, 1);
    p *= MultiSeries::one_minus_power(f, {8 * n, 2}, 1);
    p *= MultiSeries::one_minus_power(f, {8 * n, -2}, 1);
    p = p.truncate(cut);
  }
  p = shift(p.truncate(cut), {1, 0}).truncate(cut);
  return {p, 1, Rational(1, 2), JacobiKind::holomorphic, 1};
}

JacobiSeries theta1_sum(int N, int L) {
  check_windows(N, L);
  return {theta_sum(1, N, false), 1, Rational(1, 2), JacobiKind::holomorphic, 1};
}

JacobiSeries theta_sq(int N, int L) {
  FramePtr f = jacobi_frame(N, L);
  auto cut = q_only(*f, N);
  MultiSeries p = MultiSeries::polynomial(f, {{{0, -1}, 1}, {{0, 0}, -2}, {{0, 1}, 1}});
  for (int n = 1; n <= N; ++n) {
    p *= MultiSeries::one_minus_power(f, {n, 1}, 2);
    p *= MultiSeries::one_minus_power(f, {n, -1}, 2);
    p = (p * MultiSeries::one_minus_power(f, {n, 0}, -4)).truncate(cut);
  }
  return {p.truncate(cut), -2, 1, JacobiKind::weak, 0};
}

JacobiSeries phi_0_1(int N, int L) {
  FramePtr target = jacobi_frame(N, L);
  MultiSeries s;
  for (int i = 2; i <= 4; ++i) {
    MultiSeries z = theta_sum(i, N + 1, false), o = theta_sum(i, N + 1, true);
    MultiSeries term = z * z * invert_unit(o * o);
    s = s.valid() ? s + term : term;
  }
  s = s.truncate(q_only(s.frame(), 8 * N)) * Rational(4);
  return {to_integral(s, target), 0, 1, JacobiKind::weak, 0};
}

JacobiSeries weierstrass_p(int N, int L) {
  FramePtr f = jacobi_frame(N, L);
  // y/(1-y)^2 expanded in |y| < 1
  MultiSeries p = MultiSeries::monomial_series(f, {0, 1}, [](long j) -> Rational { return j; }, 1);
  std::map<Exps, Rational> rest{{{0, 0}, Rational(1, 12)}};
  for (int k = 1; k <= N; ++k)
    for (int r = 1; r * k <= N; ++r) {
      rest[{r * k, k}] += k;
      rest[{r * k, 0}] -= 2 * k;
      rest[{r * k, -k}] += k;
    }
  p += MultiSeries::from_terms(f, {rest.begin(), rest.end()}, q_only(*f, N), {0, 0});
  return {p, 2, 0, JacobiKind::meromorphic, 0};
}

JacobiSeries wp_derivative(int r, int N, int L) {
  if (r < 0 || r % 2) throw DomainError("derivative order must be even and nonnegative");
  JacobiSeries p = weierstrass_p(N, L);
  p.series = euler_derivative(p.series, "y", r);
  p.weight += r;
  return p;
}

TriPoly wp_poly(int g) {
  if (g < 2) throw DomainError("wp_poly needs g >= 2");
  // Polynomials in (p, E4, E6) with p the Weierstrass function; D = y d/dy obeys
  // (Dp)^2 = 4p^3 - E4 p/12 + E6/216 and D^2 p = 6p^2 - E4/24.
  TriPoly f{{{1, 0, 0}, 1}};
  auto add = [](TriPoly& out, std::array<int, 3> e, const Rational& c) {
    Rational& x = out[e];
    x += c;
    if (sgn(x) == 0) out.erase(e);
  };
  for (int step = 2; step < g; ++step) {
    TriPoly h;
    for (const auto& [e, c] : f) {
      const int a = e[0];
      if (a >= 2) {
        Rational c2 = c * a * (a - 1);
        add(h, {a + 1, e[1], e[2]}, c2 * 4);
        add(h, {a - 1, e[1] + 1, e[2]}, -c2 / 12);
        add(h, {a - 2, e[1], e[2] + 1}, c2 / 216);
      }
      if (a >= 1) {
        Rational c1 = c * a;
        add(h, {a + 1, e[1], e[2]}, c1 * 6);
        add(h, {a - 1, e[1] + 1, e[2]}, -c1 / 24);
      }
    }
    f = std::move(h);
  }
  TriPoly out;
  for (const auto& [e, c] : f) {
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), 12, e[0]);
    Rational x = c / p;
    x.canonicalize();
    out[e] = x;
  }
  return out;
}

std::string format_tripoly(const TriPoly& p) {
  std::ostringstream os;
  bool first = true;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    const auto& [e, c] = *it;
    os << (first ? "" : " + ") << "(" << c << ")";
    const char* names[] = {"X", "Y", "Z"};
    for (int i = 0; i < 3; ++i)
      if (e[i]) os << "*" << names[i] << (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
    first = false;
  }
  return first ? "0" : os.str();
}

MultiSeries eval_tripoly(const TriPoly& p, const MultiSeries& X, const MultiSeries& Y, const MultiSeries& Z) {
  MultiSeries s(X.frame_ptr());
  for (const auto& [e, c] : p) s += power(X, e[0]) * power(Y, e[1]) * power(Z, e[2]) * c;
  return s;
}

MultiSeries lift_q(const ModularQSeries& f, FramePtr target) { return embed(f.series, std::move(target)); }

namespace {

void require_support(const MultiSeries& s, bool strict, const char* what) {
  s.for_each([&](const Exps& e, const Rational&) {
    long D = 4L * e[0] - static_cast<long>(e[1]) * e[1];
    if (strict ? D <= 0 : D < 0) throw JacobiCheckError(std::string(what) + " violated at " + format_monomial(s.frame(), e));
  });
}

}  // namespace

JacobiSeries jacobi_cusp(int k, int N, int L) {
  if (k != 10 && k != 12) throw DomainError("cusp forms of index one have weight 10 or 12");
  JacobiSeries base = k == 10 ? theta_sq(N, L) : phi_0_1(N, L);
  MultiSeries s = lift_q(delta(N), base.series.frame_ptr()) * base.series;
  require_support(s, true, "cusp condition");
  return {s, k, 1, JacobiKind::cusp, 0};
}

JacobiSeries jacobi_eisenstein(int k, int N, int L) {
  if (k != 4 && k != 6) throw DomainError("Jacobi-Eisenstein series built for weight 4 or 6");
  JacobiSeries th = theta_sq(N, L), ph = phi_0_1(N, L);
  FramePtr f = th.series.frame_ptr();
  MultiSeries E4 = lift_q(eisenstein(4, N), f), E6 = lift_q(eisenstein(6, N), f);
  MultiSeries s = k == 4 ? E4 * ph.series - E6 * th.series : E6 * ph.series - E4 * E4 * th.series;
  s *= Rational(1, 12);
  require_support(s, false, "holomorphy");
  if (s.coefficient({0, 0}) != 1) throw JacobiCheckError("Jacobi-Eisenstein constant term is not 1");
  return {s, k, 1, JacobiKind::holomorphic, 0};
}

Rational Index1CoefficientFn::at(int D) const {
  if (D > D_max) throw UnknownCoefficient("c(" + std::to_string(D) + ") beyond computed range");
  auto it = values.find(D);
  return it == values.end() ? Rational(0) : it->second;
}

std::string Index1CoefficientFn::to_table() const {
  std::ostringstream os;
  os << "D,numerator,denominator\n";
  for (int D = -1; D <= D_max; ++D) {
    if (((D % 4) + 4) % 4 == 1 || ((D % 4) + 4) % 4 == 2) continue;
    Rational c = at(D);
    os << D << "," << c.get_num() << "," << c.get_den() << "\n";
  }
  return os.str();
}

Index1CoefficientFn index1_coefficients(const JacobiSeries& phi) {
  if (phi.index != 1) throw DomainError("index1_coefficients needs an index-one form");
  const MultiSeries& s = phi.series;
  if (s.frame().nvars() != 2 || s.frame().index("q") != 0 || s.frame().index("y") != 1 ||
      s.frame().vars[0].den != 1 || s.frame().vars[1].den != 1)
    throw IncompatibleVariables("index1_coefficients needs an integral (q, y) series");
  Index1CoefficientFn out;
  std::map<int, std::pair<Rational, Exps>> seen;
  s.for_each([&](const Exps& e, const Rational& c) {
    int D = 4 * e[0] - e[1] * e[1];
    if (D < -1 && phi.kind != JacobiKind::meromorphic)
      throw JacobiCheckError("weak index-one support violated at " + format_monomial(s.frame(), e));
    auto [it, fresh] = seen.try_emplace(D, c, e);
    if (!fresh && it->second.first != c)
      throw JacobiCheckError("c(" + std::to_string(D) + ") differs between " + format_monomial(s.frame(), it->second.second) +
                             " and " + format_monomial(s.frame(), e));
  });
  // Representatives that are stored as zero must agree too.
  for (const auto& [D, ce] : seen)
    for (int l = 0; l <= 64; ++l) {
      if ((D + l * l) % 4) continue;
      Exps e{(D + l * l) / 4, l};
      if (!s.is_known(e)) break;
      if (s.coefficient(e) != ce.first)
        throw JacobiCheckError("c(" + std::to_string(D) + ") differs at " + format_monomial(s.frame(), e));
    }
  int D = -1;
  while (true) {
    int m = ((D % 4) + 4) % 4;
    if (m == 0 || m == 3) {
      int l = m == 0 ? 0 : 1;
      if (!s.is_known({(D + l * l) / 4, l})) break;
    }
    ++D;
  }
  out.D_max = D - 1;
  for (const auto& [d, ce] : seen)
    if (d <= out.D_max) out.values[d] = ce.first;
  return out;
}

MultiSeries theta_sq_lambda(int N, int order) {
  return substitute_exponential(theta_sq(N, 0).series, "y", "lambda", order);
}

}  // namespace ban
