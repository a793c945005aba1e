#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "banana/series.hpp"

using namespace ban;

namespace {

FramePtr qframe(int N) { return make_frame({{"q", 1}}, {{1}}, {N}); }

// (q, y) with gradings q <= N and y + q <= L.
FramePtr qyframe(int N, int L) { return make_frame({{"q", 1}, {"y", 1}}, {{1, 0}, {1, 1}}, {N, L}); }

FramePtr yframe(int L) { return make_frame({{"y", 1}}, {{1}}, {L}); }

MultiSeries poly(FramePtr f, std::vector<std::pair<Exps, Rational>> t) {
  return MultiSeries::polynomial(std::move(f), t);
}

MultiSeries random_poly(std::mt19937& rng, FramePtr f, int nterms, int qmax, int lmax, bool unit) {
  std::uniform_int_distribution<int> qd(0, qmax), ld(-lmax, lmax), cd(-9, 9), dd(1, 4);
  std::vector<std::pair<Exps, Rational>> t;
  if (unit) t.push_back({{0, 0}, Rational(cd(rng) == 0 ? 1 : 3, dd(rng))});
  for (int i = 0; i < nterms; ++i) {
    int n = qd(rng), l = ld(rng);
    if (unit) {
      if (l + n < 0) l = -n;
      if (n == 0 && l <= 0) l = 1;
    }
    t.push_back({{n, l}, Rational(cd(rng), dd(rng))});
  }
  return poly(f, t);
}

// Forget knowledge beyond the given cutoffs (valid because vals are global minima).
MultiSeries forget(const MultiSeries& a, std::vector<std::int64_t> cut) {
  return MultiSeries::from_terms(a.frame_ptr(), a.terms(), cut, a.vals());
}

void require_equal_known(const MultiSeries& approx, const MultiSeries& exact) {
  auto m = compare_shared(approx, exact);
  if (m) FAIL(m->describe(approx.frame()));
  // every known coefficient of `approx` is a coefficient of `exact`
  for (const auto& [e, c] : exact.terms())
    if (approx.is_known(e)) CHECK(approx.coefficient(e) == c);
}

}  // namespace

TEST_CASE("add") {
  auto f = qframe(6);
  auto a = poly(f, {{{0}, 1}, {{1}, 1}});
  auto b = poly(f, {{{0}, 1}, {{1}, -1}});
  auto s = a + b;
  CHECK(s.size() == 1);
  CHECK(s.coefficient({0}) == 2);
  CHECK(s.coefficient({1}) == 0);
  CHECK((a - a).size() == 0);
  CHECK((a + MultiSeries(f)).terms() == a.terms());
  CHECK_THROWS_AS(a + MultiSeries::constant(qyframe(2, 2), 1), IncompatibleVariables);
}

TEST_CASE("mul") {
  auto f = qframe(8);
  auto a = poly(f, {{{0}, 1}, {{1}, 1}});
  auto b = poly(f, {{{0}, 1}, {{1}, -1}});
  auto p = a * b;
  CHECK(p.coefficient({0}) == 1);
  CHECK(p.coefficient({1}) == 0);
  CHECK(p.coefficient({2}) == -1);
  CHECK(p.exact());

  auto geo = MultiSeries::one_minus_power(f, {1}, -1);
  auto one = geo * b;
  for (int n = 0; n <= 8; ++n) CHECK(one.coefficient({n}) == (n == 0 ? 1 : 0));
  CHECK_THROWS_AS(one.coefficient({9}), UnknownCoefficient);

  auto g = qyframe(10, 10);
  auto m = MultiSeries::monomial(g, {1, -1}) * MultiSeries::monomial(g, {2, 3});
  CHECK(m.size() == 1);
  CHECK(m.coefficient({3, 2}) == 1);
}

TEST_CASE("zeta(3) token") {
  auto f = qframe(4);
  auto z = MultiSeries::constant(f, 0).with_zeta3(-12);
  CHECK((z + z).zeta3() == -24);
  CHECK((z * MultiSeries::constant(f, Rational(1, 2))).zeta3() == -6);
  CHECK_THROWS_AS(z * z, DomainError);
  CHECK_THROWS_AS(z * MultiSeries::monomial(f, {1}), DomainError);
  CHECK_THROWS_AS(z * MultiSeries::one_minus_power(f, {1}, -1), DomainError);
}

TEST_CASE("coefficient") {
  auto f = qframe(5);
  auto a = poly(f, {{{0}, 1}, {{2}, -1}});
  CHECK(a.coefficient({2}) == -1);
  CHECK(a.coefficient({3}) == 0);
  auto t = a.truncate({2});
  CHECK(t.coefficient({2}) == -1);
  CHECK_THROWS_AS(t.coefficient({3}), UnknownCoefficient);
}

TEST_CASE("invert_unit") {
  auto f = qframe(10);
  auto inv = invert_unit(poly(f, {{{0}, 1}, {{1}, -1}}));
  for (int n = 0; n <= 10; ++n) CHECK(inv.coefficient({n}) == 1);
  CHECK_THROWS_AS(inv.coefficient({11}), UnknownCoefficient);

  auto y = yframe(12);
  auto sq = poly(y, {{{0}, 1}, {{1}, -2}, {{2}, 1}});
  auto r = invert_unit(sq);
  for (int j = 0; j <= 12; ++j) CHECK(r.coefficient({j}) == j + 1);

  // y - 2 + 1/y = (1-y)^2 / y, so its inverse is y * sum (j+1) y^j.
  auto d = poly(y, {{{1}, 1}, {{0}, -2}, {{-1}, 1}});
  auto di = invert_unit(d);
  CHECK(di.coefficient({0}) == 0);
  for (int j = 1; j <= 12; ++j) CHECK(di.coefficient({j}) == j);
  auto prod = d * di;
  for (int j = -3; j <= 11; ++j) CHECK(prod.coefficient({j}) == (j == 0 ? 1 : 0));

  // y + 1/y: lex-min y^-1, remainder 1 + y^2 is a unit in |y| < 1.
  auto yy = invert_unit(poly(y, {{{1}, 1}, {{-1}, 1}}));
  CHECK(yy.coefficient({1}) == 1);
  CHECK(yy.coefficient({3}) == -1);

  // The lex-min monomial y^-1 t is not minimal in the t grading.
  auto yt = make_frame({{"y", 1}, {"t", 1}}, {{1, 0}, {0, 1}}, {5, 5});
  CHECK_THROWS_AS(invert_unit(poly(yt, {{{1, -1}, 1}, {{-1, 1}, 1}})), NotInvertible);
  // A remainder of degree zero in every grading cannot be expanded.
  auto two = make_frame({{"y", 1}, {"t", 1}}, {{1, 1}}, {5});
  CHECK_THROWS_AS(invert_unit(poly(two, {{{0, 0}, 1}, {{1, -1}, 1}})), NotInvertible);
}

TEST_CASE("exp and log") {
  auto f = qframe(12);
  auto one = exp_series(MultiSeries(f));
  CHECK(one.size() == 1);
  CHECK(one.coefficient({0}) == 1);

  auto lg = log_series(poly(f, {{{0}, 1}, {{1}, -1}}));
  for (int n = 1; n <= 12; ++n) CHECK(lg.coefficient({n}) == Rational(-1, n));

  std::vector<std::pair<Exps, Rational>> t;
  for (int n = 1; n <= 12; ++n) t.push_back({{n}, Rational(1, n)});
  auto e = exp_series(MultiSeries::from_terms(f, t, {12}, {1}));
  auto geo = invert_unit(poly(f, {{{0}, 1}, {{1}, -1}}));
  CHECK_FALSE(compare_box(e, geo, {{0, 12}}));

  CHECK_THROWS_AS(exp_series(MultiSeries::constant(f, 1)), DomainError);
  CHECK_THROWS_AS(log_series(MultiSeries::constant(f, 2)), DomainError);
  CHECK_THROWS_AS(exp_series(MultiSeries(f).with_zeta3(1)), DomainError);
}

TEST_CASE("substitute_monomial") {
  auto dt = make_frame({{"Q1", 1}, {"Q2", 1}, {"Q3", 1}}, {{1, 1, 1}}, {10});
  std::vector<VarSpec> tv{{"Q", 1}, {"q", 1}, {"y", 1}};
  // Q1 -> Q/y, Q2 -> q/y, Q3 -> y
  std::vector<Exps> fwd{{1, 0, -1}, {0, 1, -1}, {0, 0, 1}};
  auto a = MultiSeries::monomial(dt, {1, 1, 3});
  auto b = substitute_monomial(a, tv, fwd);
  CHECK(b.size() == 1);
  CHECK(b.coefficient({1, 1, 1}) == 1);

  // Q -> Q1 Q3, q -> Q2 Q3, y -> Q3 inverts it.
  std::vector<Exps> back{{1, 0, 1}, {0, 1, 1}, {0, 0, 1}};
  std::vector<VarSpec> sv{{"Q1", 1}, {"Q2", 1}, {"Q3", 1}};
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(0, 4);
  std::vector<std::pair<Exps, Rational>> t;
  for (int i = 0; i < 30; ++i) t.push_back({{d(rng), d(rng), d(rng)}, d(rng) + 1});
  auto r = MultiSeries::polynomial(dt, t);
  auto rr = substitute_monomial(substitute_monomial(r, tv, fwd), sv, back);
  CHECK(rr.terms() == r.terms());

  std::vector<Exps> id{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK(substitute_monomial(r, sv, id).terms() == r.terms());

  // Truncated series: substitution commutes with multiplication, regions transported.
  auto x = forget(r, {6});
  auto y = forget(MultiSeries::polynomial(dt, {{{0, 0, 0}, 1}, {{1, 0, 2}, -2}, {{0, 1, 1}, 3}}), {5});
  auto lhs = substitute_monomial(x * y, tv, fwd);
  auto rhs = substitute_monomial(x, tv, fwd) * substitute_monomial(y, tv, fwd);
  CHECK(lhs.cutoffs() == rhs.cutoffs());
  CHECK_FALSE(compare_shared(lhs, rhs));

  CHECK_THROWS_AS(substitute_monomial(r, tv, {{1, 0, 0}, {1, 0, 0}, {0, 0, 1}}), DomainError);
}

TEST_CASE("substitute_exponential") {
  auto y = make_frame({{"y", 1}}, {}, {});
  auto d = poly(y, {{{1}, 1}, {{0}, -2}, {{-1}, 1}});
  auto s = substitute_exponential(d, "y", "lam", 8);
  CHECK(s.frame().vars[0].name == "lam");
  CHECK(s.coefficient({0}) == 0);
  CHECK(s.coefficient({2}) == -1);
  CHECK(s.coefficient({4}) == Rational(1, 12));
  CHECK(s.coefficient({6}) == Rational(-1, 360));
  CHECK(s.coefficient({8}) == Rational(1, 20160));
  CHECK_THROWS_AS(s.coefficient({9}), UnknownCoefficient);

  auto t = make_frame({{"t", 1}}, {}, {});
  auto c = substitute_exponential(poly(t, {{{1}, 1}, {{-1}, 1}}), "t", "lam", 6);
  CHECK(c.coefficient({0}) == 2);
  CHECK(c.coefficient({2}) == -1);
  CHECK(c.coefficient({4}) == Rational(1, 12));

  auto one = substitute_exponential(MultiSeries::constant(t, 1), "t", "lam", 6);
  CHECK(one.size() == 1);
  CHECK(one.coefficient({0}) == 1);

  CHECK_THROWS_AS(substitute_exponential(poly(t, {{{1}, 1}}), "t", "lam", 4), NonRealSubstitution);
  auto tr = make_frame({{"t", 1}}, {{1}}, {3});
  CHECK_THROWS_AS(substitute_exponential(MultiSeries::one_minus_power(tr, {1}, -1), "t", "lam", 4),
                  WindowOverflow);
}

TEST_CASE("embed") {
  auto q = qframe(5);
  auto qy = qyframe(5, 7);
  auto e4ish = MultiSeries::one_minus_power(q, {1}, -2);
  auto e = embed(e4ish, qy);
  CHECK(e.cutoffs()[0] == 5);
  CHECK(e.cutoffs()[1] >= kInf);
  CHECK(e.coefficient({3, 0}) == 4);
  CHECK(e.coefficient({3, 6}) == 0);
  auto half = make_frame({{"q", 8}, {"y", 2}}, {{1, 0}, {1, 4}}, {40, 56});
  auto h = embed(e4ish, half);
  CHECK(h.coefficient({24, 0}) == 4);
  CHECK_THROWS_AS(h.coefficient({48, 0}), UnknownCoefficient);
}

TEST_CASE("specialize_one") {
  auto f = make_frame({{"q", 1}, {"y", 1}}, {{1, 0}}, {3});
  auto a = poly(f, {{{0, -1}, 1}, {{0, 0}, -2}, {{0, 1}, 1}, {{1, 2}, 5}});
  auto s = specialize_one(a, "y");
  CHECK(s.coefficient({0}) == 0);
  CHECK(s.coefficient({1}) == 5);
}

TEST_CASE("property: ring axioms and truncation soundness") {
  std::mt19937 rng(12345);
  auto f = qyframe(8, 10);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_poly(rng, f, 20, 5, 4, false);
    auto b = random_poly(rng, f, 20, 5, 4, false);
    auto c = random_poly(rng, f, 10, 5, 4, false);
    CHECK((a * b).terms() == (b * a).terms());
    CHECK(((a * b) * c).terms() == (a * (b * c)).terms());
    CHECK((a * (b + c)).terms() == (a * b + a * c).terms());

    auto ta = forget(a, {4, 5}), tb = forget(b, {6, 4}), tc = forget(c, {3, 7});
    auto tab = ta * tb;
    require_equal_known(tab, a * b);
    require_equal_known((ta * tb) * tc, a * b * c);
    require_equal_known(ta * (tb + tc), a * (b + c));
    CHECK_FALSE(compare_shared((ta * tb) * tc, ta * (tb * tc)));
  }
}

TEST_CASE("property: inversion and exp/log") {
  std::mt19937 rng(99);
  auto f = qyframe(6, 8);
  for (int trial = 0; trial < 15; ++trial) {
    auto u = random_poly(rng, f, 12, 4, 3, true);
    auto inv = invert_unit(u);
    auto one = u * inv;
    for (const auto& [e, c] : one.terms()) CHECK(c == ((e[0] == 0 && e[1] == 0) ? 1 : 0));
    CHECK(one.is_known({6, 2}));

    auto shifted = shift(u, {1, -1});
    auto sinv = invert_unit(shifted);
    require_equal_known(shift(inv, {-1, 1}), sinv);

    auto g = u - MultiSeries::constant(f, u.coefficient({0, 0}));
    auto eg = exp_series(g);
    auto back = log_series(eg);
    require_equal_known(back, g);
    auto unit = u * MultiSeries::constant(f, 1 / u.coefficient({0, 0}));
    require_equal_known(exp_series(log_series(unit)), unit);
  }
}

TEST_CASE("serialization round trip") {
  std::mt19937 rng(5);
  auto f = make_frame({{"q", 8}, {"y", 2}, {"t", 2}}, {{1, 0, 0}, {1, 0, 4}}, {16, 20});
  std::uniform_int_distribution<int> d(-6, 6), c(-100000, 100000);
  std::vector<std::pair<Exps, Rational>> t;
  for (int i = 0; i < 40; ++i) {
    Exps e{std::abs(d(rng)), d(rng), d(rng)};
    t.push_back({e, Rational(c(rng), 7 + std::abs(d(rng)))});
  }
  auto s = MultiSeries::from_terms(f, t, {12, 18}, {0, -30}).with_zeta3(Rational(-12));
  const std::string text = to_json(s);
  auto back = from_json(text);
  CHECK(to_json(back) == text);
  CHECK(back.terms() == s.terms());
  CHECK(back.cutoffs() == s.cutoffs());
  CHECK(back.zeta3() == -12);
  CHECK(text.find("\"exponent_denominator\": 8") != std::string::npos);
}
