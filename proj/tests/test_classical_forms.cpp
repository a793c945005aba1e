#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "banana/classical.hpp"

using namespace ban;

namespace {

Rational c(const MultiSeries& s, int n) { return s.coefficient({n}); }

}  // namespace

TEST_CASE("bernoulli numbers") {
  CHECK(bernoulli(0) == 1);
  CHECK(bernoulli(1) == Rational(-1, 2));
  CHECK(bernoulli(2) == Rational(1, 6));
  CHECK(bernoulli(4) == Rational(-1, 30));
  CHECK(bernoulli(6) == Rational(1, 42));
  CHECK(bernoulli(12) == Rational(-691, 2730));
  for (int n = 3; n < 30; n += 2) CHECK(bernoulli(n) == 0);
  // |B_2g| = (-1)^{g-1} B_2g
  for (int g = 1; g < 10; ++g) CHECK(sgn(bernoulli(2 * g)) == (g % 2 ? 1 : -1));
}

TEST_CASE("eisenstein leading coefficients") {
  CHECK(c(eisenstein(4, 3).series, 1) == 240);
  CHECK(c(eisenstein(6, 3).series, 1) == -504);
  CHECK(c(eisenstein(2, 3).series, 1) == -24);
  CHECK(c(eisenstein(4, 3).series, 0) == 1);
  CHECK(c(eisenstein(4, 3).series, 2) == 240 * 9);
  CHECK_THROWS_AS(eisenstein(3, 3), DomainError);
  CHECK_THROWS_AS(eisenstein(0, 3), DomainError);
}

TEST_CASE("delta and eisenstein identities") {
  const int N = 30;
  auto D = delta(N).series;
  CHECK(D.cutoffs()[0] == N);
  CHECK(c(D, 0) == 0);
  CHECK(c(D, 1) == 1);
  CHECK(c(D, 2) == -24);
  CHECK(c(D, 3) == 252);
  CHECK(c(D, 11) == 534612);  // tau(11)
  auto E4 = eisenstein(4, N).series, E6 = eisenstein(6, N).series;
  auto rhs = (E4 * E4 * E4 - E6 * E6) * Rational(1, 1728);
  CHECK_FALSE(compare_box(D, rhs, {{0, N}}));

  const int M = 20;
  auto e = [&](int k) { return eisenstein(k, M).series; };
  CHECK_FALSE(compare_box(e(8), e(4) * e(4), {{0, M}}));
  CHECK_FALSE(compare_box(e(10), e(4) * e(6), {{0, M}}));
  CHECK_FALSE(compare_box(e(14), e(8) * e(6), {{0, M}}));
  CHECK(compare_box(e(12), e(6) * e(6), {{0, M}}));  // not an identity: cusp form space is nonzero
}

TEST_CASE("inverse discriminant and 24-colored partitions") {
  const int N = 13;
  auto inv = invert_unit(delta(N).series);
  // q / Delta = prod (1-q^n)^{-24}
  auto lhs = shift(inv, {1});
  FramePtr f = q_frame(N);
  MultiSeries prod = MultiSeries::constant(f, 1);
  for (int n = 1; n <= 10; ++n) prod *= MultiSeries::one_minus_power(f, {n}, -24);
  // Independent route: n p(n) = 24 sum_k sigma_1(k) p(n-k).
  std::vector<Rational> p{1};
  for (int n = 1; n <= 10; ++n) {
    Rational s = 0;
    for (int k = 1; k <= n; ++k) s += 24 * divisor_sigma(1, k) * p[n - k];
    p.push_back(s / n);
  }
  CHECK(p[1] == 24);
  CHECK(p[2] == 324);
  for (int n = 0; n <= 10; ++n) {
    CHECK(c(lhs, n) == p[n]);
    CHECK(c(prod, n) == p[n]);
  }
  CHECK(c(inv, -1) == 1);
}

TEST_CASE("macmahon") {
  auto M = macmahon(8).series;
  CHECK(c(M, 0) == 1);
  CHECK(c(M, 1) == 1);
  CHECK(c(M, 2) == 3);
  CHECK(c(M, 3) == 6);
  CHECK(c(M, 8) == 160);  // plane partitions of 8
  CHECK(M.cutoffs()[0] == 8);
}

TEST_CASE("polylogarithms") {
  FramePtr f = q_frame(4);
  auto li = polylog_monomial(f, -1, {1});
  for (int n = 1; n <= 4; ++n) CHECK(c(li, n) == n);
  CHECK(c(li, 0) == 0);
  auto l1 = polylog_monomial(f, 1, {1});
  auto lg = log_series(MultiSeries::one_minus_power(f, {1}, 1));
  CHECK_FALSE(compare_box(l1, -lg, {{0, 4}}));
  auto l3 = polylog_monomial(f, 3, {2});
  CHECK(c(l3, 4) == Rational(1, 8));
  CHECK_THROWS_AS(polylog_monomial(f, 1, {0}), DomainError);

  // sum_n Li_{1-k}(q^n) = sum sigma_{k-1}(n) q^n, and E_k via polylogs
  const int N = 15;
  FramePtr g = q_frame(N);
  for (int k : {2, 4, 6, 8}) {
    MultiSeries s(g);
    s = s.truncate({N});
    for (int n = 1; n <= N; ++n) s += polylog_monomial(g, 1 - k, {n});
    for (int n = 1; n <= N; ++n) CHECK(c(s, n) == Rational(divisor_sigma(k - 1, n)));
    auto Ek = MultiSeries::constant(g, 1) + s * (Rational(-2 * k) / bernoulli(k));
    CHECK_FALSE(compare_box(Ek, eisenstein(k, N).series, {{0, N}}));
  }
}
