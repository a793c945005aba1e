#include "banana/classical.hpp"

#include <mutex>

namespace ban {

Rational bernoulli(int n) {
  if (n < 0) throw DomainError("bernoulli index must be nonnegative");
  static std::mutex mu;
  static std::vector<Rational> cache{Rational(1)};
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(cache.size()) <= n) {
    const int m = static_cast<int>(cache.size());
    Rational s = 0;
    Integer binom = 1;  // C(m+1, j)
    for (int j = 0; j < m; ++j) {
      s += binom * cache[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    Rational b = -s / (m + 1);
    b.canonicalize();
    cache.push_back(b);
  }
  return cache[n];
}

Integer divisor_sigma(int k, long n) {
  if (n <= 0) throw DomainError("divisor sum of a nonpositive integer");
  Integer s = 0, p;
  for (long d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    mpz_ui_pow_ui(p.get_mpz_t(), d, k);
    s += p;
    if (d * d != n) {
      mpz_ui_pow_ui(p.get_mpz_t(), n / d, k);
      s += p;
    }
  }
  return s;
}

FramePtr q_frame(int N) {
  if (N < 0) throw DomainError("negative q-order");
  return make_frame({{"q", 1}}, {{1}}, {N});
}

ModularQSeries eisenstein(int k, int N) {
  if (k < 2 || k % 2) throw DomainError("Eisenstein weight must be even and at least 2");
  FramePtr f = q_frame(N);
  Rational c = Rational(-2 * k) / bernoulli(k);
  std::vector<std::pair<Exps, Rational>> terms{{{0}, 1}};
  for (int n = 1; n <= N; ++n) terms.push_back({{n}, c * divisor_sigma(k - 1, n)});
  return {MultiSeries::from_terms(f, terms, {N}, {0}), k};
}

namespace {

// prod_{n=1}^{W} (1 - q^n)^e known to q^W
MultiSeries euler_product(FramePtr f, int W, int e) {
  MultiSeries p = MultiSeries::constant(f, 1);
  for (int n = 1; n <= W; ++n) p = (p * MultiSeries::one_minus_power(f, {n}, e)).truncate({W});
  return p;
}

}  // namespace

ModularQSeries delta(int N) {
  if (N < 1) throw DomainError("delta needs q-order at least 1");
  FramePtr f = q_frame(N);
  return {shift(euler_product(f, N - 1, 24), {1}), 12};
}

ModularQSeries macmahon(int N) {
  if (N < 0) throw DomainError("negative q-order");
  FramePtr f = q_frame(N);
  return {macmahon_in(f, {1}), 0};
}

MultiSeries macmahon_in(FramePtr f, const Exps& m) {
  MultiSeries p = MultiSeries::constant(f, 1);
  for (long n = 1;; ++n) {
    Exps mn(m.size());
    for (std::size_t v = 0; v < m.size(); ++v) mn[v] = static_cast<int>(m[v] * n);
    // Stop once m^n lies outside the window of every factor built so far.
    MultiSeries fac = MultiSeries::one_minus_power(f, mn, -n);
    if (fac.size() <= 1) break;
    p *= fac;
  }
  return p;
}

MultiSeries polylog_monomial(FramePtr f, int a, const Exps& m,
                             std::optional<std::vector<std::int64_t>> cutoffs) {
  if (a > 1 && a != 3) throw DomainError("polylog order out of scope");
  auto coeff = [a](long r) -> Rational {
    Integer p;
    if (a <= 0) {
      mpz_ui_pow_ui(p.get_mpz_t(), r, -a);
      return Rational(p);
    }
    mpz_ui_pow_ui(p.get_mpz_t(), r, a);
    return Rational(Integer(1), p);
  };
  return MultiSeries::monomial_series(std::move(f), m, coeff, 1, std::move(cutoffs));
}

}  // namespace ban
