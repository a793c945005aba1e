#include "banana/series.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace ban {

namespace {

constexpr int kBits = 12;
constexpr std::uint64_t kMask = (std::uint64_t{1} << kBits) - 1;
constexpr int kBias = 2048;

std::uint64_t bias_key(int nv) {
  std::uint64_t k = 0;
  for (int i = 0; i < nv; ++i) k = (k << kBits) | kBias;
  return k;
}

std::uint64_t pack(const Exps& e) {
  std::uint64_t k = 0;
  for (int x : e) {
    if (x > kMaxExp || x < -kMaxExp)
      throw WindowOverflow("exponent " + std::to_string(x) + " outside representable range");
    k = (k << kBits) | static_cast<std::uint64_t>(x + kBias);
  }
  return k;
}

Exps unpack(std::uint64_t k, int nv) {
  Exps e(nv);
  for (int i = nv - 1; i >= 0; --i) {
    e[i] = static_cast<int>(k & kMask) - kBias;
    k >>= kBits;
  }
  return e;
}

bool in_range(const Exps& e) {
  for (int x : e)
    if (x > kMaxExp || x < -kMaxExp) return false;
  return true;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

void require_layout(const MultiSeries& a, const MultiSeries& b) {
  if (!a.valid() || !b.valid() || !a.frame().same_layout(b.frame())) throw IncompatibleVariables();
}

// Grading values of every stored term, flattened (term-major).
std::vector<std::int64_t> grading_table(const MultiSeries& a) {
  const Frame& f = a.frame();
  const int G = f.ngrad();
  std::vector<std::int64_t> out(a.size() * G);
  std::size_t t = 0;
  for (const auto& term : a.raw_terms()) {
    Exps e = a.exps_of(term.key);
    for (int g = 0; g < G; ++g) out[t * G + g] = f.weigh(g, e);
    ++t;
  }
  return out;
}

std::vector<MultiSeries::Term> from_map(std::unordered_map<std::uint64_t, Rational>& acc) {
  std::vector<MultiSeries::Term> out;
  out.reserve(acc.size());
  for (auto& [k, c] : acc)
    if (sgn(c) != 0) out.push_back({k, std::move(c)});
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.key < y.key; });
  return out;
}

// Truncated series solved term by term in increasing total degree (sum of grading
// values); shared by inversion, exp and log.
struct Recursion {
  const Frame& f;
  std::vector<std::int64_t> cut;
  std::vector<std::uint64_t> gen_keys;
  std::vector<std::vector<std::int64_t>> gen_g;
  std::vector<Rational> gen_c;
  std::vector<std::int64_t> gen_phi;

  Recursion(const MultiSeries& x, std::vector<std::int64_t> cutoffs, bool inversion)
      : f(x.frame()), cut(std::move(cutoffs)) {
    auto fail = [&] {
      if (inversion) throw NotInvertible();
      throw DomainError("series argument has a term of non-positive degree");
    };
    for (const auto& t : x.raw_terms()) {
      Exps e = x.exps_of(t.key);
      std::vector<std::int64_t> g(f.ngrad());
      std::int64_t phi = 0;
      for (int i = 0; i < f.ngrad(); ++i) {
        g[i] = f.weigh(i, e);
        if (g[i] < 0) fail();
        phi += g[i];
      }
      if (phi <= 0) fail();
      gen_keys.push_back(t.key);
      gen_g.push_back(std::move(g));
      gen_c.push_back(t.c);
      gen_phi.push_back(phi);
    }
    // Finite monoid under the cutoffs: every generator must grow in a finite grading.
    for (const auto& g : gen_g) {
      bool bounded = false;
      for (int i = 0; i < f.ngrad(); ++i) bounded = bounded || (g[i] > 0 && cut[i] < kInf);
      if (!bounded) throw DomainError("unbounded truncation in series recursion");
    }
  }

  // Monoid generated by the generators, inside the cutoff region; sorted by degree.
  std::vector<std::pair<std::int64_t, std::uint64_t>> candidates() const {
    const int nv = f.nvars();
    const std::uint64_t bias = bias_key(nv);
    const std::uint64_t zero = bias;
    std::unordered_map<std::uint64_t, std::vector<std::int64_t>> seen;
    std::vector<std::uint64_t> queue;
    for (int i = 0; i < f.ngrad(); ++i)
      if (cut[i] < 0) return {};
    seen.emplace(zero, std::vector<std::int64_t>(f.ngrad(), 0));
    queue.push_back(zero);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const std::uint64_t k = queue[qi];
      const std::vector<std::int64_t> gk = seen[k];
      for (std::size_t j = 0; j < gen_keys.size(); ++j) {
        bool ok = true;
        std::vector<std::int64_t> g(f.ngrad());
        for (int i = 0; i < f.ngrad() && ok; ++i) {
          g[i] = gk[i] + gen_g[j][i];
          ok = g[i] <= cut[i];
        }
        if (!ok) continue;
        Exps e = unpack(k, nv), d = unpack(gen_keys[j], nv);
        for (int v = 0; v < nv; ++v) e[v] += d[v];
        if (!in_range(e)) throw WindowOverflow("series recursion leaves representable range");
        std::uint64_t nk = k + gen_keys[j] - bias;
        if (seen.emplace(nk, std::move(g)).second) queue.push_back(nk);
      }
    }
    std::vector<std::pair<std::int64_t, std::uint64_t>> out;
    out.reserve(seen.size());
    for (const auto& [k, g] : seen) out.emplace_back(std::accumulate(g.begin(), g.end(), std::int64_t{0}), k);
    std::sort(out.begin(), out.end());
    return out;
  }
};

}  // namespace

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  if (a >= kInf || b >= kInf) return kInf;
  if (a <= -kInf || b <= -kInf) return -kInf;
  std::int64_t s = a + b;
  if (s >= kInf) return kInf;
  if (s <= -kInf) return -kInf;
  return s;
}

int Frame::index(const std::string& name) const {
  for (int i = 0; i < nvars(); ++i)
    if (vars[i].name == name) return i;
  return -1;
}

std::int64_t Frame::weigh(int g, const Exps& e) const {
  std::int64_t s = 0;
  for (int i = 0; i < nvars(); ++i) s += static_cast<std::int64_t>(weights[g][i]) * e[i];
  return s;
}

FramePtr make_frame(std::vector<VarSpec> vars, std::vector<std::vector<int>> weights,
                    std::vector<std::int64_t> cutoffs) {
  if (vars.empty() || vars.size() > static_cast<std::size_t>(kMaxVars))
    throw DomainError("frame needs 1.." + std::to_string(kMaxVars) + " variables");
  for (const auto& v : vars)
    if (v.den <= 0) throw DomainError("exponent denominator must be positive");
  if (weights.size() != cutoffs.size()) throw DomainError("one default cutoff per grading");
  for (const auto& w : weights)
    if (w.size() != vars.size()) throw DomainError("grading weight length mismatch");
  auto f = std::make_shared<Frame>();
  f->vars = std::move(vars);
  f->weights = std::move(weights);
  f->cutoffs = std::move(cutoffs);
  return f;
}

// ---------------------------------------------------------------------------

MultiSeries::MultiSeries(FramePtr f) : frame_(std::move(f)) {
  cut_.assign(frame_->ngrad(), kInf);
  val_.assign(frame_->ngrad(), kInf);
}

MultiSeries MultiSeries::raw(FramePtr f, std::vector<Term> terms, std::vector<std::int64_t> cut,
                             std::vector<std::int64_t> val, Rational z3) {
  MultiSeries s;
  s.frame_ = std::move(f);
  s.terms_ = std::move(terms);
  s.cut_ = std::move(cut);
  s.val_ = std::move(val);
  s.z3_ = std::move(z3);
  s.drop_outside();
  return s;
}

void MultiSeries::drop_outside() {
  const int G = frame_->ngrad();
  std::erase_if(terms_, [&](const Term& t) {
    if (sgn(t.c) == 0) return true;
    Exps e = exps_of(t.key);
    for (int g = 0; g < G; ++g)
      if (cut_[g] < kInf && frame_->weigh(g, e) > cut_[g]) return true;
    return false;
  });
}

MultiSeries MultiSeries::constant(FramePtr f, const Rational& c) {
  return monomial(std::move(f), {}, c);
}

MultiSeries MultiSeries::monomial(FramePtr f, const Exps& e, const Rational& c) {
  Exps ee = e.empty() ? Exps(f->nvars(), 0) : e;
  return polynomial(std::move(f), {{ee, c}});
}

MultiSeries MultiSeries::polynomial(FramePtr f, const std::vector<std::pair<Exps, Rational>>& terms) {
  MultiSeries s(f);
  std::unordered_map<std::uint64_t, Rational> acc;
  for (const auto& [e, c] : terms) {
    if (static_cast<int>(e.size()) != f->nvars()) throw DomainError("exponent vector length");
    Rational x = c;
    x.canonicalize();
    acc[pack(e)] += x;
  }
  s.terms_ = from_map(acc);
  for (int g = 0; g < f->ngrad(); ++g) s.val_[g] = s.support_min(g);
  return s;
}

MultiSeries MultiSeries::from_terms(FramePtr f, const std::vector<std::pair<Exps, Rational>>& terms,
                                    std::vector<std::int64_t> cutoffs, std::vector<std::int64_t> vals) {
  std::unordered_map<std::uint64_t, Rational> acc;
  for (const auto& [e, c] : terms) {
    if (static_cast<int>(e.size()) != f->nvars()) throw DomainError("exponent vector length");
    Rational x = c;
    x.canonicalize();
    acc[pack(e)] += x;
  }
  return raw(std::move(f), from_map(acc), std::move(cutoffs), std::move(vals));
}

MultiSeries MultiSeries::one_minus_power(FramePtr f, const Exps& m, long e, const Rational& c,
                                         std::optional<std::vector<std::int64_t>> cutoffs) {
  const Exps zero(f->nvars(), 0);
  if (m == zero) throw DomainError("binomial factor of the constant monomial");
  std::vector<std::pair<Exps, Rational>> terms;
  auto coeff = [&](long j) -> Rational {
    // binom(e, j) (-c)^j
    Integer b;
    if (e >= 0) {
      mpz_bin_ui(b.get_mpz_t(), Integer(e).get_mpz_t(), j);
    } else {
      mpz_bin_ui(b.get_mpz_t(), Integer(-e + j - 1).get_mpz_t(), j);
      if (j % 2) b = -b;
    }
    Rational r(b);
    Rational cj = 1;
    for (long i = 0; i < j; ++i) cj *= -c;
    return r * cj;
  };
  if (e >= 0) {
    // Exact polynomial unless cutoffs were requested or the powers would overflow;
    // then only the powers inside the window are kept.
    int mmax = 0;
    for (int v : m) mmax = std::max(mmax, std::abs(v));
    if (cutoffs || static_cast<long>(mmax) * e > kMaxExp) {
      std::vector<std::int64_t> W = cutoffs ? *cutoffs : f->cutoffs;
      for (int g = 0; g < f->ngrad(); ++g) {
        std::int64_t wm = f->weigh(g, m);
        if (wm > 0 && W[g] < kInf && floor_div(W[g], wm) < e)
          return monomial_series(std::move(f), m, coeff, 0, std::move(cutoffs));
      }
    }
    for (long j = 0; j <= e; ++j) {
      Exps x(m.size());
      for (std::size_t v = 0; v < m.size(); ++v) {
        long val = static_cast<long>(m[v]) * j;
        if (val > kMaxExp || val < -kMaxExp) throw WindowOverflow("binomial factor exponent overflow");
        x[v] = static_cast<int>(val);
      }
      terms.emplace_back(std::move(x), coeff(j));
    }
    return polynomial(std::move(f), terms);
  }
  return monomial_series(std::move(f), m, coeff, 0, std::move(cutoffs));
}

MultiSeries MultiSeries::monomial_series(FramePtr f, const Exps& m, const std::function<Rational(long)>& coeff,
                                         long j0, std::optional<std::vector<std::int64_t>> cutoffs) {
  const int G = f->ngrad();
  if (m == Exps(f->nvars(), 0)) throw DomainError("power series in the constant monomial");
  if (j0 < 0) throw DomainError("power series must start at a nonnegative power");
  std::vector<std::int64_t> W = cutoffs ? *cutoffs : f->cutoffs;
  int bind = -1;
  std::int64_t jmax = kInf;
  for (int g = 0; g < G; ++g) {
    std::int64_t wm = f->weigh(g, m);
    if (wm > 0 && W[g] < kInf) {
      std::int64_t J = floor_div(W[g], wm);
      if (J < jmax) {
        jmax = J;
        bind = g;
      }
    }
  }
  if (bind < 0) throw DomainError("power series is not truncated by any grading");
  std::vector<std::pair<Exps, Rational>> terms;
  for (long j = j0; j <= jmax; ++j) {
    Exps x(m.size());
    for (std::size_t v = 0; v < m.size(); ++v) {
      long val = static_cast<long>(m[v]) * j;
      if (val > kMaxExp || val < -kMaxExp) throw WindowOverflow("power series exponent overflow");
      x[v] = static_cast<int>(val);
    }
    terms.emplace_back(std::move(x), coeff(j));
  }
  std::vector<std::int64_t> cut(G, kInf), val(G, 0);
  cut[bind] = W[bind];
  for (int g = 0; g < G; ++g) {
    std::int64_t wm = f->weigh(g, m);
    if (wm >= 0) val[g] = wm * j0;
    else val[g] = g > bind ? (jmax < j0 ? 0 : jmax * wm) : -kInf;
  }
  return from_terms(std::move(f), terms, std::move(cut), std::move(val));
}

bool MultiSeries::exact() const {
  for (auto c : cut_)
    if (c < kInf) return false;
  return true;
}

bool MultiSeries::is_known(const Exps& e) const {
  for (int g = 0; g < frame_->ngrad(); ++g)
    if (cut_[g] < kInf && frame_->weigh(g, e) > cut_[g]) return false;
  return true;
}

Rational MultiSeries::coefficient(const Exps& e) const {
  if (static_cast<int>(e.size()) != frame_->nvars()) throw DomainError("exponent vector length");
  if (!is_known(e)) throw UnknownCoefficient("unknown coefficient at " + format_monomial(*frame_, e));
  if (!in_range(e)) return 0;
  const std::uint64_t k = pack(e);
  auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                             [](const Term& t, std::uint64_t key) { return t.key < key; });
  if (it != terms_.end() && it->key == k) return it->c;
  return 0;
}

MultiSeries MultiSeries::with_zeta3(const Rational& z) const {
  MultiSeries s = *this;
  s.z3_ = z;
  s.z3_.canonicalize();
  return s;
}

Exps MultiSeries::exps_of(std::uint64_t key) const { return unpack(key, frame_->nvars()); }
std::uint64_t MultiSeries::key_of(const Exps& e) const { return pack(e); }

std::vector<std::pair<Exps, Rational>> MultiSeries::terms() const {
  std::vector<std::pair<Exps, Rational>> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.emplace_back(exps_of(t.key), t.c);
  return out;
}

MultiSeries MultiSeries::truncate(const std::vector<std::int64_t>& cutoffs) const {
  MultiSeries s = *this;
  for (int g = 0; g < frame_->ngrad(); ++g) s.cut_[g] = std::min(s.cut_[g], cutoffs[g]);
  s.drop_outside();
  return s;
}

std::int64_t MultiSeries::support_min(int g) const {
  std::int64_t m = kInf;
  for (const auto& t : terms_) m = std::min(m, frame_->weigh(g, exps_of(t.key)));
  return m;
}

std::optional<Box> MultiSeries::hull() const {
  if (terms_.empty()) return std::nullopt;
  Box b(frame_->nvars(), {kMaxExp + 1, -kMaxExp - 1});
  for (const auto& t : terms_) {
    Exps e = exps_of(t.key);
    for (int v = 0; v < frame_->nvars(); ++v) {
      b[v].first = std::min(b[v].first, e[v]);
      b[v].second = std::max(b[v].second, e[v]);
    }
  }
  return b;
}

MultiSeries MultiSeries::operator-() const {
  MultiSeries s = *this;
  for (auto& t : s.terms_) t.c = -t.c;
  s.z3_ = -s.z3_;
  return s;
}

MultiSeries& MultiSeries::operator+=(const MultiSeries& o) { return *this = add(*this, o); }
MultiSeries& MultiSeries::operator-=(const MultiSeries& o) { return *this = add(*this, -o); }
MultiSeries& MultiSeries::operator*=(const MultiSeries& o) { return *this = mul(*this, o); }
MultiSeries& MultiSeries::operator*=(const Rational& c0) {
  Rational c = c0;
  c.canonicalize();
  if (sgn(c) == 0) {
    terms_.clear();
    z3_ = 0;
    // 0 * (anything known on K) is known on K only; keep cutoffs.
    return *this;
  }
  for (auto& t : terms_) t.c *= c;
  z3_ *= c;
  return *this;
}

MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) { return mul(a, b); }

// ---------------------------------------------------------------------------

MultiSeries add(const MultiSeries& a, const MultiSeries& b) {
  require_layout(a, b);
  const int G = a.frame().ngrad();
  std::vector<std::int64_t> cut(G), val(G);
  for (int g = 0; g < G; ++g) {
    cut[g] = std::min(a.cutoffs()[g], b.cutoffs()[g]);
    val[g] = std::min(a.vals()[g], b.vals()[g]);
  }
  std::vector<MultiSeries::Term> out;
  out.reserve(a.size() + b.size());
  auto ia = a.raw_terms().begin(), ea = a.raw_terms().end();
  auto ib = b.raw_terms().begin(), eb = b.raw_terms().end();
  while (ia != ea || ib != eb) {
    if (ib == eb || (ia != ea && ia->key < ib->key)) {
      out.push_back(*ia++);
    } else if (ia == ea || ib->key < ia->key) {
      out.push_back(*ib++);
    } else {
      Rational c = ia->c + ib->c;
      if (sgn(c) != 0) out.push_back({ia->key, std::move(c)});
      ++ia;
      ++ib;
    }
  }
  return MultiSeries::raw(a.frame_ptr(), std::move(out), std::move(cut), std::move(val),
                          a.zeta3() + b.zeta3());
}

namespace {

// Constant coefficient if the series is an exact constant; nullopt otherwise.
std::optional<Rational> exact_constant(const MultiSeries& a) {
  if (!a.exact()) return std::nullopt;
  Rational c = 0;
  for (const auto& t : a.raw_terms()) {
    for (int x : a.exps_of(t.key))
      if (x != 0) return std::nullopt;
    c = t.c;
  }
  return c;
}

}  // namespace

MultiSeries mul(const MultiSeries& a, const MultiSeries& b) {
  require_layout(a, b);
  Rational z3 = 0;
  if (sgn(a.zeta3()) != 0 || sgn(b.zeta3()) != 0) {
    if (sgn(a.zeta3()) != 0 && sgn(b.zeta3()) != 0)
      throw DomainError("zeta(3) token cannot be multiplied by itself");
    const MultiSeries& other = sgn(a.zeta3()) != 0 ? b : a;
    const Rational& z = sgn(a.zeta3()) != 0 ? a.zeta3() : b.zeta3();
    auto c = exact_constant(other);
    if (!c) throw DomainError("zeta(3) token only combines with constant factors");
    z3 = z * *c;
  }
  const Frame& f = a.frame();
  const int G = f.ngrad();
  std::vector<std::int64_t> cut(G), val(G);
  for (int g = 0; g < G; ++g) {
    cut[g] = std::min(sat_add(a.cutoffs()[g], b.vals()[g]), sat_add(b.cutoffs()[g], a.vals()[g]));
    val[g] = sat_add(a.vals()[g], b.vals()[g]);
  }
  if (a.size() == 0 || b.size() == 0)
    return MultiSeries::raw(a.frame_ptr(), {}, std::move(cut), std::move(val), std::move(z3));

  const MultiSeries& big = a.size() >= b.size() ? a : b;
  const MultiSeries& small = a.size() >= b.size() ? b : a;
  std::vector<std::int64_t> gb = grading_table(big), gs = grading_table(small);

  // Sort the larger operand by its first finite-cutoff grading so the inner loop can stop early.
  int lead = -1;
  for (int g = 0; g < G && lead < 0; ++g)
    if (cut[g] < kInf) lead = g;
  std::vector<std::size_t> order(big.size());
  std::iota(order.begin(), order.end(), 0);
  if (lead >= 0)
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return gb[x * G + lead] < gb[y * G + lead]; });

  const std::uint64_t bias = bias_key(f.nvars());
  std::unordered_map<std::uint64_t, Rational> acc;
  acc.reserve(big.size() * 2);
  Rational tmp;
  const auto& st = small.raw_terms();
  const auto& bt = big.raw_terms();
  for (std::size_t i = 0; i < st.size(); ++i) {
    const std::int64_t* gi = &gs[i * G];
    for (std::size_t oj : order) {
      const std::int64_t* gj = &gb[oj * G];
      if (lead >= 0 && gi[lead] + gj[lead] > cut[lead]) break;
      bool ok = true;
      for (int g = 0; g < G && ok; ++g) ok = cut[g] >= kInf || gi[g] + gj[g] <= cut[g];
      if (!ok) continue;
      mpq_mul(tmp.get_mpq_t(), st[i].c.get_mpq_t(), bt[oj].c.get_mpq_t());
      Rational& slot = acc[st[i].key + bt[oj].key - bias];
      mpq_add(slot.get_mpq_t(), slot.get_mpq_t(), tmp.get_mpq_t());
    }
  }
  // Exponents of stored terms are bounded by kMaxExp, so packed sums never carry.
  auto terms = from_map(acc);
  for (const auto& t : terms)
    if (!in_range(unpack(t.key, f.nvars())))
      throw WindowOverflow("product exponent outside representable range");
  return MultiSeries::raw(a.frame_ptr(), std::move(terms), std::move(cut), std::move(val), std::move(z3));
}

MultiSeries shift(const MultiSeries& a, const Exps& m, const Rational& c0) {
  Rational c = c0;
  c.canonicalize();
  if (sgn(a.zeta3()) != 0) throw DomainError("zeta(3) token only combines with constant factors");
  const Frame& f = a.frame();
  const int G = f.ngrad();
  std::vector<std::int64_t> cut(G), val(G);
  for (int g = 0; g < G; ++g) {
    std::int64_t wm = f.weigh(g, m);
    cut[g] = sat_add(a.cutoffs()[g], wm);
    val[g] = sat_add(a.vals()[g], wm);
  }
  std::vector<MultiSeries::Term> out;
  out.reserve(a.size());
  for (const auto& t : a.raw_terms()) {
    Exps e = a.exps_of(t.key);
    for (int v = 0; v < f.nvars(); ++v) e[v] += m[v];
    out.push_back({pack(e), t.c * c});
  }
  return MultiSeries::raw(a.frame_ptr(), std::move(out), std::move(cut), std::move(val));
}

MultiSeries power(const MultiSeries& a, int n) {
  if (n < 0) return power(invert_unit(a), -n);
  MultiSeries result = MultiSeries::constant(a.frame_ptr(), 1);
  MultiSeries base = a;
  while (n > 0) {
    if (n & 1) result = mul(result, base);
    n >>= 1;
    if (n) base = mul(base, base);
  }
  return result;
}

MultiSeries invert_unit(const MultiSeries& a, std::optional<std::vector<std::int64_t>> cutoffs) {
  if (sgn(a.zeta3()) != 0) throw DomainError("cannot invert a series carrying the zeta(3) token");
  if (a.size() == 0) throw NotInvertible();
  const Frame& f = a.frame();
  const int G = f.ngrad();
  const auto& t0 = a.raw_terms().front();
  const Exps m0 = a.exps_of(t0.key);
  const Rational c0 = t0.c;

  // a = c0 m0 (1 - x)
  std::vector<std::int64_t> xcut(G), xval(G);
  for (int g = 0; g < G; ++g) {
    std::int64_t wm = f.weigh(g, m0);
    xcut[g] = sat_add(a.cutoffs()[g], -wm);
    xval[g] = sat_add(a.vals()[g], -wm);
    if (xval[g] < 0) throw NotInvertible();
  }
  std::vector<MultiSeries::Term> xt;
  Exps neg(m0.size());
  for (std::size_t v = 0; v < m0.size(); ++v) neg[v] = -m0[v];
  for (std::size_t i = 1; i < a.size(); ++i) {
    const auto& t = a.raw_terms()[i];
    Exps e = a.exps_of(t.key);
    for (std::size_t v = 0; v < e.size(); ++v) e[v] -= m0[v];
    xt.push_back({pack(e), -t.c / c0});
  }
  std::sort(xt.begin(), xt.end(), [](const auto& p, const auto& q) { return p.key < q.key; });
  MultiSeries x = MultiSeries::raw(a.frame_ptr(), std::move(xt), xcut, xval);

  std::vector<std::int64_t> W(G);
  for (int g = 0; g < G; ++g) {
    W[g] = std::min(xcut[g], sat_add(f.cutoffs[g], f.weigh(g, m0)));
    if (cutoffs) W[g] = std::min(W[g], sat_add((*cutoffs)[g], f.weigh(g, m0)));
  }

  Recursion rec(x, W, true);
  const auto cand = rec.candidates();
  const std::uint64_t bias = bias_key(f.nvars());
  std::unordered_map<std::uint64_t, Rational> s;
  s.reserve(cand.size() * 2);
  Rational tmp;
  for (const auto& [phi, k] : cand) {
    Rational v = (phi == 0) ? Rational(1) : Rational(0);
    for (std::size_t j = 0; j < rec.gen_keys.size(); ++j) {
      if (rec.gen_phi[j] > phi) continue;
      auto it = s.find(k + bias - rec.gen_keys[j]);
      if (it == s.end()) continue;
      mpq_mul(tmp.get_mpq_t(), rec.gen_c[j].get_mpq_t(), it->second.get_mpq_t());
      v += tmp;
    }
    if (sgn(v) != 0) s.emplace(k, std::move(v));
  }
  std::vector<MultiSeries::Term> out;
  out.reserve(s.size());
  const Rational inv_c0 = 1 / c0;
  for (auto& [k, c] : s) {
    Exps e = unpack(k, f.nvars());
    for (std::size_t v = 0; v < e.size(); ++v) e[v] -= m0[v];
    out.push_back({pack(e), c * inv_c0});
  }
  std::sort(out.begin(), out.end(), [](const auto& p, const auto& q) { return p.key < q.key; });
  std::vector<std::int64_t> cut(G), val(G);
  for (int g = 0; g < G; ++g) {
    std::int64_t wm = f.weigh(g, m0);
    cut[g] = sat_add(W[g], -wm);
    val[g] = -wm;
  }
  return MultiSeries::raw(a.frame_ptr(), std::move(out), std::move(cut), std::move(val));
}

MultiSeries divide(const MultiSeries& a, const MultiSeries& b) { return mul(a, invert_unit(b)); }

MultiSeries exp_series(const MultiSeries& a, std::optional<std::vector<std::int64_t>> cutoffs) {
  if (sgn(a.zeta3()) != 0) throw DomainError("exp of a series carrying the zeta(3) token");
  const Frame& f = a.frame();
  const int G = f.ngrad();
  const Exps zero(f.nvars(), 0);
  if (!a.is_known(zero)) throw DomainError("exp needs a known constant term");
  if (sgn(a.coefficient(zero)) != 0) throw DomainError("exp needs zero constant term");
  for (int g = 0; g < G; ++g)
    if (a.vals()[g] < 0) throw DomainError("exp argument has negative degree");
  std::vector<std::int64_t> W(G);
  for (int g = 0; g < G; ++g) {
    W[g] = std::min(a.cutoffs()[g], f.cutoffs[g]);
    if (cutoffs) W[g] = std::min(W[g], (*cutoffs)[g]);
  }
  Recursion rec(a, W, false);
  const auto cand = rec.candidates();
  const std::uint64_t bias = bias_key(f.nvars());
  std::unordered_map<std::uint64_t, Rational> r;
  r.reserve(cand.size() * 2);
  Rational tmp;
  for (const auto& [phi, k] : cand) {
    if (phi == 0) {
      r.emplace(k, Rational(1));
      continue;
    }
    Rational v = 0;
    for (std::size_t j = 0; j < rec.gen_keys.size(); ++j) {
      if (rec.gen_phi[j] > phi) continue;
      auto it = r.find(k + bias - rec.gen_keys[j]);
      if (it == r.end()) continue;
      mpq_mul(tmp.get_mpq_t(), rec.gen_c[j].get_mpq_t(), it->second.get_mpq_t());
      tmp *= rec.gen_phi[j];
      v += tmp;
    }
    if (sgn(v) != 0) {
      v /= phi;
      r.emplace(k, std::move(v));
    }
  }
  std::vector<std::int64_t> val(G, 0);
  return MultiSeries::raw(a.frame_ptr(), from_map(r), W, val);
}

MultiSeries log_series(const MultiSeries& a) {
  if (sgn(a.zeta3()) != 0) throw DomainError("log of a series carrying the zeta(3) token");
  const Frame& f = a.frame();
  const int G = f.ngrad();
  const Exps zero(f.nvars(), 0);
  if (!a.is_known(zero) || a.coefficient(zero) != 1) throw DomainError("log needs constant term 1");
  MultiSeries h = a - MultiSeries::constant(a.frame_ptr(), 1);
  for (int g = 0; g < G; ++g)
    if (h.vals()[g] < 0) throw DomainError("log argument has negative degree");
  std::vector<std::int64_t> W(G);
  for (int g = 0; g < G; ++g) W[g] = std::min(h.cutoffs()[g], f.cutoffs[g]);
  Recursion rec(h, W, false);
  const auto cand = rec.candidates();
  const std::uint64_t bias = bias_key(f.nvars());
  std::unordered_map<std::uint64_t, Rational> L;
  std::unordered_map<std::uint64_t, std::int64_t> phi_of;
  L.reserve(cand.size() * 2);
  for (const auto& [phi, k] : cand) phi_of.emplace(k, phi);
  std::unordered_map<std::uint64_t, const Rational*> hmap;
  for (const auto& t : h.raw_terms()) hmap.emplace(t.key, &t.c);
  Rational tmp;
  for (const auto& [phi, k] : cand) {
    if (phi == 0) continue;
    Rational v = 0;
    for (std::size_t j = 0; j < rec.gen_keys.size(); ++j) {
      if (rec.gen_phi[j] >= phi) continue;
      const std::uint64_t rest = k + bias - rec.gen_keys[j];
      auto it = L.find(rest);
      if (it == L.end()) continue;
      mpq_mul(tmp.get_mpq_t(), rec.gen_c[j].get_mpq_t(), it->second.get_mpq_t());
      tmp *= phi - rec.gen_phi[j];
      v += tmp;
    }
    v /= -phi;
    auto hit = hmap.find(k);
    if (hit != hmap.end()) v += *hit->second;
    if (sgn(v) != 0) L.emplace(k, std::move(v));
  }
  std::vector<std::int64_t> val(G);
  for (int g = 0; g < G; ++g) val[g] = std::max<std::int64_t>(h.vals()[g], 0);
  return MultiSeries::raw(a.frame_ptr(), from_map(L), W, val);
}

MultiSeries euler_derivative(const MultiSeries& a, const std::string& var, int r) {
  const int vi = a.frame().index(var);
  if (vi < 0) throw IncompatibleVariables("unknown variable " + var);
  const int den = a.frame().vars[vi].den;
  std::vector<MultiSeries::Term> out;
  for (const auto& t : a.raw_terms()) {
    Rational l(a.exps_of(t.key)[vi], den);
    Rational c = t.c;
    for (int i = 0; i < r; ++i) c *= l;
    if (sgn(c) != 0) out.push_back({t.key, std::move(c)});
  }
  // Derivatives kill the constant term, so the zeta(3) token is dropped when r > 0.
  return MultiSeries::raw(a.frame_ptr(), std::move(out), a.cutoffs(), a.vals(),
                          r == 0 ? a.zeta3() : Rational(0));
}

// ---------------------------------------------------------------------------

MultiSeries embed(const MultiSeries& a, FramePtr target) {
  const Frame& s = a.frame();
  const Frame& t = *target;
  const int ns = s.nvars(), G = t.ngrad();
  std::vector<int> pos(ns), fac(ns);
  for (int v = 0; v < ns; ++v) {
    pos[v] = t.index(s.vars[v].name);
    if (pos[v] < 0 || t.vars[pos[v]].den % s.vars[v].den != 0) throw IncompatibleVariables();
    fac[v] = t.vars[pos[v]].den / s.vars[v].den;
  }
  // Restriction of every target grading to the source lattice.
  std::vector<std::vector<std::int64_t>> r(G, std::vector<std::int64_t>(ns));
  for (int g = 0; g < G; ++g)
    for (int v = 0; v < ns; ++v) r[g][v] = static_cast<std::int64_t>(t.weights[g][pos[v]]) * fac[v];
  // r = (p/q) w  with p, q > 0 ?
  auto parallel = [&](int g, int j, std::int64_t& p, std::int64_t& q) {
    p = 0;
    q = 0;
    for (int v = 0; v < ns; ++v) {
      std::int64_t w = s.weights[j][v], x = r[g][v];
      if ((w == 0) != (x == 0)) return false;
      if (w == 0) continue;
      if (q == 0) {
        std::int64_t d = std::gcd(x, w);
        p = x / d;
        q = w / d;
        if (q < 0) {
          p = -p;
          q = -q;
        }
        if (p <= 0) return false;
      } else if (x * q != w * p) {
        return false;
      }
    }
    return q != 0;
  };

  std::vector<std::int64_t> cut(G, kInf), val(G, -kInf);
  std::vector<int> matched(s.ngrad(), -1);
  for (int j = 0; j < s.ngrad(); ++j) {
    if (a.cutoffs()[j] >= kInf) continue;
    for (int g = 0; g < G && matched[j] < 0; ++g) {
      std::int64_t p, q;
      if (parallel(g, j, p, q)) {
        matched[j] = g;
        cut[g] = std::min(cut[g], floor_div(a.cutoffs()[j] * p, q));
      }
    }
    if (matched[j] < 0)
      throw IncompatibleVariables("truncation of the source is not expressible in the target gradings");
  }
  for (int g = 0; g < G; ++g) {
    bool zero = true;
    for (auto x : r[g]) zero = zero && x == 0;
    if (zero) {
      val[g] = a.size() ? 0 : kInf;
      continue;
    }
    if (a.exact()) {
      std::int64_t m = kInf;
      for (const auto& term : a.raw_terms()) {
        Exps e = a.exps_of(term.key);
        std::int64_t x = 0;
        for (int v = 0; v < ns; ++v) x += r[g][v] * e[v];
        m = std::min(m, x);
      }
      val[g] = m;
      continue;
    }
    for (int j = 0; j < s.ngrad(); ++j) {
      std::int64_t p, q;
      if (parallel(g, j, p, q) && a.vals()[j] > -kInf) {
        val[g] = a.vals()[j] >= kInf ? kInf : ceil_div(a.vals()[j] * p, q);
        break;
      }
    }
  }
  std::vector<MultiSeries::Term> out;
  out.reserve(a.size());
  for (const auto& term : a.raw_terms()) {
    Exps e = a.exps_of(term.key), x(t.nvars(), 0);
    for (int v = 0; v < ns; ++v) x[pos[v]] = e[v] * fac[v];
    out.push_back({pack(x), term.c});
  }
  std::sort(out.begin(), out.end(), [](const auto& p, const auto& q) { return p.key < q.key; });
  return MultiSeries::raw(std::move(target), std::move(out), std::move(cut), std::move(val), a.zeta3());
}

namespace {

// Inverse of a small rational matrix; throws if singular.
std::vector<std::vector<Rational>> inverse(std::vector<std::vector<Rational>> m) {
  const int n = static_cast<int>(m.size());
  std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, 0));
  for (int i = 0; i < n; ++i) inv[i][i] = 1;
  for (int c = 0; c < n; ++c) {
    int p = c;
    while (p < n && sgn(m[p][c]) == 0) ++p;
    if (p == n) throw DomainError("monomial substitution is not invertible");
    std::swap(m[p], m[c]);
    std::swap(inv[p], inv[c]);
    Rational d = m[c][c];
    for (int j = 0; j < n; ++j) {
      m[c][j] /= d;
      inv[c][j] /= d;
    }
    for (int i = 0; i < n; ++i) {
      if (i == c || sgn(m[i][c]) == 0) continue;
      Rational f = m[i][c];
      for (int j = 0; j < n; ++j) {
        m[i][j] -= f * m[c][j];
        inv[i][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

}  // namespace

MultiSeries substitute_monomial(const MultiSeries& a, const std::vector<VarSpec>& target_vars,
                                const std::vector<Exps>& images) {
  const Frame& s = a.frame();
  const int n = s.nvars();
  if (static_cast<int>(images.size()) != n || static_cast<int>(target_vars.size()) != n)
    throw DomainError("monomial substitution must be square");
  // M[t][v]: target scaled exponent per source scaled exponent.
  std::vector<std::vector<Rational>> M(n, std::vector<Rational>(n));
  for (int v = 0; v < n; ++v) {
    if (static_cast<int>(images[v].size()) != n) throw DomainError("image length");
    for (int t = 0; t < n; ++t) M[t][v] = Rational(images[v][t], s.vars[v].den);
  }
  auto Minv = inverse(M);
  auto transport = [&](const std::vector<int>& w, std::int64_t& scale) {
    std::vector<Rational> wt(n, 0);
    for (int t = 0; t < n; ++t)
      for (int v = 0; v < n; ++v) wt[t] += Minv[v][t] * w[v];
    Integer l = 1;
    for (auto& x : wt) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    std::vector<int> out(n);
    for (int t = 0; t < n; ++t) {
      Rational y = wt[t] * l;
      out[t] = static_cast<int>(y.get_num().get_si());
    }
    scale = l.get_si();
    return out;
  };
  std::vector<std::vector<int>> weights;
  std::vector<std::int64_t> defaults, cut, val;
  for (int g = 0; g < s.ngrad(); ++g) {
    std::int64_t sc = 1;
    weights.push_back(transport(s.weights[g], sc));
    auto scale = [&](std::int64_t x) { return (x >= kInf || x <= -kInf) ? x : x * sc; };
    defaults.push_back(scale(s.cutoffs[g]));
    cut.push_back(scale(a.cutoffs()[g]));
    val.push_back(scale(a.vals()[g]));
  }
  FramePtr tf = make_frame(target_vars, std::move(weights), std::move(defaults));
  std::vector<MultiSeries::Term> out;
  out.reserve(a.size());
  for (const auto& term : a.raw_terms()) {
    Exps e = a.exps_of(term.key), x(n);
    for (int t = 0; t < n; ++t) {
      Rational y = 0;
      for (int v = 0; v < n; ++v) y += M[t][v] * e[v];
      if (y.get_den() != 1) throw DomainError("monomial substitution produces fractional exponent");
      long yi = y.get_num().get_si();
      if (yi > kMaxExp || yi < -kMaxExp) throw WindowOverflow("window overflow in monomial substitution");
      x[t] = static_cast<int>(yi);
    }
    out.push_back({pack(x), term.c});
  }
  std::sort(out.begin(), out.end(), [](const auto& p, const auto& q) { return p.key < q.key; });
  return MultiSeries::raw(std::move(tf), std::move(out), std::move(cut), std::move(val), a.zeta3());
}

namespace {

struct Sectioned {
  int vi;
  std::map<std::uint64_t, std::map<int, Rational>> sections;  // other-key -> (k -> c)
};

Sectioned sectionize(const MultiSeries& a, const std::string& var) {
  const Frame& f = a.frame();
  Sectioned out{f.index(var), {}};
  if (out.vi < 0) throw IncompatibleVariables("unknown variable " + var);
  for (int g = 0; g < f.ngrad(); ++g)
    if (f.weights[g][out.vi] != 0 && a.cutoffs()[g] < kInf)
      throw WindowOverflow("sections in " + var + " are truncated; cannot resum");
  const int shift = kBits * (f.nvars() - 1 - out.vi);
  const std::uint64_t mask = kMask << shift;
  for (const auto& t : a.raw_terms()) {
    int k = static_cast<int>((t.key >> shift) & kMask) - kBias;
    std::uint64_t other = (t.key & ~mask) | (static_cast<std::uint64_t>(kBias) << shift);
    out.sections[other][k] = t.c;
  }
  return out;
}

}  // namespace

MultiSeries substitute_exponential(const MultiSeries& a, const std::string& var,
                                   const std::string& target, int order) {
  const Frame& f = a.frame();
  Sectioned sec = sectionize(a, var);
  const int vi = sec.vi;
  if (f.vars[vi].den != 1) throw DomainError("exponential substitution needs integer exponents");
  std::vector<VarSpec> vars = f.vars;
  vars[vi] = {target, 1};
  std::vector<std::vector<int>> weights;
  std::vector<std::int64_t> defaults, cut, val;
  for (int g = 0; g < f.ngrad(); ++g) {
    if (f.weights[g][vi] != 0) continue;
    weights.push_back(f.weights[g]);
    defaults.push_back(f.cutoffs[g]);
    cut.push_back(a.cutoffs()[g]);
    val.push_back(a.vals()[g]);
  }
  std::vector<int> lw(f.nvars(), 0);
  lw[vi] = 1;
  weights.push_back(lw);
  defaults.push_back(order);
  cut.push_back(order);
  val.push_back(0);
  FramePtr tf = make_frame(vars, std::move(weights), std::move(defaults));

  std::vector<Rational> inv_fact(order + 1);
  {
    Integer fct = 1;
    for (int j = 0; j <= order; ++j) {
      if (j > 0) fct *= j;
      inv_fact[j] = Rational(1) / Rational(fct);
    }
  }
  const int shift = kBits * (f.nvars() - 1 - vi);
  std::vector<MultiSeries::Term> out;
  for (const auto& [other, prof] : sec.sections) {
    for (const auto& [k, c] : prof) {
      auto it = prof.find(-k);
      if (it == prof.end() || it->second != c) throw NonRealSubstitution();
    }
    for (int j = 0; j <= order; ++j) {
      Rational s = 0;
      for (const auto& [k, c] : prof) {
        Integer kp;
        mpz_pow_ui(kp.get_mpz_t(), Integer(k).get_mpz_t(), j);
        s += c * kp;
      }
      if (j % 2 == 1) {
        if (sgn(s) != 0) throw NonRealSubstitution();
        continue;
      }
      if (sgn(s) == 0) continue;
      if ((j / 2) % 2 == 1) s = -s;
      s *= inv_fact[j];
      std::uint64_t key = (other & ~(kMask << shift)) | (static_cast<std::uint64_t>(j + kBias) << shift);
      out.push_back({key, std::move(s)});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& p, const auto& q) { return p.key < q.key; });
  return MultiSeries::raw(std::move(tf), std::move(out), std::move(cut), std::move(val), a.zeta3());
}

MultiSeries specialize_one(const MultiSeries& a, const std::string& var) {
  const Frame& f = a.frame();
  Sectioned sec = sectionize(a, var);
  const int vi = sec.vi;
  std::vector<VarSpec> vars;
  for (int v = 0; v < f.nvars(); ++v)
    if (v != vi) vars.push_back(f.vars[v]);
  if (vars.empty()) throw DomainError("cannot specialize the only variable");
  std::vector<std::vector<int>> weights;
  std::vector<std::int64_t> defaults, cut, val;
  for (int g = 0; g < f.ngrad(); ++g) {
    if (f.weights[g][vi] != 0) continue;
    std::vector<int> w;
    for (int v = 0; v < f.nvars(); ++v)
      if (v != vi) w.push_back(f.weights[g][v]);
    weights.push_back(w);
    defaults.push_back(f.cutoffs[g]);
    cut.push_back(a.cutoffs()[g]);
    val.push_back(a.vals()[g]);
  }
  FramePtr tf = make_frame(vars, std::move(weights), std::move(defaults));
  std::vector<std::pair<Exps, Rational>> terms;
  for (const auto& [other, prof] : sec.sections) {
    Exps e = unpack(other, f.nvars());
    e.erase(e.begin() + vi);
    Rational s = 0;
    for (const auto& kv : prof) s += kv.second;
    terms.emplace_back(e, s);
  }
  return MultiSeries::from_terms(tf, terms, cut, val).with_zeta3(a.zeta3());
}

// ---------------------------------------------------------------------------

std::string format_monomial(const Frame& f, const Exps& e) {
  std::ostringstream os;
  bool any = false;
  for (int v = 0; v < f.nvars(); ++v) {
    if (e[v] == 0) continue;
    if (any) os << '*';
    any = true;
    os << f.vars[v].name;
    Rational x(e[v], f.vars[v].den);
    x.canonicalize();
    if (x != 1) os << '^' << x;
  }
  if (!any) os << '1';
  return os.str();
}

std::string Mismatch::describe(const Frame& f) const {
  std::ostringstream os;
  os << "coefficient of " << format_monomial(f, exps) << ": " << lhs << " != " << rhs;
  return os.str();
}

namespace {

void require_vars(const MultiSeries& a, const MultiSeries& b) {
  if (!a.valid() || !b.valid() || a.frame().vars != b.frame().vars) throw IncompatibleVariables();
}

template <class F>
bool walk_box(const Box& box, F&& f) {
  const std::size_t n = box.size();
  for (const auto& [lo, hi] : box)
    if (lo > hi) return true;
  Exps e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = box[i].first;
  while (true) {
    if (!f(e)) return false;
    std::size_t i = n;
    while (true) {
      if (i == 0) return true;
      --i;
      if (e[i] < box[i].second) {
        ++e[i];
        break;
      }
      e[i] = box[i].first;
    }
  }
}

}  // namespace

bool box_known(const MultiSeries& a, const Box& box) {
  return walk_box(box, [&](const Exps& e) { return a.is_known(e); });
}

std::optional<Mismatch> compare_box(const MultiSeries& a, const MultiSeries& b, const Box& box) {
  require_vars(a, b);
  std::optional<Mismatch> out;
  walk_box(box, [&](const Exps& e) {
    Rational x = a.coefficient(e), y = b.coefficient(e);
    if (x != y) {
      out = Mismatch{e, x, y};
      return false;
    }
    return true;
  });
  if (!out && a.zeta3() != b.zeta3()) {
    bool has_zero = true;
    for (const auto& [lo, hi] : box) has_zero = has_zero && lo <= 0 && hi >= 0;
    if (has_zero) out = Mismatch{Exps(box.size(), 0), a.zeta3(), b.zeta3()};
  }
  return out;
}

std::optional<Mismatch> compare_shared(const MultiSeries& a, const MultiSeries& b) {
  require_vars(a, b);
  std::map<std::uint64_t, Exps> keys;
  for (const auto& t : a.raw_terms()) keys.emplace(t.key, a.exps_of(t.key));
  for (const auto& t : b.raw_terms()) keys.emplace(t.key, b.exps_of(t.key));
  for (const auto& [k, e] : keys) {
    if (!a.is_known(e) || !b.is_known(e)) continue;
    Rational x = a.coefficient(e), y = b.coefficient(e);
    if (x != y) return Mismatch{e, x, y};
  }
  if (a.zeta3() != b.zeta3()) return Mismatch{Exps(a.frame().nvars(), 0), a.zeta3(), b.zeta3()};
  return std::nullopt;
}

std::string to_string(const MultiSeries& a, std::size_t max_terms) {
  std::ostringstream os;
  std::size_t n = 0;
  for (const auto& [e, c] : a.terms()) {
    if (n++ == max_terms) {
      os << " + ...";
      break;
    }
    if (n > 1) os << " + ";
    os << '(' << c << ")*" << format_monomial(a.frame(), e);
  }
  if (n == 0) os << '0';
  if (sgn(a.zeta3()) != 0) os << " + (" << a.zeta3() << ")*zeta(3)";
  return os.str();
}

}  // namespace ban
