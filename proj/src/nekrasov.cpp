#include "banana/nekrasov.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace ban {

int Partition::size() const {
  int s = 0;
  for (int p : parts) s += p;
  return s;
}

int Partition::row(int i) const { return i >= 1 && i <= static_cast<int>(parts.size()) ? parts[i - 1] : 0; }

int Partition::column(int j) const {
  int c = 0;
  for (int p : parts) c += p >= j ? 1 : 0;
  return j >= 1 ? c : 0;
}

bool Partition::contains(int i, int j) const { return i >= 1 && j >= 1 && j <= row(i); }

std::vector<Partition> partitions(int k) {
  if (k < 0) throw DomainError("negative partition size");
  std::vector<Partition> out;
  std::vector<int> cur;
  // Reverse lexicographic: (k), (k-1, 1), ...
  std::function<void(int, int)> rec = [&](int rest, int cap) {
    if (rest == 0) {
      out.push_back({cur});
      return;
    }
    for (int p = std::min(rest, cap); p >= 1; --p) {
      cur.push_back(p);
      rec(rest - p, p);
      cur.pop_back();
    }
  };
  rec(k, k);
  return out;
}

std::vector<PartitionTuple> partition_tuples(int r, int k) {
  if (r < 0 || k < 0) throw DomainError("negative rank or size");
  std::vector<PartitionTuple> out;
  if (r == 0) {
    if (k == 0) out.push_back({});
    return out;
  }
  PartitionTuple cur;
  std::function<void(int, int)> rec = [&](int slot, int rest) {
    if (slot == r - 1) {
      for (const auto& p : partitions(rest)) {
        cur.push_back(p);
        out.push_back(cur);
        cur.pop_back();
      }
      return;
    }
    for (int s = rest; s >= 0; --s)
      for (const auto& p : partitions(s)) {
        cur.push_back(p);
        rec(slot + 1, rest - s);
        cur.pop_back();
      }
  };
  rec(0, k);
  return out;
}

int arm(const Partition& Y, int i, int j) { return Y.row(i) - j; }
int leg(const Partition& Y, int i, int j) { return Y.column(j) - i; }

int hook(const Partition& Y, int i, int j) {
  if (!Y.contains(i, j)) throw DomainError("box (" + std::to_string(i) + "," + std::to_string(j) + ") is outside the diagram");
  return arm(Y, i, j) + leg(Y, i, j) + 1;
}

std::vector<Rational> tangent_weights(const PartitionTuple& Y, const EquivariantWeight& w) {
  const int r = static_cast<int>(Y.size());
  if (static_cast<int>(w.a.size()) != r) throw DomainError("one Coulomb parameter per diagram");
  std::vector<Rational> out;
  for (int al = 0; al < r; ++al)
    for (int be = 0; be < r; ++be) {
      const Rational d = w.a[al] - w.a[be];
      const Partition &Ya = Y[al], &Yb = Y[be];
      for (int i = 1; i <= static_cast<int>(Ya.parts.size()); ++i)
        for (int j = 1; j <= Ya.row(i); ++j)
          out.push_back(d - leg(Yb, i, j) * w.eps1 + (arm(Ya, i, j) + 1) * w.eps2);
      for (int i = 1; i <= static_cast<int>(Yb.parts.size()); ++i)
        for (int j = 1; j <= Yb.row(i); ++j)
          out.push_back(d + (leg(Ya, i, j) + 1) * w.eps1 - arm(Yb, i, j) * w.eps2);
    }
  return out;
}

Rational euler_class_at(const PartitionTuple& Y, const EquivariantWeight& w) {
  Rational e = 1;
  for (const Rational& x : tangent_weights(Y, w)) {
    if (sgn(x) == 0) throw NonRegularWeight();
    e *= x;
  }
  return e;
}

EquivariantWeight random_regular_weight(int r, int K, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-97, 97), den(1, 23);
  auto draw = [&]() -> Rational {
    int n = 0;
    while (n == 0) n = num(rng);
    Rational x(n, den(rng));
    x.canonicalize();
    return x;
  };
  for (;;) {
    EquivariantWeight w{draw(), draw(), {}};
    for (int i = 0; i < r; ++i) w.a.push_back(draw());
    bool ok = true;
    for (int k = 0; k <= K && ok; ++k)
      for (const auto& Y : partition_tuples(r, k)) {
        for (const Rational& x : tangent_weights(Y, w)) ok = ok && sgn(x) != 0;
        if (!ok) break;
      }
    if (ok) return w;
  }
}

std::vector<Rational> volume_partition_function(int r, int K, const EquivariantWeight& w) {
  std::vector<Rational> out;
  for (int k = 0; k <= K; ++k) {
    Rational s = 0;
    for (const auto& Y : partition_tuples(r, k)) s += 1 / euler_class_at(Y, w);
    out.push_back(s);
  }
  return out;
}

ModularQSeries euler_char_partition_function(int r, int K) {
  std::vector<std::pair<Exps, Rational>> terms;
  for (int k = 0; k <= K; ++k) {
    const auto n = partition_tuples(r, k).size();
    if (n) terms.push_back({{k}, Rational(static_cast<long>(n))});
  }
  return {MultiSeries::from_terms(q_frame(K), terms, {K}, {0}), 0};
}

std::string fixed_point_csv(int r, int k, const EquivariantWeight& w) {
  std::ostringstream os;
  os << "tuple,numerator,denominator\n";
  for (const auto& Y : partition_tuples(r, k)) {
    std::string code;
    for (std::size_t a = 0; a < Y.size(); ++a) {
      if (a) code += "|";
      code += "(";
      for (std::size_t i = 0; i < Y[a].parts.size(); ++i) code += (i ? " " : "") + std::to_string(Y[a].parts[i]);
      code += ")";
    }
    Rational c = 1 / euler_class_at(Y, w);
    os << code << "," << c.get_num() << "," << c.get_den() << "\n";
  }
  return os.str();
}

namespace {

// Ell(Hilb^m) in any frame containing q, y, t (other exponents zero).
MultiSeries hilb_in(FramePtr f, int m, int N) {
  const int iq = f->index("q"), iy = f->index("y"), it = f->index("t");
  if (iq < 0 || iy < 0 || it < 0) throw IncompatibleVariables("frame needs q, y, t");
  auto mono = [&](int q, int y, int t) {
    Exps e(f->nvars(), 0);
    e[iq] = q;
    e[iy] = y;
    e[it] = t;
    return e;
  };
  const auto& cut = f->cutoffs;
  MultiSeries total(f);
  for (const Partition& Y : partitions(m)) {
    MultiSeries p = MultiSeries::monomial(f, mono(0, -m, 0));
    for (int i = 1; i <= static_cast<int>(Y.parts.size()); ++i)
      for (int j = 1; j <= Y.row(i); ++j) {
        const int h = hook(Y, i, j);
        for (int n = 1; n - 1 <= N; ++n) {
          auto mul = [&](const Exps& e, long pw) {
            p = (p * MultiSeries::one_minus_power(f, e, pw)).truncate(cut);
          };
          mul(mono(n - 1, 1, h), 1);
          mul(mono(n - 1, 1, -h), 1);
          mul(mono(n - 1, 0, h), -1);
          if (n == 1) {
            // 1 / (1 - t^-h) = -t^h / (1 - t^h), expanded for |t| < 1
            p = shift(p, mono(0, 0, h), -1);
            mul(mono(0, 0, h), -1);
          } else {
            mul(mono(n - 1, 0, -h), -1);
          }
          if (n <= N) {
            mul(mono(n, -1, -h), 1);
            mul(mono(n, -1, h), 1);
            mul(mono(n, 0, -h), -1);
            mul(mono(n, 0, h), -1);
          }
        }
      }
    total += p;
  }
  return total;
}

}  // namespace

FramePtr hilb_frame(int N, int K, int alpha) {
  if (N < 0 || alpha < 1) throw DomainError("bad Hilbert-scheme window");
  return make_frame({{"q", 1}, {"y", 1}, {"t", 1}}, {{1, 0, 0}, {alpha, 0, 1}}, {N, K});
}

MultiSeries hilb_ell_genus(int m, int N, int K, int alpha) {
  if (m < 0) throw DomainError("negative Hilbert-scheme degree");
  return hilb_in(hilb_frame(N, K, alpha), m, N);
}

DmvvReport dmvv_check(int M, int N, int L, int K, int Kt) {
  if (M < 1 || N < 0 || L < 0 || K < 0) throw DomainError("bad DMVV window");
  DmvvReport rep;
  FramePtr f = make_frame({{"Q", 1}, {"q", 1}, {"y", 1}, {"t", 1}}, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, M, 0, 1}},
                          {M, N, Kt});
  const Box box{{0, M}, {0, N}, {-L, L}, {-K, K}};
  // Hilbert-scheme side in (q, y, t) with the same q and t gradings
  FramePtr h = hilb_frame(N, Kt, M);
  std::map<Exps, Rational> lhs;
  std::vector<std::int64_t> lcut{M, N, Kt}, lval{0, 0, kInf};
  for (int m = 0; m <= M; ++m) {
    MultiSeries e = hilb_in(h, m, N);
    lcut[2] = std::min(lcut[2], e.cutoffs()[1]);
    lval[2] = std::min(lval[2], e.vals()[1]);
    e.for_each([&](const Exps& x, const Rational& c) { lhs[{m, x[0], x[1], x[2]}] = c; });
  }
  std::erase_if(lhs, [&](const auto& t) { return f->weigh(2, t.first) > lcut[2]; });
  MultiSeries left = MultiSeries::from_terms(f, {lhs.begin(), lhs.end()}, lcut, lval);
  // product side
  EllGenTable tab = extract_table(phi0_product(std::max(1, M * N), 2, Kt), 2, Kt);
  MultiSeries right = MultiSeries::constant(f, 1);
  try {
    for (int m = 1; m <= M; ++m)
      for (int n = 0; n <= N; ++n) {
        const int b = static_cast<int>(std::sqrt(4.0 * m * n + 1.0));
        for (int l = -b; l <= b; ++l) {
          const int D = 4 * m * n - l * l;
          if (D < -1) continue;
          auto lo = tab.k_min(D);
          if (!lo) continue;
          for (int k = *lo; k + M * n <= Kt; ++k) {
            Rational c = tab.at(D, k);
            if (sgn(c) == 0) continue;
            if (c.get_den() != 1) throw JacobiCheckError("non-integral elliptic genus coefficient");
            right = (right * MultiSeries::one_minus_power(f, {m, n, l, k}, -c.get_num().get_si(), 1, f->cutoffs))
                        .truncate(f->cutoffs);
          }
        }
      }
  } catch (const UnknownCoefficient& e) {
    rep.detail = e.what();
    return rep;
  }
  if (!box_known(left, box) || !box_known(right, box)) {
    rep.detail = "t-window " + std::to_string(Kt) + " does not cover |k| <= " + std::to_string(K) + " at q^" +
                 std::to_string(N) + " (needs " + std::to_string(K + M * N) + ")";
    return rep;
  }
  rep.sufficient = true;
  rep.compared = static_cast<std::size_t>(M + 1) * (N + 1) * (2 * L + 1) * (2 * K + 1);
  auto mm = compare_box(left, right, box);
  rep.equal = !mm;
  if (mm) rep.detail = mm->describe(*f);
  return rep;
}

}  // namespace ban
