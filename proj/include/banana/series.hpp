// Sparse truncated Laurent series in a few named variables over Q.
//
// Truncation is described by an ordered list of linear gradings on the
// (scaled) exponent lattice.  Grading i carries weights w_i, a cutoff W_i and a
// lower bound v_i.  The known region of a series is
//     K = { e : w_i.e <= W_i for every i },
// and the stored terms are exactly the true support inside K.  v_i bounds
// w_i.e from below on the true support intersected with {w_j.e <= W_j, j < i};
// cutoffs of products are derived from these bounds.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ban {

using Rational = mpq_class;
using Integer = mpz_class;
using Exps = std::vector<int>;

inline constexpr std::int64_t kInf = std::int64_t{1} << 60;
inline constexpr int kMaxVars = 5;
inline constexpr int kMaxExp = 1000;

struct SeriesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IncompatibleVariables : SeriesError {
  IncompatibleVariables() : SeriesError("incompatible variable lists") {}
  using SeriesError::SeriesError;
};
struct UnknownCoefficient : SeriesError {
  using SeriesError::SeriesError;
};
struct WindowOverflow : SeriesError {
  using SeriesError::SeriesError;
};
struct NotInvertible : SeriesError {
  NotInvertible() : SeriesError("not invertible in chamber") {}
};
struct NonRealSubstitution : SeriesError {
  NonRealSubstitution() : SeriesError("non-real substitution") {}
};
struct DomainError : SeriesError {
  using SeriesError::SeriesError;
};

std::int64_t sat_add(std::int64_t a, std::int64_t b);

struct VarSpec {
  std::string name;
  int den = 1;
  bool operator==(const VarSpec&) const = default;
};

struct Frame {
  std::vector<VarSpec> vars;
  std::vector<std::vector<int>> weights;
  std::vector<std::int64_t> cutoffs;  // defaults for constructors and inversion

  int nvars() const { return static_cast<int>(vars.size()); }
  int ngrad() const { return static_cast<int>(weights.size()); }
  int index(const std::string& name) const;  // -1 if absent
  std::int64_t weigh(int g, const Exps& e) const;
  bool same_layout(const Frame& o) const { return vars == o.vars && weights == o.weights; }
};
using FramePtr = std::shared_ptr<const Frame>;

FramePtr make_frame(std::vector<VarSpec> vars, std::vector<std::vector<int>> weights,
                    std::vector<std::int64_t> cutoffs);

// Closed box in scaled exponents, one [lo, hi] per variable.
using Box = std::vector<std::pair<int, int>>;

class MultiSeries {
 public:
  struct Term {
    std::uint64_t key;
    Rational c;
  };

  MultiSeries() = default;
  explicit MultiSeries(FramePtr f);  // exact zero

  static MultiSeries constant(FramePtr f, const Rational& c);
  static MultiSeries monomial(FramePtr f, const Exps& e, const Rational& c = 1);
  // Exact Laurent polynomial.
  static MultiSeries polynomial(FramePtr f, const std::vector<std::pair<Exps, Rational>>& terms);
  // Caller guarantees: terms = true support within the cutoff region, vals are valid bounds.
  static MultiSeries from_terms(FramePtr f, const std::vector<std::pair<Exps, Rational>>& terms,
                                std::vector<std::int64_t> cutoffs, std::vector<std::int64_t> vals);
  // (1 - c*m)^e.  For e >= 0 an exact polynomial, unless cutoffs are given and bound
  // the powers of m below e; otherwise the binomial series is kept up to the
  // grading that bounds the powers of m.
  static MultiSeries one_minus_power(FramePtr f, const Exps& m, long e, const Rational& c = 1,
                                     std::optional<std::vector<std::int64_t>> cutoffs = {});

  // sum_{j >= j0} coeff(j) m^j, kept up to the first grading (in order) that bounds
  // the powers of m under `cutoffs` (frame defaults if omitted).
  static MultiSeries monomial_series(FramePtr f, const Exps& m, const std::function<Rational(long)>& coeff,
                                     long j0, std::optional<std::vector<std::int64_t>> cutoffs = {});

  const Frame& frame() const { return *frame_; }
  const FramePtr& frame_ptr() const { return frame_; }
  bool valid() const { return static_cast<bool>(frame_); }
  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& raw_terms() const { return terms_; }
  const std::vector<std::int64_t>& cutoffs() const { return cut_; }
  const std::vector<std::int64_t>& vals() const { return val_; }
  bool exact() const;

  bool is_known(const Exps& e) const;
  Rational coefficient(const Exps& e) const;  // throws UnknownCoefficient outside K
  const Rational& zeta3() const { return z3_; }
  MultiSeries with_zeta3(const Rational& z) const;

  Exps exps_of(std::uint64_t key) const;
  std::uint64_t key_of(const Exps& e) const;
  std::vector<std::pair<Exps, Rational>> terms() const;
  template <class F>
  void for_each(F&& f) const {
    for (const auto& t : terms_) f(exps_of(t.key), t.c);
  }

  // Smaller region (elementwise min with the given cutoffs).
  MultiSeries truncate(const std::vector<std::int64_t>& cutoffs) const;
  // Lower bounds recomputed from the stored support: valid when the series is exact.
  std::int64_t support_min(int g) const;
  // Hull of the stored exponents per variable; empty optional if no terms.
  std::optional<Box> hull() const;

  MultiSeries operator-() const;
  MultiSeries& operator+=(const MultiSeries& o);
  MultiSeries& operator-=(const MultiSeries& o);
  MultiSeries& operator*=(const MultiSeries& o);
  MultiSeries& operator*=(const Rational& c);

  friend MultiSeries operator+(MultiSeries a, const MultiSeries& b) { return a += b; }
  friend MultiSeries operator-(MultiSeries a, const MultiSeries& b) { return a -= b; }
  friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b);
  friend MultiSeries operator*(MultiSeries a, const Rational& c) { return a *= c; }
  friend MultiSeries operator*(const Rational& c, MultiSeries a) { return a *= c; }

  // Internal constructor used by the algorithms.
  static MultiSeries raw(FramePtr f, std::vector<Term> terms, std::vector<std::int64_t> cut,
                         std::vector<std::int64_t> val, Rational z3 = 0);

 private:
  FramePtr frame_;
  std::vector<Term> terms_;  // sorted by key (lexicographic in frame variable order)
  std::vector<std::int64_t> cut_, val_;
  Rational z3_ = 0;

  void drop_outside();
};

MultiSeries add(const MultiSeries& a, const MultiSeries& b);
MultiSeries mul(const MultiSeries& a, const MultiSeries& b);
MultiSeries shift(const MultiSeries& a, const Exps& m, const Rational& c = 1);
MultiSeries power(const MultiSeries& a, int n);
MultiSeries invert_unit(const MultiSeries& a,
                        std::optional<std::vector<std::int64_t>> cutoffs = {});
MultiSeries divide(const MultiSeries& a, const MultiSeries& b);
MultiSeries exp_series(const MultiSeries& a,
                       std::optional<std::vector<std::int64_t>> cutoffs = {});
MultiSeries log_series(const MultiSeries& a);

// (v d/dv)^r applied termwise (true exponents, so scaled exponent / den).
MultiSeries euler_derivative(const MultiSeries& a, const std::string& var, int r);

// Variables are matched by name; the new series lives in `target`.
MultiSeries embed(const MultiSeries& a, FramePtr target);

// Each source variable maps to a monomial in the target variables (scaled exponents
// of the target frame, per unit true exponent of the source variable).  The map must
// be invertible; gradings are transported so the known region is mapped exactly.
MultiSeries substitute_monomial(const MultiSeries& a, const std::vector<VarSpec>& target_vars,
                                const std::vector<Exps>& images);

// var -> exp(i*lambda), expanded to lambda^order; var must be exact in a.
MultiSeries substitute_exponential(const MultiSeries& a, const std::string& var,
                                   const std::string& target, int order);

// Set var = 1 (sum over its exponent); var must be exact in a.
MultiSeries specialize_one(const MultiSeries& a, const std::string& var);

// Coefficient comparison over a box; every box point must be known in both series
// (otherwise UnknownCoefficient).  Variable lists must agree by name and denominator.
struct Mismatch {
  Exps exps;
  Rational lhs, rhs;
  std::string describe(const Frame& f) const;
};
std::optional<Mismatch> compare_box(const MultiSeries& a, const MultiSeries& b, const Box& box);
// Comparison over every stored term of either series lying in both known regions.
std::optional<Mismatch> compare_shared(const MultiSeries& a, const MultiSeries& b);
bool box_known(const MultiSeries& a, const Box& box);

std::string format_monomial(const Frame& f, const Exps& e);
std::string to_string(const MultiSeries& a, std::size_t max_terms = 40);

// Serialization (JSON text).
std::string to_json(const MultiSeries& a, int indent = 1);
MultiSeries from_json(const std::string& text);

}  // namespace ban
