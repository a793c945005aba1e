// One-variable modular objects in q.
#pragma once

#include "banana/series.hpp"

namespace ban {

struct ModularQSeries {
  MultiSeries series;
  int weight = 0;
};

Rational bernoulli(int n);
Integer divisor_sigma(int k, long n);

// Frame with the single variable q and default cutoff N.
FramePtr q_frame(int N);

ModularQSeries eisenstein(int k, int N);
ModularQSeries delta(int N);
inline ModularQSeries eta24(int N) { return delta(N); }
ModularQSeries macmahon(int N);

// prod_{n>=1} (1 - m^n)^{-n} in an arbitrary frame.
MultiSeries macmahon_in(FramePtr f, const Exps& m);

// Li_a(m) = sum_{r>=1} r^{-a} m^r, kept to the first grading bounding powers of m.
MultiSeries polylog_monomial(FramePtr f, int a, const Exps& m,
                             std::optional<std::vector<std::int64_t>> cutoffs = {});

}  // namespace ban
