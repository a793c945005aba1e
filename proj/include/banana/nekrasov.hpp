// Localization over Young-diagram fixed points: equivariant volumes, Euler
// characteristics and rank-one elliptic genera of framed instanton moduli.
#pragma once

#include <random>

#include "banana/ellgen.hpp"

namespace ban {

// Weakly decreasing positive parts.  Boxes are (i, j), 1-based: row i, column j.
struct Partition {
  std::vector<int> parts;
  int size() const;
  int row(int i) const;     // length of row i (0 beyond the diagram)
  int column(int j) const;  // length of column j
  bool contains(int i, int j) const;
  bool operator==(const Partition&) const = default;
};
using PartitionTuple = std::vector<Partition>;

std::vector<Partition> partitions(int k);
std::vector<PartitionTuple> partition_tuples(int r, int k);

// Arm and leg of box s relative to Y: may be negative when s is outside Y.
int arm(const Partition& Y, int i, int j);
int leg(const Partition& Y, int i, int j);
// Hook length of a box of Y; throws DomainError if (i, j) is not in Y.
int hook(const Partition& Y, int i, int j);

struct EquivariantWeight {
  Rational eps1, eps2;
  std::vector<Rational> a;
};

struct NonRegularWeight : SeriesError {
  NonRegularWeight() : SeriesError("tangent weight vanishes at this point") {}
};

// Tangent weights at the fixed point; there are 2 r k of them.
std::vector<Rational> tangent_weights(const PartitionTuple& Y, const EquivariantWeight& w);
Rational euler_class_at(const PartitionTuple& Y, const EquivariantWeight& w);

// Random rational weight at which every tangent weight of every fixed point with
// total size <= K is nonzero.
EquivariantWeight random_regular_weight(int r, int K, std::mt19937_64& rng);

// Coefficients of Q^0..Q^K.
std::vector<Rational> volume_partition_function(int r, int K, const EquivariantWeight& w);
ModularQSeries euler_char_partition_function(int r, int K);

// Rows "tuple,numerator,denominator" of 1/e(T) per fixed point with total size k.
std::string fixed_point_csv(int r, int k, const EquivariantWeight& w);

// (q, y, t) frame: q <= N and t + alpha q <= K.
FramePtr hilb_frame(int N, int K, int alpha);
// Ell(Hilb^m(C^2); t) in the diagonal specialization, in hilb_frame(N, K, alpha).
MultiSeries hilb_ell_genus(int m, int N, int K, int alpha);

struct DmvvReport {
  bool sufficient = false;  // every box coefficient known on both sides
  bool equal = false;
  std::string detail;       // first mismatch or the unknown coefficient
  std::size_t compared = 0;
};
// sum_{m <= M} Q^m Ell(Hilb^m) against prod_{m >= 1} (1 - Q^m q^n y^l t^k)^{-c(4nm - l^2, k)}
// on Q <= M, q <= N, |l| <= L, |k| <= K, both sides built with t + M q <= Kt.
DmvvReport dmvv_check(int M, int N, int L, int K, int Kt);

}  // namespace ban
