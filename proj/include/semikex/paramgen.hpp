#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semikex/bytes.hpp"
#include "semikex/circulant.hpp"
#include "semikex/matrix.hpp"
#include "semikex/rng.hpp"
#include "semikex/semiring.hpp"

namespace semikex {

inline constexpr std::size_t kPartitionDpLimit = 64;

struct Partition {
  std::vector<std::size_t> parts;  // cycle lengths, ascending
  std::size_t padding = 0;         // trailing identity block size

  std::size_t total() const;
  std::uint64_t lcm() const;
  bool operator==(const Partition&) const = default;
};

/// Partition of at most `total` into parts maximizing their lcm (Landau's g),
/// found by a DP over prime powers. Unused mass becomes padding.
/// total = 1 gives parts [1]. Throws Error for total = 0 or total > 64.
Partition best_partition(std::size_t total);

struct LandauBounds {
  double lower_ln;
  double upper_ln;
};

// Closed-form bracket for ln g(total):
//   lower_ln = total * ln(total)
//   upper_ln = sqrt(total) * ln(total) * (1 + ln ln(total) / (2 ln(total)))
// The lower value is reported as written in the literature it comes from; it
// is not a valid lower bound for large totals. Throws Error for total < 3.
LandauBounds landau_bounds(std::size_t total);

/// Block-diagonal matrix of cycle blocks T_a (one at (i, i+1 mod a) within the
/// block) followed by a padding x padding identity.
MatrixSR base_block_matrix(const Partition& p, TablePtr table);

// Block index of each row/column; the padding forms one final block.
std::vector<std::size_t> block_of_index(const Partition& p);

inline constexpr double kDefaultDensity = 0.25;

/// Each entry strictly above the block diagonal is replaced, with probability
/// `density`, by a uniform nonzero element. Requires zeros below the block
/// diagonal and a matching dimension.
MatrixSR randomize_upper_blocks(const MatrixSR& a, const Partition& p, double density, Rng& rng);

/// Fisher-Yates permutation; units uniform over the invertible elements.
GeneralizedPermutation random_generalized_permutation(std::size_t dim, const SemiringTable& table,
                                                      Rng& rng);

struct MatrixProvenance {
  Partition partition;
  std::uint64_t seed = 0;
  double density = 0;
  GeneralizedPermutation gp;
  std::uint64_t certified_lower_bound = 0;  // lcm(parts)
  std::optional<OrderProfile> measured;     // set when measurement was attempted
};

struct PublicMatrix {
  MatrixSR m;
  MatrixProvenance provenance;
};

inline constexpr std::uint64_t kDefaultMeasureCap = 10'000;

/// best_partition -> base_block_matrix -> randomize_upper_blocks -> conjugate
/// by a random generalized permutation. The order is measured when
/// lcm(parts) <= measure_cap; a measured order below lcm(parts) is an Error.
PublicMatrix build_public_matrix(std::size_t total, TablePtr table, double density, Rng& rng,
                                 std::uint64_t measure_cap = kDefaultMeasureCap);

// Coefficient of x^k at index k, each an element of the table's center.
using Polynomial = std::vector<ElementId>;

// Horner evaluation; runs of zero coefficients are skipped with one mat_pow.
MatrixSR eval_polynomial(const Polynomial& p, const MatrixSR& m);

struct CommutingBuild {
  CommutingVector v;
  std::vector<Polynomial> polynomials;
};

inline constexpr std::size_t kDefaultDegree = 3;

/// v[i] = p_i(M), deg p_i <= max_degree, coefficients uniform over the center
/// with at least two nonzero terms each. Throws Error if the center has no
/// nonzero element or max_degree = 0.
CommutingBuild build_commuting_vector(const MatrixSR& m, std::size_t n, std::size_t max_degree,
                                      Rng& rng);

// Evaluates the given polynomials; checks centrality of every coefficient and
// that the results commute with M and with each other.
CommutingVector commuting_vector_from_polynomials(const MatrixSR& m,
                                                  const std::vector<Polynomial>& polys);

// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kDefaultEntryBound = 1u << 16;
inline constexpr std::size_t kDefaultVectorLength = 16;

struct PublicParams {
  TablePtr table;
  MatrixSR m;
  CommutingVector v;
  std::uint64_t entry_bound = kDefaultEntryBound;

  std::size_t dim() const { return m.dim(); }
  std::size_t n() const { return v.size(); }
};

// "SKXP" 0x01 | table digest (32) | dim u16 | n u16 | entry_bound u64 | M | v[0..n)
Bytes encode_params(const PublicParams& p);
// Resolves the table digest through `registry`; validates shapes and that v
// commutes with M and within itself.
PublicParams decode_params(std::span<const std::uint8_t> data, const TableRegistry& registry);
Digest params_hash(const PublicParams& p);

struct ParamsConfig {
  std::size_t total = 20;
  std::size_t n = kDefaultVectorLength;
  std::uint64_t entry_bound = kDefaultEntryBound;
  std::uint64_t seed = 0;
  std::size_t max_degree = kDefaultDegree;
  double density = kDefaultDensity;
  TablePtr table;  // null selects the built-in 20-element table
};

struct GeneratedParams {
  PublicParams params;
  MatrixProvenance provenance;
  std::vector<Polynomial> polynomials;
};

GeneratedParams generate_params(const ParamsConfig& cfg);

}  // namespace semikex
