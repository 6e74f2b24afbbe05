#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semikex/bytes.hpp"
#include "semikex/semiring.hpp"

namespace semikex {

/// Square matrix over a SemiringTable, row-major, one byte per entry.
class MatrixSR {
 public:
  /// Every entry set to `fill`.
  MatrixSR(TablePtr table, std::size_t dim, ElementId fill);
  /// Takes dim*dim entries; validates ids against the table.
  MatrixSR(TablePtr table, std::size_t dim, std::vector<ElementId> entries);

  static MatrixSR zeros(TablePtr table, std::size_t dim);     // needs table zero
  static MatrixSR identity(TablePtr table, std::size_t dim);  // needs zero and one

  std::size_t dim() const { return dim_; }
  const SemiringTable& table() const { return *table_; }
  const TablePtr& table_ptr() const { return table_; }

  ElementId at(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, ElementId v);

  std::span<const ElementId> entries() const { return entries_; }
  std::span<ElementId> mutable_entries() { return entries_; }
  std::span<const ElementId> row(std::size_t i) const {
    return std::span(entries_).subspan(i * dim_, dim_);
  }

  // Content hash (entries and dimension). Collisions are possible; equality
  // is always decided by operator==.
  std::uint64_t hash() const;

  // Exact entrywise comparison; matrices over different tables compare
  // equal only if the tables are equal.
  bool operator==(const MatrixSR& other) const;

 private:
  TablePtr table_;
  std::size_t dim_;
  std::vector<ElementId> entries_;
};

MatrixSR mat_add(const MatrixSR& a, const MatrixSR& b);
MatrixSR mat_mul(const MatrixSR& a, const MatrixSR& b);
inline MatrixSR operator+(const MatrixSR& a, const MatrixSR& b) { return mat_add(a, b); }
inline MatrixSR operator*(const MatrixSR& a, const MatrixSR& b) { return mat_mul(a, b); }

// Square-and-multiply; A^0 = I (requires the table to have a one).
MatrixSR mat_pow(const MatrixSR& a, std::uint64_t k);

// Entrywise c * a_ij.
MatrixSR scalar_mul(ElementId c, const MatrixSR& a);

bool commutes(const MatrixSR& a, const MatrixSR& b);

// Canonical encoding: dim (2-byte BE) then dim^2 entry bytes, row-major.
void encode_matrix(Bytes& out, const MatrixSR& a);
Bytes encode_matrix(const MatrixSR& a);
MatrixSR decode_matrix(ByteReader& in, TablePtr table);

// Text form used by fixtures: "matrix <dim>" then dim rows of element names.
std::string format_matrix(const MatrixSR& a);
MatrixSR parse_matrix(std::string_view text, TablePtr table);
MatrixSR load_matrix_file(const std::string& path, TablePtr table);

// ---------------------------------------------------------------------------
// Order of the power sequence A, A^2, A^3, ...

inline constexpr std::uint64_t kDefaultOrderCap = 1'000'000;

struct OrderProfile {
  bool exact = false;
  std::uint64_t preperiod = 0;        // tail length before the cycle
  std::uint64_t period = 0;           // cycle length
  std::uint64_t distinct_powers = 0;  // preperiod + period; a lower bound when !exact
  // Least m with A^k = A^m for some k < m, indexing from A^1. Equals
  // distinct_powers + 1. Zero when !exact.
  std::uint64_t ord_first_repeat = 0;

  bool operator==(const OrderProfile&) const = default;
};

/// Exact preperiod and period via Brent cycle detection. Gives up once more
/// than `cap` distinct powers would be needed and returns exact = false with
/// a certified lower bound in distinct_powers.
OrderProfile order_profile(const MatrixSR& a, std::uint64_t cap = kDefaultOrderCap);

// ---------------------------------------------------------------------------
// Generalized permutation matrices

/// Row i has its single nonzero entry units[i] in column perm[i].
struct GeneralizedPermutation {
  std::vector<std::size_t> perm;
  std::vector<ElementId> units;

  std::size_t dim() const { return perm.size(); }
  bool operator==(const GeneralizedPermutation&) const = default;
};

std::optional<GeneralizedPermutation> is_generalized_permutation(const MatrixSR& a);

// Validates the bijection and the units' invertibility.
MatrixSR to_matrix(const GeneralizedPermutation& p, TablePtr table);
GeneralizedPermutation gp_inverse(const GeneralizedPermutation& p, const SemiringTable& table);

// P * A * P^{-1}
MatrixSR conjugate(const MatrixSR& a, const GeneralizedPermutation& p);

inline constexpr std::uint64_t kDefaultInverseSearchBudget = 1u << 24;

/// Two-sided inverse of A. Generalized permutations are inverted in closed
/// form; anything else by exhaustive search over all size^(dim^2) candidates,
/// which throws BudgetExceeded when that count exceeds `budget`.
std::optional<MatrixSR> invertibility_oracle(const MatrixSR& a,
                                             std::uint64_t budget = kDefaultInverseSearchBudget);

}  // namespace semikex
