#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "semikex/bytes.hpp"
#include "semikex/matrix.hpp"
#include "semikex/rng.hpp"

namespace semikex {

/// Circulant matrix over the naturals, stored as its first column c_0..c_{n-1}.
/// Entry (i, j) of the full matrix is c[(i - j) mod n].
class CirculantNat {
 public:
  explicit CirculantNat(std::vector<std::uint64_t> coeffs);

  static CirculantNat identity(std::size_t n);

  std::size_t n() const { return c_.size(); }
  std::uint64_t operator[](std::size_t k) const { return c_[k]; }
  const std::vector<std::uint64_t>& coeffs() const { return c_; }
  bool is_zero() const;
  std::uint64_t max_entry() const;

  bool operator==(const CirculantNat&) const = default;
  auto operator<=>(const CirculantNat&) const = default;

 private:
  std::vector<std::uint64_t> c_;
};

// c_k = sum_i a_i * b_{(k-i) mod n}; throws OverflowError past 2^64 - 1.
CirculantNat circ_mul(const CirculantNat& a, const CirculantNat& b);

/// n pairwise-commuting matrices over one table and dimension.
class CommutingVector {
 public:
  // Verifies shape and pairwise commutation; throws Error otherwise.
  static CommutingVector make(std::vector<MatrixSR> mats);
  // Shape check only. For values produced by operations that preserve
  // commutation (circ_act, decoders of trusted data).
  static CommutingVector unchecked(std::vector<MatrixSR> mats);

  std::size_t size() const { return mats_.size(); }
  const MatrixSR& operator[](std::size_t i) const { return mats_[i]; }
  const std::vector<MatrixSR>& mats() const { return mats_; }
  std::size_t dim() const { return mats_.front().dim(); }
  const TablePtr& table_ptr() const { return mats_.front().table_ptr(); }

  bool pairwise_commuting() const;

  bool operator==(const CommutingVector& o) const { return mats_ == o.mats_; }

 private:
  explicit CommutingVector(std::vector<MatrixSR> mats);
  std::vector<MatrixSR> mats_;
};

/// result[i] = prod_j v[j]^{c[(i-j) mod n]}.
///
/// All factors commute, so the evaluation order does not affect the value.
/// Implementation: per base, a table of v_j^(d * 16^t) for 4-bit digits d is
/// built once; each output multiplies in one table entry per nonzero digit.
CommutingVector circ_act(const CirculantNat& c, const CommutingVector& v);

// Determinant of the full n x n integer circulant (Bareiss elimination).
boost::multiprecision::cpp_int circ_det_int(const CirculantNat& a);

// Entries uniform on [0, bound]; the all-zero vector is resampled.
// Throws Error("degenerate bound") for bound = 0.
CirculantNat circ_random(std::size_t n, std::uint64_t bound, Rng& rng);

// n (2-byte BE) then n entries as 8-byte BE.
void encode_circulant(Bytes& out, const CirculantNat& c);
CirculantNat decode_circulant(ByteReader& in);

}  // namespace semikex
