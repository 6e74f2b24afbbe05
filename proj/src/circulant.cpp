#include "semikex/circulant.hpp"

#include <algorithm>
#include <bit>
#include <optional>

#include "semikex/error.hpp"

namespace semikex {

using boost::multiprecision::cpp_int;

CirculantNat::CirculantNat(std::vector<std::uint64_t> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) throw Error("circulant size must be positive");
  if (c_.size() > 0xFFFF) throw Error("circulant size exceeds 65535");
}

CirculantNat CirculantNat::identity(std::size_t n) {
  std::vector<std::uint64_t> c(n, 0);
  if (n) c[0] = 1;
  return CirculantNat(std::move(c));
}

bool CirculantNat::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](auto x) { return x == 0; });
}

std::uint64_t CirculantNat::max_entry() const { return *std::max_element(c_.begin(), c_.end()); }

CirculantNat circ_mul(const CirculantNat& a, const CirculantNat& b) {
  const std::size_t n = a.n();
  if (b.n() != n) throw Error("circulant size mismatch");
  std::vector<std::uint64_t> c(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t term = 0;
      if (__builtin_mul_overflow(a[i], b[(k + n - i) % n], &term) ||
          __builtin_add_overflow(sum, term, &sum)) {
        throw OverflowError("circulant product overflows 64-bit entries");
      }
    }
    c[k] = sum;
  }
  return CirculantNat(std::move(c));
}

CommutingVector::CommutingVector(std::vector<MatrixSR> mats) : mats_(std::move(mats)) {
  if (mats_.empty()) throw Error("commuting vector must be nonempty");
  if (mats_.size() > 0xFFFF) throw Error("commuting vector longer than 65535");
  for (const auto& m : mats_) {
    if (m.dim() != mats_.front().dim()) throw Error("commuting vector: dimension mismatch");
    if (!(m.table() == mats_.front().table())) throw Error("commuting vector: semiring mismatch");
  }
}

CommutingVector CommutingVector::make(std::vector<MatrixSR> mats) {
  CommutingVector v(std::move(mats));
  if (!v.pairwise_commuting()) throw Error("commuting vector: entries do not commute");
  return v;
}

CommutingVector CommutingVector::unchecked(std::vector<MatrixSR> mats) {
  return CommutingVector(std::move(mats));
}

bool CommutingVector::pairwise_commuting() const {
  for (std::size_t i = 0; i < mats_.size(); ++i) {
    for (std::size_t j = i + 1; j < mats_.size(); ++j) {
      if (!commutes(mats_[i], mats_[j])) return false;
    }
  }
  return true;
}

CommutingVector circ_act(const CirculantNat& c, const CommutingVector& v) {
  const std::size_t n = c.n();
  if (v.size() != n) {
    throw Error("circ_act: circulant size " + std::to_string(n) + " vs vector length " +
                std::to_string(v.size()));
  }
  constexpr unsigned kWindow = 4;
  constexpr std::uint64_t kDigits = (1u << kWindow) - 1;
  const std::uint64_t top = c.max_entry();
  const unsigned windows = (static_cast<unsigned>(std::bit_width(top)) + kWindow - 1) / kWindow;

  // digits[j][t][d - 1] = v[j]^(d * 16^t), d up to the largest digit used in window t.
  std::vector<std::vector<std::vector<MatrixSR>>> digits(n);
  for (std::size_t j = 0; j < n; ++j) {
    digits[j].resize(windows);
    for (unsigned t = 0; t < windows; ++t) {
      const std::uint64_t max_digit = std::min(kDigits, top >> (kWindow * t));
      auto& row = digits[j][t];
      row.reserve(max_digit);
      row.push_back(t == 0 ? v[j] : mat_mul(digits[j][t - 1].back(), digits[j][t - 1].front()));
      for (std::uint64_t d = 2; d <= max_digit; ++d) row.push_back(mat_mul(row.back(), row.front()));
    }
  }

  std::vector<MatrixSR> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<MatrixSR> acc;
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint64_t e = c[(i + n - j) % n];
      for (unsigned t = 0; t < windows; ++t) {
        const std::uint64_t d = (e >> (kWindow * t)) & kDigits;
        if (d == 0) continue;
        const MatrixSR& f = digits[j][t][d - 1];
        acc = acc ? mat_mul(*acc, f) : f;
      }
    }
    out.push_back(acc ? std::move(*acc) : MatrixSR::identity(v.table_ptr(), v.dim()));
  }
  return CommutingVector::unchecked(std::move(out));
}

cpp_int circ_det_int(const CirculantNat& a) {
  const std::size_t n = a.n();
  std::vector<std::vector<cpp_int>> m(n, std::vector<cpp_int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = cpp_int(a[(i + n - j) % n]);
  }

  int sign = 1;
  cpp_int prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        // Exact division: Bareiss invariant.
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

CirculantNat circ_random(std::size_t n, std::uint64_t bound, Rng& rng) {
  if (n == 0) throw Error("circulant size must be positive");
  if (bound == 0) throw Error("degenerate bound");
  std::vector<std::uint64_t> c(n);
  do {
    for (auto& x : c) x = rng.uniform(0, bound);
  } while (std::all_of(c.begin(), c.end(), [](auto x) { return x == 0; }));
  return CirculantNat(std::move(c));
}

void encode_circulant(Bytes& out, const CirculantNat& c) {
  put_u16(out, static_cast<std::uint16_t>(c.n()));
  for (auto x : c.coeffs()) put_u64(out, x);
}

CirculantNat decode_circulant(ByteReader& in) {
  std::size_t n = in.u16();
  if (n == 0) throw ParseError("circulant size is zero");
  std::vector<std::uint64_t> c(n);
  for (auto& x : c) x = in.u64();
  return CirculantNat(std::move(c));
}

}  // namespace semikex
