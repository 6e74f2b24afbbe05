// Built with -mavx2; only reached after a runtime CPU check.
#define SEMIKEX_DECLARE_AVX2 1
#include "semikex/kernels.hpp"

#include <immintrin.h>

namespace semikex::kernels {

namespace {

// Eight bytes -> eight int32 lanes.
inline __m256i load8(const ElementId* p) {
  return _mm256_cvtepu8_epi32(_mm_loadl_epi64(reinterpret_cast<const __m128i*>(p)));
}

// Eight int32 lanes (each < 256) -> eight bytes.
inline void store8(ElementId* p, __m256i v) {
  __m128i lo = _mm256_castsi256_si128(v);
  __m128i hi = _mm256_extracti128_si256(v, 1);
  __m128i w16 = _mm_packus_epi32(lo, hi);
  __m128i w8 = _mm_packus_epi16(w16, w16);
  _mm_storel_epi64(reinterpret_cast<__m128i*>(p), w8);
}

}  // namespace

void mul_accumulate_avx2(const TableView& t, ElementId* c, const ElementId* b, ElementId a,
                         std::size_t len) {
  const __m256i stride = _mm256_set1_epi32(static_cast<int>(t.size));
  const std::int32_t* mul_row = t.mul_wide + static_cast<std::size_t>(a) * t.size;
  std::size_t j = 0;
  for (; j + 8 <= len; j += 8) {
    __m256i prod = _mm256_i32gather_epi32(mul_row, load8(b + j), 4);
    __m256i idx = _mm256_add_epi32(_mm256_mullo_epi32(load8(c + j), stride), prod);
    store8(c + j, _mm256_i32gather_epi32(t.add_wide, idx, 4));
  }
  if (j < len) mul_accumulate_scalar(t, c + j, b + j, a, len - j);
}

void add_avx2(const TableView& t, ElementId* out, const ElementId* x, const ElementId* y,
              std::size_t len) {
  const __m256i stride = _mm256_set1_epi32(static_cast<int>(t.size));
  std::size_t j = 0;
  for (; j + 8 <= len; j += 8) {
    __m256i idx = _mm256_add_epi32(_mm256_mullo_epi32(load8(x + j), stride), load8(y + j));
    store8(out + j, _mm256_i32gather_epi32(t.add_wide, idx, 4));
  }
  if (j < len) add_scalar(t, out + j, x + j, y + j, len - j);
}

}  // namespace semikex::kernels
