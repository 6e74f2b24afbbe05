#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "semikex/semiring.hpp"

// Inner loops of semiring matrix arithmetic. Every kernel exists as a scalar
// reference and, where the CPU allows, a SIMD variant chosen at runtime. The
// variants must agree bit-for-bit; tests compare them directly.
namespace semikex::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

// Lookup tables borrowed from a SemiringTable.
struct TableView {
  const ElementId* add;
  const ElementId* mul;
  const std::int32_t* add_wide;
  const std::int32_t* mul_wide;
  std::size_t size;
  std::optional<ElementId> zero;

  static TableView of(const SemiringTable& t);
};

// c[j] = c[j] + a * b[j] for j < len.
using MulAccumulateFn = void (*)(const TableView&, ElementId* c, const ElementId* b,
                                 ElementId a, std::size_t len);
// out[j] = x[j] + y[j] for j < len.
using AddFn = void (*)(const TableView&, ElementId* out, const ElementId* x, const ElementId* y,
                       std::size_t len);

void mul_accumulate_scalar(const TableView& t, ElementId* c, const ElementId* b, ElementId a,
                           std::size_t len);
void add_scalar(const TableView& t, ElementId* out, const ElementId* x, const ElementId* y,
                std::size_t len);

#if defined(SEMIKEX_HAVE_AVX2_KERNEL) || defined(SEMIKEX_DECLARE_AVX2)
void mul_accumulate_avx2(const TableView& t, ElementId* c, const ElementId* b, ElementId a,
                         std::size_t len);
void add_avx2(const TableView& t, ElementId* out, const ElementId* x, const ElementId* y,
              std::size_t len);
#endif

// Whether the given variant is compiled in and supported by this CPU.
bool available(Isa isa);

// Active variant. Defaults to the widest available; the environment variable
// SEMIKEX_ISA=scalar forces the reference path.
Isa active();
void set_active(Isa isa);  // throws Error if unavailable

/// Row-major dim x dim product C = A * B. Each entry is summed left to right
/// over k. C must not alias A or B.
void matmul(const TableView& t, const ElementId* a, const ElementId* b, ElementId* c,
            std::size_t dim, Isa isa);
inline void matmul(const TableView& t, const ElementId* a, const ElementId* b, ElementId* c,
                   std::size_t dim) {
  matmul(t, a, b, c, dim, active());
}

void add(const TableView& t, const ElementId* x, const ElementId* y, ElementId* out,
         std::size_t len, Isa isa);
inline void add(const TableView& t, const ElementId* x, const ElementId* y, ElementId* out,
                std::size_t len) {
  add(t, x, y, out, len, active());
}

}  // namespace semikex::kernels
