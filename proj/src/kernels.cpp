#include "semikex/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "semikex/error.hpp"

namespace semikex::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(SEMIKEX_HAVE_AVX2_KERNEL) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("SEMIKEX_ISA"); env && std::string(env) == "scalar") {
    return Isa::Scalar;
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{initial_isa()};
  return slot;
}

MulAccumulateFn mul_accumulate_for(Isa isa) {
#if defined(SEMIKEX_HAVE_AVX2_KERNEL)
  if (isa == Isa::Avx2) return mul_accumulate_avx2;
#endif
  (void)isa;
  return mul_accumulate_scalar;
}

AddFn add_for(Isa isa) {
#if defined(SEMIKEX_HAVE_AVX2_KERNEL)
  if (isa == Isa::Avx2) return add_avx2;
#endif
  (void)isa;
  return add_scalar;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

TableView TableView::of(const SemiringTable& t) {
  return TableView{t.add_table().data(), t.mul_table().data(), t.add_table_wide().data(),
                   t.mul_table_wide().data(), t.size(), t.zero()};
}

bool available(Isa isa) { return isa == Isa::Scalar || cpu_has_avx2(); }

Isa active() { return active_slot().load(std::memory_order_relaxed); }

void set_active(Isa isa) {
  if (!available(isa)) throw Error(std::string("kernel variant unavailable: ") + std::string(isa_name(isa)));
  active_slot().store(isa, std::memory_order_relaxed);
}

void matmul(const TableView& t, const ElementId* a, const ElementId* b, ElementId* c,
            std::size_t dim, Isa isa) {
  if (!available(isa)) isa = Isa::Scalar;
  const MulAccumulateFn acc = mul_accumulate_for(isa);
  for (std::size_t i = 0; i < dim; ++i) {
    ElementId* c_row = c + i * dim;
    const ElementId* a_row = a + i * dim;
    std::size_t k = 0;
    if (t.zero) {
      // zero is additively neutral and multiplicatively absorbing, so zero
      // terms can be dropped without changing any left-to-right sum.
      std::memset(c_row, *t.zero, dim);
    } else {
      const ElementId* mul_row = t.mul + static_cast<std::size_t>(a_row[0]) * t.size;
      for (std::size_t j = 0; j < dim; ++j) c_row[j] = mul_row[b[j]];
      k = 1;
    }
    for (; k < dim; ++k) {
      if (t.zero && a_row[k] == *t.zero) continue;
      acc(t, c_row, b + k * dim, a_row[k], dim);
    }
  }
}

void add(const TableView& t, const ElementId* x, const ElementId* y, ElementId* out,
         std::size_t len, Isa isa) {
  if (!available(isa)) isa = Isa::Scalar;
  add_for(isa)(t, out, x, y, len);
}

}  // namespace semikex::kernels
