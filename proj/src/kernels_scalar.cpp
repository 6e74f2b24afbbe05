#include "semikex/kernels.hpp"

namespace semikex::kernels {

void mul_accumulate_scalar(const TableView& t, ElementId* c, const ElementId* b, ElementId a,
                           std::size_t len) {
  const ElementId* mul_row = t.mul + static_cast<std::size_t>(a) * t.size;
  for (std::size_t j = 0; j < len; ++j) {
    c[j] = t.add[static_cast<std::size_t>(c[j]) * t.size + mul_row[b[j]]];
  }
}

void add_scalar(const TableView& t, ElementId* out, const ElementId* x, const ElementId* y,
                std::size_t len) {
  for (std::size_t j = 0; j < len; ++j) {
    out[j] = t.add[static_cast<std::size_t>(x[j]) * t.size + y[j]];
  }
}

}  // namespace semikex::kernels
