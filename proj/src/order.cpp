#include "semikex/matrix.hpp"

namespace semikex {

namespace {

struct Tracked {
  MatrixSR m;
  std::uint64_t h;
  explicit Tracked(MatrixSR x) : m(std::move(x)), h(m.hash()) {}
  bool operator==(const Tracked& o) const { return h == o.h && m == o.m; }
};

}  // namespace

OrderProfile order_profile(const MatrixSR& a, std::uint64_t cap) {
  auto step = [&](const Tracked& x) { return Tracked(mat_mul(x.m, a)); };

  // Brent, phase 1: the tortoise waits at index power-1 while the hare walks
  // up to `power` steps ahead. A completed phase with no meeting proves
  // preperiod >= power or period > power, hence distinct powers >= power + 1.
  std::uint64_t power = 1, lam = 1;
  Tracked tortoise(a);
  Tracked hare = step(tortoise);
  while (!(tortoise == hare)) {
    if (power == lam) {
      if (power >= cap) {
        OrderProfile lower;
        lower.distinct_powers = power + 1;
        return lower;
      }
      tortoise = hare;
      power *= 2;
      lam = 0;
    }
    hare = step(hare);
    ++lam;
  }

  // Phase 2: tail length. Walk two pointers lam apart from A^1 until they meet.
  Tracked slow(a);
  Tracked fast(a);
  for (std::uint64_t i = 0; i < lam; ++i) fast = step(fast);
  std::uint64_t mu = 0;
  while (!(slow == fast)) {
    slow = step(slow);
    fast = step(fast);
    ++mu;
  }

  OrderProfile p;
  p.exact = true;
  p.preperiod = mu;
  p.period = lam;
  p.distinct_powers = mu + lam;
  p.ord_first_repeat = p.distinct_powers + 1;
  return p;
}

}  // namespace semikex
