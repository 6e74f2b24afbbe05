#include "semikex/attacks.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "semikex/error.hpp"

namespace semikex {

namespace {

constexpr std::uint64_t kPowerTableBytes = 64ull << 20;

using Clock = std::chrono::steady_clock;

}  // namespace

std::uint64_t attack_budget() {
  if (const char* env = std::getenv("SEMIKEX_MAX_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultAttackBudget;
}

std::optional<std::uint64_t> box_size(std::size_t n, std::uint64_t bound) {
  if (bound == UINT64_MAX) return std::nullopt;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (__builtin_mul_overflow(total, bound + 1, &total)) return std::nullopt;
  }
  return total;
}

ActionEvaluator::ActionEvaluator(const CommutingVector& v, std::uint64_t bound)
    : n_(v.size()), bound_(bound), identity_(MatrixSR::identity(v.table_ptr(), v.dim())) {
  const std::uint64_t per_matrix = v.dim() * v.dim();
  tabulated_ = bound < kPowerTableBytes && (bound + 1) * n_ * per_matrix <= kPowerTableBytes;
  table_.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    if (tabulated_) {
      table_[j].reserve(bound + 1);
      table_[j].push_back(identity_);
      for (std::uint64_t e = 1; e <= bound; ++e) table_[j].push_back(mat_mul(table_[j].back(), v[j]));
    } else {
      const unsigned bits = static_cast<unsigned>(std::bit_width(bound));
      table_[j].push_back(v[j]);
      for (unsigned t = 1; t < bits; ++t) table_[j].push_back(mat_mul(table_[j].back(), table_[j].back()));
    }
  }
}

const MatrixSR& ActionEvaluator::power(std::size_t j, std::uint64_t e) const { return table_[j][e]; }

MatrixSR ActionEvaluator::component(std::span<const std::uint64_t> c, std::size_t i) const {
  std::optional<MatrixSR> acc;
  for (std::size_t j = 0; j < n_; ++j) {
    const std::uint64_t e = c[(i + n_ - j) % n_];
    if (e == 0) continue;
    if (e > bound_) throw Error("exponent exceeds evaluator bound");
    if (tabulated_) {
      acc = acc ? mat_mul(*acc, power(j, e)) : power(j, e);
      continue;
    }
    for (unsigned t = 0; (e >> t) != 0; ++t) {
      if ((e >> t) & 1) acc = acc ? mat_mul(*acc, table_[j][t]) : table_[j][t];
    }
  }
  return acc ? std::move(*acc) : identity_;
}

CommutingVector ActionEvaluator::apply(const CirculantNat& c) const {
  if (c.n() != n_) throw Error("circulant size does not match vector length");
  std::vector<MatrixSR> out;
  out.reserve(n_);
  for (std::size_t i = 0; i < n_; ++i) out.push_back(component(c.coeffs(), i));
  return CommutingVector::unchecked(std::move(out));
}

bool ActionEvaluator::matches(std::span<const std::uint64_t> c, const CommutingVector& target) const {
  if (c.size() != n_ || target.size() != n_) throw Error("size mismatch in action comparison");
  for (std::size_t i = 0; i < n_; ++i) {
    if (!(component(c, i) == target[i])) return false;
  }
  return true;
}

AttackReport brute_force_attack(const CommutingVector& v, const PublicKeyMsg& pk, std::uint64_t bound,
                                std::uint64_t budget, unsigned workers) {
  const auto start = Clock::now();
  const std::size_t n = v.size();
  if (pk.vec.size() != n || pk.vec.dim() != v.dim()) throw Error("public key shape does not match v");
  const auto total = box_size(n, bound);
  if (!total || *total > budget) {
    throw BudgetExceeded("brute force over (" + std::to_string(bound) + "+1)^" + std::to_string(n) +
                         " candidates exceeds budget " + std::to_string(budget));
  }

  const ActionEvaluator eval(v, bound);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, *total));

  std::vector<std::vector<CirculantNat>> found(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](unsigned w) {
    try {
      const std::uint64_t lo = *total * w / workers, hi = *total * (w + 1) / workers;
      std::vector<std::uint64_t> c(n);
      std::uint64_t idx = lo;
      for (std::size_t k = n; k-- > 0;) {
        c[k] = idx % (bound + 1);
        idx /= bound + 1;
      }
      for (std::uint64_t i = lo; i < hi; ++i) {
        if (eval.matches(c, pk.vec)) found[w].emplace_back(c);
        for (std::size_t k = n; k-- > 0;) {
          if (++c[k] <= bound) break;
          c[k] = 0;
        }
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  std::vector<std::thread> threads;
  for (unsigned w = 1; w < workers; ++w) threads.emplace_back(run, w);
  run(0);
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  AttackReport r;
  r.tried = *total;
  for (auto& f : found) {
    for (auto& c : f) r.found.push_back(std::move(c));
  }
  r.successes = r.found.size();
  if (!r.found.empty()) r.first_success = r.found.front();
  r.pkey_size = r.successes;
  r.wall_time = Clock::now() - start;
  return r;
}

AttackReport random_attack(const CommutingVector& v, const PublicKeyMsg& pk, std::uint64_t bound,
                           std::uint64_t trials, Rng& rng) {
  const auto start = Clock::now();
  const std::size_t n = v.size();
  if (pk.vec.size() != n || pk.vec.dim() != v.dim()) throw Error("public key shape does not match v");
  AttackReport r;
  if (trials > 0) {
    const ActionEvaluator eval(v, bound);
    std::vector<std::uint64_t> c(n);
    for (std::uint64_t t = 0; t < trials; ++t) {
      for (auto& x : c) x = rng.uniform(0, bound);
      ++r.tried;
      if (eval.matches(c, pk.vec)) {
        ++r.successes;
        if (!r.first_success) r.first_success = CirculantNat(c);
      }
    }
  }
  r.wall_time = Clock::now() - start;
  return r;
}

namespace {

// Odometer over [0, hi]^n, c_0 most significant.
bool next_in_box(std::vector<std::uint64_t>& c, std::uint64_t hi) {
  for (std::size_t k = c.size(); k-- > 0;) {
    if (++c[k] <= hi) return true;
    c[k] = 0;
  }
  return false;
}

bool exponents_within(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                      std::uint64_t limit) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::uint64_t e = 0;
    for (std::size_t j = 0; j < n; ++j) {
      std::uint64_t term = 0;
      if (__builtin_mul_overflow(a[(k + n - j) % n], b[j], &term) || __builtin_add_overflow(e, term, &e)) {
        return false;
      }
    }
    if (e > limit) return false;
  }
  return true;
}

}  // namespace

UniquenessReport uniqueness_experiment(const MatrixSR& m, const UniquenessConfig& cfg, Rng& rng) {
  const OrderProfile prof = order_profile(m, cfg.order_cap);
  if (!prof.exact) throw Error("order of M not determined within cap; hypothesis cannot be checked");
  const std::uint64_t d = prof.distinct_powers;

  UniquenessReport rep;
  rep.mode = cfg.mode;
  rep.hypothesis_respected = cfg.respect_hypothesis;
  rep.distinct_powers = d;

  std::vector<MatrixSR> base;
  std::uint64_t hi = 0;  // coordinate range [0, hi] for candidates X
  std::vector<std::vector<std::uint64_t>> candidates;
  std::vector<std::vector<std::uint64_t>> draws;  // keys A are drawn from here

  if (cfg.mode == UniquenessMode::N1) {
    base.push_back(m);
    hi = cfg.respect_hypothesis ? d - 1 : 2 * d - 1;
    for (std::uint64_t a = 0; a <= hi; ++a) candidates.push_back({a});
    for (std::uint64_t a = cfg.respect_hypothesis ? 0 : d; a <= hi; ++a) draws.push_back({a});
  } else {
    const std::size_t n = cfg.b.size();
    if (n == 0) throw Error("general mode needs a nonempty b");
    if (circ_det_int(CirculantNat(cfg.b)) == 0) throw Error("hypothesis unsatisfiable: det Circ(b) = 0");
    for (auto bj : cfg.b) base.push_back(mat_pow(m, bj));
    hi = d - 1;
    const auto size = box_size(n, hi);
    if (!size || *size > cfg.budget) throw BudgetExceeded("uniqueness box exceeds budget");
    std::vector<std::uint64_t> c(n, 0);
    do {
      if (!cfg.respect_hypothesis || exponents_within(c, cfg.b, d - 1)) candidates.push_back(c);
    } while (next_in_box(c, hi));
    draws = candidates;
  }
  if (draws.empty()) throw Error("hypothesis unsatisfiable for given parameters");

  const CommutingVector v = CommutingVector::make(base);
  const ActionEvaluator eval(v, hi);
  rep.candidates_per_trial = candidates.size();
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    const auto& a = draws[rng.uniform(0, draws.size() - 1)];
    const CommutingVector target = eval.apply(CirculantNat(a));
    bool duplicate = false;
    for (const auto& x : candidates) {
      if (x == a || !eval.matches(x, target)) continue;
      duplicate = true;
      if (rep.counterexamples.size() < 16) rep.counterexamples.push_back({CirculantNat(a), CirculantNat(x)});
    }
    ++rep.trials;
    if (duplicate) ++rep.non_unique_trials;
  }
  return rep;
}

std::string mode_name(UniquenessMode m) { return m == UniquenessMode::N1 ? "n1" : "general"; }

std::string format_circulant(const CirculantNat& c) {
  std::ostringstream os;
  os << "Circ(";
  for (std::size_t i = 0; i < c.n(); ++i) os << (i ? "," : "") << c[i];
  os << ')';
  return os.str();
}

}  // namespace semikex
