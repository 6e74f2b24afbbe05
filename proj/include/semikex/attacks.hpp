#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semikex/circulant.hpp"
#include "semikex/kex.hpp"
#include "semikex/rng.hpp"

namespace semikex {

inline constexpr std::uint64_t kDefaultAttackBudget = 1u << 24;

// SEMIKEX_MAX_BUDGET if set to a positive integer, else kDefaultAttackBudget.
std::uint64_t attack_budget();

/// Evaluates C acting on a fixed vector v for many C with entries <= bound.
/// Powers v[j]^e for e in [0, bound] are tabulated when that fits in memory;
/// otherwise repeated squares are kept and combined per exponent.
class ActionEvaluator {
 public:
  ActionEvaluator(const CommutingVector& v, std::uint64_t bound);

  std::size_t n() const { return n_; }
  CommutingVector apply(const CirculantNat& c) const;
  // Equivalent to apply(c) == target, stopping at the first differing component.
  bool matches(std::span<const std::uint64_t> c, const CommutingVector& target) const;

 private:
  MatrixSR component(std::span<const std::uint64_t> c, std::size_t i) const;
  const MatrixSR& power(std::size_t j, std::uint64_t e) const;

  std::size_t n_;
  std::uint64_t bound_;
  MatrixSR identity_;
  bool tabulated_;
  std::vector<std::vector<MatrixSR>> table_;  // powers or squares, per base
};

struct AttackReport {
  std::uint64_t tried = 0;
  std::uint64_t successes = 0;
  std::optional<CirculantNat> first_success;
  std::vector<CirculantNat> found;  // brute force: every success, in enumeration order
  std::chrono::nanoseconds wall_time{0};
  std::optional<std::uint64_t> pkey_size;  // brute force only
};

// (bound+1)^n, or nullopt when it exceeds 2^64 - 1.
std::optional<std::uint64_t> box_size(std::size_t n, std::uint64_t bound);

/// Enumerates Circ_n([0, bound]) in lexicographic order (c_0 most significant),
/// all-zero vector included. Throws BudgetExceeded when the box is larger than
/// `budget`. workers = 0 uses the hardware concurrency.
AttackReport brute_force_attack(const CommutingVector& v, const PublicKeyMsg& pk, std::uint64_t bound,
                                std::uint64_t budget = attack_budget(), unsigned workers = 0);

AttackReport random_attack(const CommutingVector& v, const PublicKeyMsg& pk, std::uint64_t bound,
                           std::uint64_t trials, Rng& rng);

enum class UniquenessMode { N1, General };

struct UniquenessConfig {
  UniquenessMode mode = UniquenessMode::N1;
  std::uint64_t trials = 500;
  // General mode: v = (M^{b_0}, ..., M^{b_{n-1}}); det Circ(b) must be nonzero.
  std::vector<std::uint64_t> b;
  // When false the private key is drawn outside the hypothesis range so that
  // duplicates can be observed.
  bool respect_hypothesis = true;
  std::uint64_t order_cap = kDefaultOrderCap;
  std::uint64_t budget = attack_budget();
};

struct Counterexample {
  CirculantNat a;
  CirculantNat x;
};

struct UniquenessReport {
  UniquenessMode mode;
  bool hypothesis_respected = true;
  std::uint64_t distinct_powers = 0;
  std::uint64_t trials = 0;
  std::uint64_t candidates_per_trial = 0;
  std::uint64_t non_unique_trials = 0;
  std::vector<Counterexample> counterexamples;  // first few, verbatim
};

/// For each trial draws A from the hypothesis set and counts every X in that
/// set with X v = A v. Hypothesis sets:
///   n1:      A = (a), 0 <= a <= d - 1, with d = distinct powers of M.
///   general: A in [0, d-1]^n with every exponent sum_j a_{(k-j) mod n} b_j <= d - 1.
/// Throws Error when the hypothesis cannot be met (det Circ(b) = 0, order not
/// exact within order_cap, or the set exceeds the budget).
UniquenessReport uniqueness_experiment(const MatrixSR& m, const UniquenessConfig& cfg, Rng& rng);

std::string mode_name(UniquenessMode m);
std::string format_circulant(const CirculantNat& c);

}  // namespace semikex
