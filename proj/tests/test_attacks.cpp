#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "oracles.hpp"
#include "semikex/attacks.hpp"
#include "semikex/error.hpp"
#include "semikex/kex.hpp"

using namespace semikex;

namespace {

MatrixSR cycle(const TablePtr& t, std::size_t n) {
  MatrixSR m = MatrixSR::zeros(t, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, (i + 1) % n, *t->one());
  return m;
}

PublicParams small_params(std::uint64_t seed, std::size_t n, std::size_t total, std::uint64_t bound) {
  ParamsConfig cfg;
  cfg.total = total;
  cfg.n = n;
  cfg.entry_bound = bound;
  cfg.seed = seed;
  return generate_params(cfg).params;
}

// Census of the whole box by the naive action oracle.
std::vector<CirculantNat> census(const CommutingVector& v, const CommutingVector& target, std::uint64_t bound) {
  const std::size_t n = v.size();
  std::vector<CirculantNat> hits;
  std::vector<std::uint64_t> c(n, 0);
  while (true) {
    const CirculantNat circ(c);
    if (oracle::action(circ, v.mats()) == target.mats()) hits.push_back(circ);
    std::size_t k = n;
    while (k > 0 && c[k - 1] == bound) c[--k] = 0;
    if (k == 0) break;
    ++c[k - 1];
  }
  return hits;
}

}  // namespace

TEST_SUITE("attacks") {

TEST_CASE("box size and budget") {
  CHECK(box_size(2, 3) == 16u);
  CHECK(box_size(4, 100) == 104060401u);
  CHECK_FALSE(box_size(16, 1u << 16).has_value());
  ::unsetenv("SEMIKEX_MAX_BUDGET");
  CHECK(attack_budget() == kDefaultAttackBudget);
  ::setenv("SEMIKEX_MAX_BUDGET", "1000", 1);
  CHECK(attack_budget() == 1000);
  ::unsetenv("SEMIKEX_MAX_BUDGET");

  Rng rng(1);
  const PublicParams p = small_params(1, 4, 8, 100);
  const KeyPair kp = keygen(p, rng);
  CHECK_THROWS_AS(brute_force_attack(p.v, kp.pub, 100, 1000), BudgetExceeded);
}

TEST_CASE("action evaluator matches circ_act in both storage modes") {
  Rng rng(2);
  const PublicParams p = small_params(2, 3, 6, 50);
  const ActionEvaluator small(p.v, 50);
  const ActionEvaluator huge(p.v, 1ull << 40);
  for (int trial = 0; trial < 50; ++trial) {
    const CirculantNat c = circ_random(3, 50, rng);
    const CommutingVector expect = circ_act(c, p.v);
    CHECK(small.apply(c) == expect);
    CHECK(huge.apply(c) == expect);
    CHECK(small.matches(c.coeffs(), expect));
    CHECK(huge.matches(c.coeffs(), expect));
  }
  CHECK_THROWS_AS(small.apply(CirculantNat({51, 0, 0})), Error);
}

TEST_CASE("n = 1 brute force finds exactly the exponent") {
  const auto t = builtin_maze20();
  Rng rng(3);
  const MatrixSR m = build_public_matrix(7, t, 0.3, rng).m;
  const auto prof = order_profile(m);
  REQUIRE(prof.exact);
  const std::uint64_t d = prof.distinct_powers;
  const auto v = CommutingVector::make({m});
  for (std::uint64_t a : {std::uint64_t{0}, std::uint64_t{1}, d / 2, d - 1}) {
    const PublicKeyMsg pk{circ_act(CirculantNat({a}), v)};
    const AttackReport r = brute_force_attack(v, pk, d - 1);
    CHECK(r.tried == d);
    CHECK(r.successes == 1);
    REQUIRE(r.first_success);
    CHECK(*r.first_success == CirculantNat({a}));
    CHECK(r.pkey_size == 1u);
  }
}

TEST_CASE("n = 2 bound 3 census") {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    Rng rng(seed);
    const PublicParams p = small_params(seed, 2, 5, 3);
    const KeyPair kp = keygen(p, rng);
    const AttackReport r = brute_force_attack(p.v, kp.pub, 3, kDefaultAttackBudget, 2);
    CHECK(r.tried == 16);
    CHECK(r.successes <= 16);
    CHECK(std::find(r.found.begin(), r.found.end(), kp.priv.circ) != r.found.end());
    CHECK(r.found == census(p.v, kp.pub.vec, 3));
    for (const auto& c : r.found) CHECK(circ_act(c, p.v) == kp.pub.vec);
  }
}

TEST_CASE("workers do not change the result") {
  Rng rng(4);
  const PublicParams p = small_params(4, 3, 6, 9);
  const KeyPair kp = keygen(p, rng);
  const AttackReport one = brute_force_attack(p.v, kp.pub, 9, kDefaultAttackBudget, 1);
  const AttackReport three = brute_force_attack(p.v, kp.pub, 9, kDefaultAttackBudget, 3);
  CHECK(one.found == three.found);
  CHECK(one.tried == 1000);
  CHECK(three.tried == 1000);
  CHECK(one.first_success == three.first_success);
}

TEST_CASE("constructed miss") {
  const auto t = builtin_maze20();
  const MatrixSR c3 = cycle(t, 3);
  const auto v = CommutingVector::make({c3, c3});
  // Powers of a permutation are permutations; the zero matrix is never reached.
  const PublicKeyMsg pk{CommutingVector::make({MatrixSR::zeros(t, 3), MatrixSR::zeros(t, 3)})};
  const AttackReport r = brute_force_attack(v, pk, 5);
  CHECK(r.successes == 0);
  CHECK_FALSE(r.first_success);
  CHECK(r.tried == 36);
}

TEST_CASE("random attack") {
  SUBCASE("zero trials") {
    Rng rng(5);
    const PublicParams p = small_params(5, 2, 5, 3);
    const AttackReport r = random_attack(p.v, keygen(p, rng).pub, 3, 0, rng);
    CHECK(r.tried == 0);
    CHECK(r.successes == 0);
  }
  SUBCASE("hit frequency follows the census") {
    const auto t = builtin_maze20();
    const MatrixSR c3 = cycle(t, 3);
    const auto v = CommutingVector::make({c3, c3});
    const PublicKeyMsg pk{circ_act(CirculantNat({1, 1}), v)};
    const auto hits = census(v, pk.vec, 3);
    REQUIRE(hits.size() > 1);
    constexpr std::uint64_t kTrials = 20000;
    Rng rng(6);
    const AttackReport r = random_attack(v, pk, 3, kTrials, rng);
    const double p = static_cast<double>(hits.size()) / 16.0;
    const double mean = kTrials * p, sigma = std::sqrt(kTrials * p * (1 - p));
    CHECK(r.tried == kTrials);
    CHECK(std::abs(static_cast<double>(r.successes) - mean) <= 5 * sigma);
  }
  SUBCASE("box of 101^4 on an [8,5,7] instance with monomial v") {
    Rng rng(7);
    const auto t = builtin_maze20();
    const Partition p{{5, 7, 8}, 0};
    const MatrixSR m = conjugate(randomize_upper_blocks(base_block_matrix(p, t), p, kDefaultDensity, rng),
                                 random_generalized_permutation(20, *t, rng));
    const auto v = CommutingVector::make({mat_pow(m, 1), mat_pow(m, 3), mat_pow(m, 7), mat_pow(m, 11)});
    REQUIRE(circ_det_int(CirculantNat({1, 3, 7, 11})) != 0);
    const PublicKeyMsg pk{circ_act(circ_random(4, 100, rng), v)};
    const AttackReport r = random_attack(v, pk, 100, 100000, rng);
    CHECK(r.tried == 100000);
    CHECK(r.successes == 0);
  }
}

// With idempotent addition, (sum of >= 2 powers of M)^k sums a window of
// powers whose width grows with k; once it spans the cycle the value is fixed.
TEST_CASE("polynomial vectors saturate for large exponents") {
  Rng rng(11);
  const PublicParams p = small_params(7, 4, 20, 100);
  const KeyPair kp = keygen(p, rng);
  const AttackReport r = random_attack(p.v, kp.pub, 100, 2000, rng);
  CHECK(r.successes > 1900);
}

TEST_CASE("uniqueness experiments") {
  const auto t = builtin_maze20();
  Rng rng(8);
  SUBCASE("3-cycle, n = 1") {
    const MatrixSR c3 = cycle(t, 3);
    const auto v = CommutingVector::make({c3});
    const AttackReport r = brute_force_attack(v, PublicKeyMsg{circ_act(CirculantNat({2}), v)}, 2);
    CHECK(r.found == std::vector<CirculantNat>{CirculantNat({2})});
    UniquenessConfig cfg;
    cfg.trials = 50;
    const auto rep = uniqueness_experiment(c3, cfg, rng);
    CHECK(rep.distinct_powers == 3);
    CHECK(rep.candidates_per_trial == 3);
    CHECK(rep.non_unique_trials == 0);
    CHECK(rep.counterexamples.empty());
  }
  SUBCASE("n = 1 on a generated matrix") {
    const MatrixSR m = build_public_matrix(10, t, 0.3, rng).m;
    UniquenessConfig cfg;
    cfg.trials = 500;
    const auto rep = uniqueness_experiment(m, cfg, rng);
    CHECK(rep.trials == 500);
    CHECK(rep.non_unique_trials == 0);
  }
  SUBCASE("general mode with b = (1, 2)") {
    const MatrixSR m = build_public_matrix(5, t, 0.3, rng).m;
    UniquenessConfig cfg;
    cfg.mode = UniquenessMode::General;
    cfg.b = {1, 2};
    cfg.trials = 500;
    const auto rep = uniqueness_experiment(m, cfg, rng);
    CHECK(rep.hypothesis_respected);
    CHECK(rep.non_unique_trials == 0);
    CHECK(rep.counterexamples.empty());
    CHECK(rep.candidates_per_trial > 0);
  }
  SUBCASE("singular b is rejected") {
    UniquenessConfig cfg;
    cfg.mode = UniquenessMode::General;
    cfg.b = {1, 1};
    CHECK_THROWS_AS(uniqueness_experiment(cycle(t, 3), cfg, rng), Error);
  }
  SUBCASE("violated hypothesis reports duplicates") {
    UniquenessConfig cfg;
    cfg.respect_hypothesis = false;
    cfg.trials = 20;
    const auto rep = uniqueness_experiment(cycle(t, 3), cfg, rng);
    CHECK_FALSE(rep.hypothesis_respected);
    CHECK(rep.non_unique_trials == 20);
    REQUIRE_FALSE(rep.counterexamples.empty());
    for (const auto& ce : rep.counterexamples) {
      CHECK(ce.a != ce.x);
      const auto v = CommutingVector::make({cycle(t, 3)});
      CHECK(circ_act(ce.a, v) == circ_act(ce.x, v));
    }
  }
  CHECK(format_circulant(CirculantNat({1, 2})) == "Circ(1,2)");
  CHECK(mode_name(UniquenessMode::General) == "general");
}

}  // TEST_SUITE
