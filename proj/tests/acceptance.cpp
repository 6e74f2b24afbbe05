// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

#include "oracles.hpp"
#include "semikex/attacks.hpp"
#include "semikex/bench.hpp"
#include "semikex/kex.hpp"
#include "semikex/netkex.hpp"
#include "semikex/paramgen.hpp"
#include "semikex/transport.hpp"

using namespace semikex;
using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("%s %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
  failures += !o.pass;
}

double elapsed(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

std::string join(const std::vector<double>& xs) {
  std::ostringstream s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s << ",";
    s.precision(3);
    s << xs[i];
  }
  return s.str();
}

PublicParams small_params(std::uint64_t seed, std::size_t n, std::size_t total, std::uint64_t bound) {
  ParamsConfig cfg;
  cfg.total = total;
  cfg.n = n;
  cfg.entry_bound = bound;
  cfg.seed = seed;
  return generate_params(cfg).params;
}

struct LoopbackResult {
  SessionTranscript init, resp;
};

LoopbackResult loopback(const PublicParams& p, std::uint64_t si, std::uint64_t sr, const FrameFilter* tamper) {
  auto [ia, ma] = make_loopback_pair();
  auto [mb, rb] = make_loopback_pair();
  const FrameFilter pass = [](Frame f) { return f; };
  std::thread fwd([&, &ma = ma, &mb = mb] { relay_frames(*ma, *mb, tamper ? *tamper : pass); });
  std::thread back([&, &ma = ma, &mb = mb] { relay_frames(*mb, *ma, pass); });
  LoopbackResult r;
  std::thread responder([&, &rb = rb] {
    ResponderContext ctx;
    Rng rng(sr);
    r.resp = run_responder(*rb, ctx, rng, {10'000ms});
    rb->close();
  });
  Rng rng(si);
  r.init = run_initiator(*ia, p, rng, {10'000ms});
  ia->close();
  responder.join();
  fwd.join();
  back.join();
  return r;
}

}  // namespace

int main() {
  const auto t = builtin_maze20();

  criterion("semiring fixture integrity", [&]() -> Outcome {
    const auto start = Clock::now();
    const SemiringTable file = load_table_file(oracle::fixture("maze20.tbl"));
    if (file.canonical_bytes() != t->canonical_bytes()) return {false, "fixture differs from built-in table"};
    const auto rep = validate_axioms(file);
    const auto sp = find_special_elements(file);
    struct Cell {
      const char *x, *op, *y, *z;
    };
    const Cell cells[] = {{"b", "+", "d", "e"}, {"e", "*", "d", "a"}, {"r", "*", "a", "j"}, {"c", "+", "m", "1"},
                          {"i", "+", "j", "n"}, {"o", "+", "c", "p"}, {"q", "*", "b", "g"}, {"n", "*", "k", "m"},
                          {"p", "*", "f", "l"}, {"h", "*", "o", "g"}};
    int cell_ok = 0;
    for (const auto& c : cells) {
      const ElementId x = file.id(c.x), y = file.id(c.y);
      const ElementId got = std::string(c.op) == "+" ? file.add(x, y) : file.mul(x, y);
      cell_ok += got == file.id(c.z);
    }
    const bool ok = rep.ok() && sp.additive_neutral == file.id("0") && sp.multiplicative_identity == file.id("1") &&
                    sp.additive_absorbing == file.id("r") && cell_ok == 10 && elapsed(start) < 5.0;
    return {ok, std::to_string(rep.violations.size()) + " axiom violations, zero=" +
                    (sp.additive_neutral ? file.name(*sp.additive_neutral) : "none") +
                    " one=" + (sp.multiplicative_identity ? file.name(*sp.multiplicative_identity) : "none") +
                    " absorbing=" + (sp.additive_absorbing ? file.name(*sp.additive_absorbing) : "none") +
                    ", spot cells " + std::to_string(cell_ok) + "/10"};
  });

  criterion("congruence-simplicity", [&]() -> Outcome {
    const auto start = Clock::now();
    const auto res = is_congruence_simple(*t);
    // Independent fixpoint closure of every pair must be the full relation.
    int full = 0, pairs = 0;
    for (std::size_t x = 0; x < t->size(); ++x) {
      for (std::size_t y = x + 1; y < t->size(); ++y) {
        ++pairs;
        const auto rel = oracle::closure_relation(*t, {{static_cast<ElementId>(x), static_cast<ElementId>(y)}});
        bool all = true;
        for (const auto& row : rel) all = all && std::find(row.begin(), row.end(), false) == row.end();
        full += all;
      }
    }
    const bool ok = res.simple && pairs == 190 && full == 190 && elapsed(start) < 60.0;
    return {ok, std::string("simple=") + (res.simple ? "yes" : "no") + ", oracle closures total " +
                    std::to_string(full) + "/" + std::to_string(pairs)};
  });

  criterion("irreducibility witness", [&]() -> Outcome {
    const ElementId r = t->id("r");
    // Exhaustive check of both conditions from the table alone.
    bool absorbing = true, no_sum = true;
    for (std::size_t y = 0; y < t->size(); ++y) {
      const auto Y = static_cast<ElementId>(y);
      absorbing = absorbing && t->add(r, Y) == r && t->add(Y, r) == r;
      for (std::size_t z = 0; z < t->size(); ++z) {
        const auto Z = static_cast<ElementId>(z);
        if (Y != r && Z != r && t->add(Y, Z) == r) no_sum = false;
      }
    }
    const bool lib = satisfies_irreducibility_hypotheses(*t, r);
    return {lib && absorbing && no_sum, std::string("library=") + (lib ? "yes" : "no") +
                                            " absorbing=" + (absorbing ? "yes" : "no") +
                                            " not-a-sum=" + (no_sum ? "yes" : "no")};
  });

  criterion("action law", [&]() -> Outcome {
    Rng rng(101);
    int ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = rng.uniform(1, 4), dim = rng.uniform(1, 4);
      const MatrixSR m = oracle::random_matrix(t, dim, rng);
      CommutingVector v = trial % 2 ? build_commuting_vector(m, n, 3, rng).v : [&] {
        std::vector<MatrixSR> mats;
        for (std::size_t i = 0; i < n; ++i) mats.push_back(oracle::power(m, rng.uniform(1, 6)));
        return CommutingVector::make(mats);
      }();
      std::vector<std::uint64_t> a(n), b(n);
      for (auto& x : a) x = rng.uniform(0, 8);
      for (auto& x : b) x = rng.uniform(0, 8);
      const CirculantNat A(a), B(b);
      const auto lhs = circ_act(A, circ_act(B, v));
      const auto rhs = circ_act(circ_mul(A, B), v);
      ok += lhs == rhs && lhs.mats() == oracle::action(circ_mul(A, B), v.mats());
    }
    return {ok == 100, std::to_string(ok) + "/100 instances"};
  });

  criterion("key agreement", [&]() -> Outcome {
    Rng rng(202);
    int local_ok = 0, net_ok = 0, tamper_failed = 0;
    for (int k = 0; k < 100; ++k) {
      const PublicParams p = small_params(5000 + k, rng.uniform(1, 4), rng.uniform(1, 6), rng.uniform(1, 1000));
      const KeyPair a = keygen(p, rng), b = keygen(p, rng);
      const auto sa = derive_shared(a.priv, b.pub), sb = derive_shared(b.priv, a.pub);
      local_ok += canonical_encode(sa.vec) == canonical_encode(sb.vec);
      const auto s = loopback(p, 7000 + k, 9000 + k, nullptr);
      net_ok += s.init.completed() && s.resp.completed() &&
                canonical_encode(s.init.local_secret->vec) == canonical_encode(s.resp.local_secret->vec);
    }
    constexpr int kTampered = 20;
    for (int k = 0; k < kTampered; ++k) {
      const PublicParams p = small_params(8000 + k, 4, 8, 1000);
      Rng evil(k);
      const FrameFilter replace = [&](Frame f) {
        if (f.type != FrameType::PubKey) return f;
        std::vector<MatrixSR> mats;
        for (std::size_t i = 0; i < p.n(); ++i) mats.push_back(oracle::random_matrix(p.table, p.dim(), evil));
        return Frame{FrameType::PubKey, canonical_encode(CommutingVector::unchecked(mats))};
      };
      const auto s = loopback(p, 100 + k, 200 + k, &replace);
      tamper_failed += !s.init.completed() && s.init.failure == "confirm-mismatch" && !s.resp.completed();
    }
    return {local_ok == 100 && net_ok == 100 && tamper_failed == kTampered,
            "local " + std::to_string(local_ok) + "/100, loopback " + std::to_string(net_ok) +
                "/100, tampered sessions rejected " + std::to_string(tamper_failed) + "/" +
                std::to_string(kTampered)};
  });

  criterion("order facts", [&]() -> Outcome {
    const auto start = Clock::now();
    const auto p6 = order_profile(base_block_matrix(Partition{{2, 3}, 0}, t));
    const auto p20 = order_profile(base_block_matrix(Partition{{8, 5, 7}, 0}, t));
    const bool ok = p6.exact && p6.period == 6 && p20.exact && p20.distinct_powers >= 280 && elapsed(start) < 10.0;
    return {ok, "[2,3] period " + std::to_string(p6.period) + ", [8,5,7] distinct powers " +
                    std::to_string(p20.distinct_powers)};
  });

  criterion("conjugation invariance", [&]() -> Outcome {
    Rng rng(303);
    int ok = 0, total = 0;
    while (total < 50) {
      const Partition p = best_partition(rng.uniform(3, 20));
      const MatrixSR a = randomize_upper_blocks(base_block_matrix(p, t), p, rng.unit(), rng);
      const auto prof = order_profile(a, 10'000);
      if (!prof.exact || prof.distinct_powers > 10'000) continue;
      const auto g = random_generalized_permutation(a.dim(), *t, rng);
      ++total;
      ok += order_profile(conjugate(a, g)) == prof;
    }
    return {ok == 50, std::to_string(ok) + "/50 pairs"};
  });

  criterion("invertibility at 2 x 2", [&]() -> Outcome {
    // Every 2 x 2 matrix that is a generalized permutation, found by scanning all 20^4.
    int gp_count = 0, gp_ok = 0;
    std::vector<ElementId> e(4);
    for (std::size_t code = 0; code < 160000; ++code) {
      std::size_t c = code;
      for (auto& x : e) {
        x = static_cast<ElementId>(c % 20);
        c /= 20;
      }
      const MatrixSR a(t, 2, e);
      const auto g = is_generalized_permutation(a);
      if (!g) continue;
      ++gp_count;
      const MatrixSR inv = to_matrix(gp_inverse(*g, *t), t);
      gp_ok += oracle::matmul(a, inv) == oracle::identity(t, 2) && oracle::matmul(inv, a) == oracle::identity(t, 2);
    }
    Rng rng(404);
    int non_gp = 0, none = 0;
    while (non_gp < 100) {
      const MatrixSR a = oracle::random_matrix(t, 2, rng);
      if (is_generalized_permutation(a)) continue;
      ++non_gp;
      none += !invertibility_oracle(a).has_value();
    }
    return {gp_count > 0 && gp_ok == gp_count && none == 100,
            "generalized permutations invertible " + std::to_string(gp_ok) + "/" + std::to_string(gp_count) +
                ", random non-GP without inverse " + std::to_string(none) + "/100"};
  });

  criterion("uniqueness experiments", [&]() -> Outcome {
    Rng rng(505);
    UniquenessConfig n1;
    n1.trials = 500;
    const MatrixSR m1 = build_public_matrix(12, t, kDefaultDensity, rng).m;
    const auto r1 = uniqueness_experiment(m1, n1, rng);
    UniquenessConfig gen;
    gen.mode = UniquenessMode::General;
    gen.b = {1, 2};
    gen.trials = 500;
    const MatrixSR m2 = build_public_matrix(7, t, kDefaultDensity, rng).m;
    const auto r2 = uniqueness_experiment(m2, gen, rng);
    const bool ok = r1.trials == 500 && r2.trials == 500 && r1.non_unique_trials == 0 && r2.non_unique_trials == 0;
    return {ok, "n1: " + std::to_string(r1.non_unique_trials) + " non-unique of " + std::to_string(r1.trials) +
                    " (d=" + std::to_string(r1.distinct_powers) + "), general b=(1,2): " +
                    std::to_string(r2.non_unique_trials) + " non-unique of " + std::to_string(r2.trials) +
                    " (d=" + std::to_string(r2.distinct_powers) + ")"};
  });

  criterion("landau consistency", [&]() -> Outcome {
    int ok = 0;
    for (std::size_t n = 3; n <= 40; ++n) ok += std::log(static_cast<double>(best_partition(n).lcm())) <= landau_bounds(n).upper_ln;
    const auto g20 = best_partition(20).lcm();
    return {ok == 38 && g20 >= 280, "upper bound holds " + std::to_string(ok) + "/38, g(20)=" + std::to_string(g20)};
  });

  criterion("cost scaling", [&]() -> Outcome {
    SetupBenchConfig sc;
    sc.runs = 15;
    const auto setup = successive_ratios(bench_setup(sc));
    ActBenchConfig ac;
    ac.runs = 15;
    const auto act = successive_ratios(bench_act(ac));
    bool ok = true;
    for (double r : setup) ok = ok && r >= 5.0 && r <= 13.0;
    for (double r : act) ok = ok && r >= 1.5 && r <= 3.0;
    return {ok, "setup ratios per dim doubling [" + join(setup) + "] (want 5..13), act ratios per n doubling [" +
                    join(act) + "] (want 1.5..3)"};
  });

  criterion("displayed 21 x 21 session (optional)", [&]() -> Outcome {
    auto load = [&](const std::string& name) {
      return load_matrix_file(oracle::fixture("worked/" + name + ".mat"), t);
    };
    auto load4 = [&](const std::string& stem) {
      std::vector<MatrixSR> out;
      for (int i = 0; i < 4; ++i) out.push_back(load(stem + std::to_string(i)));
      return out;
    };
    const PublicParams params{t, load("session_M"), CommutingVector::make(load4("session_v")), 100};
    const PrivateKey a{CirculantNat({75, 51, 87, 95})}, b{CirculantNat({43, 86, 77, 77})};
    const auto pa = public_key(params, a), pb = public_key(params, b);
    const auto sa = derive_shared(a, pb), sb = derive_shared(b, pa);
    const bool pk_ok = pa.vec.mats() == load4("session_pk1_") && pb.vec.mats() == load4("session_pk2_");
    const bool agree = sa.vec == sb.vec;
    const bool key_ok = sa.vec.mats() == load4("session_key_");
    return {pk_ok && agree && key_ok, std::string("public keys match=") + (pk_ok ? "yes" : "no") +
                                          ", shared agree=" + (agree ? "yes" : "no") +
                                          ", matches displayed key=" + (key_ok ? "yes" : "no")};
  });

  return failures ? 1 : 0;
}
