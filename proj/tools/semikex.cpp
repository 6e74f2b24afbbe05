// semikex command-line tool.

#include <sys/stat.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "semikex/attacks.hpp"
#include "semikex/bench.hpp"
#include "semikex/error.hpp"
#include "semikex/kernels.hpp"
#include "semikex/kex.hpp"
#include "semikex/netkex.hpp"
#include "semikex/paramgen.hpp"
#include "semikex/semiring.hpp"

using namespace semikex;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

std::string join_names(const SemiringTable& t, const std::vector<ElementId>& ids) {
  std::string out;
  for (auto x : ids) out += (out.empty() ? "" : " ") + t.name(x);
  return out;
}

std::string format_partition(const Partition& p) {
  std::string out = "[";
  for (std::size_t i = 0; i < p.parts.size(); ++i) out += (i ? "," : "") + std::to_string(p.parts[i]);
  return out + "]";
}

struct TableOption {
  std::string path;

  TableRegistry registry() const {
    TableRegistry r;
    if (!path.empty()) r.add(std::make_shared<const SemiringTable>(load_table_file(path)));
    return r;
  }
  TablePtr table() const {
    return path.empty() ? builtin_maze20() : std::make_shared<const SemiringTable>(load_table_file(path));
  }
};

PublicParams load_params(const std::string& path, const TableOption& tables) {
  return decode_params(read_file(path), tables.registry());
}

void write_private_file(const std::string& path, std::span<const std::uint8_t> data) {
  write_file(path, data);
  ::chmod(path.c_str(), 0600);
}

// ---------------------------------------------------------------------------

int cmd_semiring_verify(const std::string& path) {
  const SemiringTable t = load_table_file(path);
  const ValidationReport rep = validate_axioms(t);
  const SimplicityResult simple = is_congruence_simple(t);
  const auto witness = irreducibility_witness(t);
  std::cout << "axioms: " << (rep.ok() ? "ok" : std::to_string(rep.violations.size()) + " violations")
            << ", congruence-simple: " << (simple.simple ? "yes" : "no")
            << ", irreducibility witness: " << (witness ? t.name(*witness) : "none") << '\n';
  std::cout << "center: " << join_names(t, center(t)) << '\n';
  const auto sp = find_special_elements(t);
  auto opt = [&](const std::optional<ElementId>& x) { return x ? t.name(*x) : std::string("none"); };
  std::cout << "zero: " << opt(sp.additive_neutral) << ", one: " << opt(sp.multiplicative_identity)
            << ", additive absorbing: " << opt(sp.additive_absorbing) << '\n';
  std::cout << "additively commutative: " << (rep.additive_commutative ? "yes" : "no")
            << ", additively idempotent: " << (rep.additive_idempotent ? "yes" : "no")
            << ", multiplicatively commutative: " << (rep.multiplicative_commutative ? "yes" : "no") << '\n';
  for (std::size_t i = 0; i < std::min<std::size_t>(rep.violations.size(), 10); ++i) {
    const auto& v = rep.violations[i];
    std::cout << "violation: " << law_name(v.law) << " (" << t.name(v.x) << "," << t.name(v.y) << ","
              << t.name(v.z) << ")\n";
  }
  if (simple.witness_pair) {
    std::cout << "non-simple witness: (" << t.name(simple.witness_pair->first) << ","
              << t.name(simple.witness_pair->second) << ") with " << simple.witness->block_count() << " blocks\n";
  }
  return rep.ok() ? 0 : kExitDomain;
}

struct ParamsGenArgs {
  ParamsConfig cfg;
  TableOption table;
  std::string out;
};

int cmd_params_gen(const ParamsGenArgs& a) {
  ParamsConfig cfg = a.cfg;
  if (!a.table.path.empty()) cfg.table = a.table.table();
  const GeneratedParams g = generate_params(cfg);
  const Bytes file = encode_params(g.params);
  write_file(a.out, file);
  const auto& prov = g.provenance;
  std::cout << "partition: " << format_partition(prov.partition) << " padding " << prov.partition.padding
            << " lcm " << prov.partition.lcm() << '\n';
  std::cout << "dim: " << g.params.dim() << ", n: " << g.params.n() << ", entry bound: " << g.params.entry_bound
            << '\n';
  if (prov.measured && prov.measured->exact) {
    std::cout << "order: preperiod " << prov.measured->preperiod << ", period " << prov.measured->period
              << ", distinct powers " << prov.measured->distinct_powers << '\n';
  } else {
    std::cout << "order: at least " << prov.certified_lower_bound << " distinct powers\n";
  }
  std::cout << "params hash: " << to_hex(sha256(file)) << '\n';
  return 0;
}

int cmd_keygen(const std::string& params_path, const TableOption& tables, const std::string& out,
               std::uint64_t seed) {
  const PublicParams params = load_params(params_path, tables);
  Rng rng(seed);
  const KeyPair kp = keygen(params, rng);
  write_private_file(out, encode_private_key(kp.priv));
  const Bytes pub = canonical_encode(kp.pub.vec);
  write_file(out + ".pub", pub);
  std::cout << "private key: " << out << '\n';
  std::cout << "public key: " << out << ".pub\n";
  std::cout << "public key fingerprint: " << to_hex(sha256(pub)) << '\n';
  return 0;
}

int cmd_exchange_local(const std::string& params_path, const TableOption& tables, std::uint64_t seed,
                       bool transfer) {
  const PublicParams params = load_params(params_path, tables);
  ResponderContext ctx;
  ctx.registry = tables.registry();
  if (!transfer) ctx.known.emplace(params_hash(params), params);

  auto [a, b] = make_loopback_pair();
  Rng alice_rng(seed), bob_rng(seed + 1);
  SessionTranscript bob;
  std::thread responder([&] { bob = run_responder(*b, ctx, bob_rng); });
  SessionTranscript alice = run_initiator(*a, params, alice_rng);
  responder.join();

  auto fp = [](const SessionTranscript& t) {
    return t.local_secret ? to_hex(t.local_secret->fingerprint) : std::string("none");
  };
  std::cout << "alice fingerprint: " << fp(alice) << '\n';
  std::cout << "bob fingerprint: " << fp(bob) << '\n';
  const bool ok = alice.completed() && bob.completed();
  std::cout << "match: " << (ok ? "yes" : "no") << '\n';
  if (!ok) {
    std::cerr << "error: " << (alice.failure.empty() ? bob.failure : alice.failure) << '\n';
    return kExitDomain;
  }
  return 0;
}

void print_session(std::ostream& os, const std::string& label, const SessionTranscript& t) {
  os << label << ": " << (t.completed() ? "completed" : "failed (" + t.failure + ")");
  if (t.fingerprint) os << " fingerprint " << to_hex(*t.fingerprint);
  os << " frames " << t.frames.size() << '\n';
}

int cmd_serve(const std::string& listen, const std::vector<std::string>& params_paths, const TableOption& tables,
              std::uint64_t seed, std::uint64_t sessions, std::uint64_t timeout_ms) {
  ResponderContext ctx;
  ctx.registry = tables.registry();
  for (const auto& path : params_paths) {
    PublicParams p = load_params(path, tables);
    ctx.known.emplace(params_hash(p), std::move(p));
  }
  auto [host, port] = parse_endpoint(listen, "0.0.0.0");
  TcpListener listener(host, port);
  std::cout << "listening on port " << listener.port() << std::endl;
  SessionOptions opt;
  opt.timeout = std::chrono::milliseconds(timeout_ms);
  bool all_ok = true;
  serve(listener, ctx, seed, sessions, [&](std::uint64_t k, const SessionTranscript& t) {
    all_ok = all_ok && t.completed();
    print_session(std::cout, "session " + std::to_string(k), t);
    std::cout.flush();
  }, opt);
  return all_ok ? 0 : kExitDomain;
}

int cmd_connect(const std::string& peer, const std::string& params_path, const TableOption& tables,
                std::uint64_t seed, std::uint64_t timeout_ms) {
  const PublicParams params = load_params(params_path, tables);
  auto [host, port] = parse_endpoint(peer, "127.0.0.1");
  SessionOptions opt;
  opt.timeout = std::chrono::milliseconds(timeout_ms);
  auto stream = tcp_connect(host, port, opt.timeout);
  Rng rng(seed);
  const SessionTranscript t = run_initiator(*stream, params, rng, opt);
  stream->close();
  print_session(std::cout, "session", t);
  return t.completed() ? 0 : kExitDomain;
}

// ---------------------------------------------------------------------------

struct AttackArgs {
  std::string params;
  TableOption tables;
  std::string pub;
  std::string key;
  std::uint64_t bound = 3;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  unsigned workers = 0;
  std::string emit = "kv";
};

void print_attack(const std::string& kind, const AttackArgs& a, std::size_t n, const AttackReport& r,
                  const std::optional<CirculantNat>& truth) {
  const auto ns = r.wall_time.count();
  if (a.emit == "csv") {
    std::cout << "attack,n,bound,tried,successes,wall_ns\n"
              << kind << ',' << n << ',' << a.bound << ',' << r.tried << ',' << r.successes << ',' << ns << '\n';
    return;
  }
  std::cout << "attack=" << kind << "\nn=" << n << "\nbound=" << a.bound << "\ntried=" << r.tried
            << "\nsuccesses=" << r.successes << '\n';
  if (r.first_success) std::cout << "first_success=" << format_circulant(*r.first_success) << '\n';
  if (r.pkey_size) std::cout << "pkey_size=" << *r.pkey_size << '\n';
  for (const auto& c : r.found) std::cout << "found=" << format_circulant(c) << '\n';
  if (truth) {
    const bool hit = std::find(r.found.begin(), r.found.end(), *truth) != r.found.end();
    std::cout << "true_key_found=" << (hit ? "yes" : "no") << '\n';
  }
  std::cout << "wall_ns=" << ns << '\n';
}

int cmd_attack(const std::string& kind, const AttackArgs& a) {
  const PublicParams params = load_params(a.params, a.tables);
  const PublicKeyMsg pk{canonical_decode(read_file(a.pub), params.table)};
  check_public_key_shape(params, pk);
  std::optional<CirculantNat> truth;
  if (!a.key.empty()) truth = decode_private_key(read_file(a.key)).circ;
  AttackReport r;
  if (kind == "brute") {
    r = brute_force_attack(params.v, pk, a.bound, a.budget ? a.budget : attack_budget(), a.workers);
  } else {
    Rng rng(a.seed);
    r = random_attack(params.v, pk, a.bound, a.trials, rng);
  }
  print_attack(kind, a, params.n(), r, kind == "brute" ? truth : std::nullopt);
  return 0;
}

struct UniquenessArgs {
  std::string mode = "n1";
  std::string params;
  TableOption tables;
  std::size_t total = 5;
  double density = 0.0;
  std::vector<std::uint64_t> b;
  std::uint64_t trials = 500;
  std::uint64_t seed = 0;
  bool violate = false;
  std::string counterexamples;
  std::string emit = "kv";
};

int cmd_uniqueness(const UniquenessArgs& a) {
  UniquenessConfig cfg;
  if (a.mode == "n1") {
    cfg.mode = UniquenessMode::N1;
  } else if (a.mode == "general") {
    cfg.mode = UniquenessMode::General;
    cfg.b = a.b.empty() ? std::vector<std::uint64_t>{1, 2} : a.b;
  } else {
    throw Error("unknown uniqueness mode '" + a.mode + "' (n1 or general)");
  }
  cfg.trials = a.trials;
  cfg.respect_hypothesis = !a.violate;

  Rng rng(a.seed);
  std::optional<MatrixSR> m;
  if (!a.params.empty()) {
    m = load_params(a.params, a.tables).m;
  } else {
    m = build_public_matrix(a.total, a.tables.table(), a.density, rng).m;
  }
  const UniquenessReport rep = uniqueness_experiment(*m, cfg, rng);

  if (!a.counterexamples.empty() && !rep.counterexamples.empty()) {
    std::ofstream out(a.counterexamples);
    out << "# mode " << mode_name(rep.mode) << " seed " << a.seed << " trials " << a.trials
        << (a.params.empty() ? " total " + std::to_string(a.total) + " density " + std::to_string(a.density)
                             : " params " + a.params)
        << (a.violate ? " violate" : "") << " distinct_powers " << rep.distinct_powers << '\n';
    if (cfg.mode == UniquenessMode::General) {
      out << "# b";
      for (auto x : cfg.b) out << ' ' << x;
      out << '\n';
    }
    out << format_matrix(*m);
    for (const auto& c : rep.counterexamples) out << format_circulant(c.a) << ' ' << format_circulant(c.x) << '\n';
  }
  if (a.emit == "csv") {
    std::cout << "mode,hypothesis,trials,distinct_powers,candidates,non_unique\n"
              << mode_name(rep.mode) << ',' << (rep.hypothesis_respected ? "respected" : "violated") << ','
              << rep.trials << ',' << rep.distinct_powers << ',' << rep.candidates_per_trial << ','
              << rep.non_unique_trials << '\n';
  } else {
    std::cout << "mode=" << mode_name(rep.mode)
              << "\nhypothesis=" << (rep.hypothesis_respected ? "respected" : "violated")
              << "\ntrials=" << rep.trials << "\ndistinct_powers=" << rep.distinct_powers
              << "\ncandidates_per_trial=" << rep.candidates_per_trial
              << "\nnon_unique_trials=" << rep.non_unique_trials << '\n';
    for (const auto& c : rep.counterexamples) {
      std::cout << "counterexample=" << format_circulant(c.a) << ' ' << format_circulant(c.x) << '\n';
    }
  }
  return 0;
}

int cmd_bench(const std::string& which, bool sweep, const SetupBenchConfig& setup, const ActBenchConfig& act) {
  std::vector<BenchRow> rows;
  if (which == "setup") {
    SetupBenchConfig cfg = setup;
    if (!sweep) cfg.dims.resize(1);
    rows = bench_setup(cfg);
  } else {
    ActBenchConfig cfg = act;
    if (!sweep) cfg.ns.resize(1);
    rows = bench_act(cfg);
  }
  std::cout << bench_csv_header() << '\n';
  for (const auto& r : rows) std::cout << bench_csv_row(r) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semikex: circulant key exchange over finite semirings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "semikex 0.1.0");
  std::string isa;
  app.add_option("--isa", isa, "force a matmul kernel (scalar, avx2)");

  std::function<int()> action;

  // semiring verify
  auto* semiring = app.add_subcommand("semiring", "semiring table checks")->require_subcommand(1);
  std::string table_path;
  auto* verify = semiring->add_subcommand("verify", "axioms, simplicity, irreducibility witness, center");
  verify->add_option("table", table_path, "table file")->required();
  verify->callback([&] { action = [&] { return cmd_semiring_verify(table_path); }; });

  // params gen
  auto* params = app.add_subcommand("params", "public parameters")->require_subcommand(1);
  ParamsGenArgs pg;
  auto* gen = params->add_subcommand("gen", "generate a parameter file");
  gen->add_option("--total", pg.cfg.total, "partition total (matrix dimension)")->required();
  gen->add_option("--n", pg.cfg.n, "vector length")->capture_default_str();
  gen->add_option("--bound", pg.cfg.entry_bound, "private entry bound")->capture_default_str();
  gen->add_option("--seed", pg.cfg.seed, "rng seed")->capture_default_str();
  gen->add_option("--degree", pg.cfg.max_degree, "max polynomial degree")->capture_default_str();
  gen->add_option("--density", pg.cfg.density, "upper-block randomization density")->capture_default_str();
  gen->add_option("--table", pg.table.path, "semiring table file (default: built-in 20-element table)");
  gen->add_option("-o,--out", pg.out, "output parameter file")->required();
  gen->callback([&] { action = [&] { return cmd_params_gen(pg); }; });

  // keygen
  std::string kg_params, kg_out;
  std::uint64_t kg_seed = 0;
  TableOption kg_tables;
  auto* kg = app.add_subcommand("keygen", "generate a key pair (writes <out> and <out>.pub)");
  kg->add_option("--params", kg_params, "parameter file")->required();
  kg->add_option("-o,--out", kg_out, "private key file")->required();
  kg->add_option("--seed", kg_seed, "rng seed")->capture_default_str();
  kg->add_option("--table", kg_tables.path, "extra semiring table file");
  kg->callback([&] { action = [&] { return cmd_keygen(kg_params, kg_tables, kg_out, kg_seed); }; });

  // exchange local
  auto* exchange = app.add_subcommand("exchange", "key exchange")->require_subcommand(1);
  std::string ex_params;
  std::uint64_t ex_seed = 0;
  bool ex_transfer = false;
  TableOption ex_tables;
  auto* local = exchange->add_subcommand("local", "run both roles in-process over a loopback stream");
  local->add_option("--params", ex_params, "parameter file")->required();
  local->add_option("--seed", ex_seed, "rng seed (responder uses seed + 1)")->capture_default_str();
  local->add_flag("--transfer", ex_transfer, "responder starts without the parameters");
  local->add_option("--table", ex_tables.path, "extra semiring table file");
  local->callback([&] { action = [&] { return cmd_exchange_local(ex_params, ex_tables, ex_seed, ex_transfer); }; });

  // serve / connect
  std::string sv_listen = "0.0.0.0:7000";
  std::vector<std::string> sv_params;
  std::uint64_t sv_seed = 0, sv_sessions = 0, net_timeout = 30000;
  TableOption net_tables;
  auto* sv = app.add_subcommand("serve", "accept handshakes as responder");
  sv->add_option("--listen", sv_listen, "host:port")->capture_default_str();
  sv->add_option("--params", sv_params, "preshared parameter file(s)");
  sv->add_option("--seed", sv_seed, "rng seed (session k uses seed + k)")->capture_default_str();
  sv->add_option("--sessions", sv_sessions, "stop after this many sessions (0 = run forever)")->capture_default_str();
  sv->add_option("--timeout-ms", net_timeout, "per-frame timeout")->capture_default_str();
  sv->add_option("--table", net_tables.path, "extra semiring table file");
  sv->callback([&] {
    action = [&] { return cmd_serve(sv_listen, sv_params, net_tables, sv_seed, sv_sessions, net_timeout); };
  });

  std::string cn_peer, cn_params;
  std::uint64_t cn_seed = 0;
  auto* cn = app.add_subcommand("connect", "run the initiator against a server");
  cn->add_option("--peer", cn_peer, "host:port")->required();
  cn->add_option("--params", cn_params, "parameter file")->required();
  cn->add_option("--seed", cn_seed, "rng seed")->capture_default_str();
  cn->add_option("--timeout-ms", net_timeout, "per-frame timeout")->capture_default_str();
  cn->add_option("--table", net_tables.path, "extra semiring table file");
  cn->callback([&] { action = [&] { return cmd_connect(cn_peer, cn_params, net_tables, cn_seed, net_timeout); }; });

  // attack
  auto* attack = app.add_subcommand("attack", "security experiments")->require_subcommand(1);
  AttackArgs aa;
  for (const std::string kind : {"brute", "random"}) {
    auto* sub = attack->add_subcommand(kind, kind == "brute" ? "exhaustive search of the key box"
                                                             : "uniform sampling of the key box");
    sub->add_option("--params", aa.params, "parameter file")->required();
    sub->add_option("--pub", aa.pub, "public key file")->required();
    sub->add_option("--bound", aa.bound, "entry bound of the searched box")->capture_default_str();
    sub->add_option("--table", aa.tables.path, "extra semiring table file");
    sub->add_option("--emit", aa.emit, "output format")->check(CLI::IsMember({"kv", "csv"}))->capture_default_str();
    if (kind == "brute") {
      sub->add_option("--key", aa.key, "private key file; reports whether it was rediscovered");
      sub->add_option("--budget", aa.budget, "candidate budget (default: SEMIKEX_MAX_BUDGET or 2^24)");
      sub->add_option("--workers", aa.workers, "worker threads (0 = hardware concurrency)");
    } else {
      sub->add_option("--trials", aa.trials, "samples")->capture_default_str();
      sub->add_option("--seed", aa.seed, "rng seed")->capture_default_str();
    }
    sub->callback([&, kind] { action = [&, kind] { return cmd_attack(kind, aa); }; });
  }
  UniquenessArgs ua;
  auto* uq = attack->add_subcommand("uniqueness", "check uniqueness of X v = A v under the hypotheses");
  uq->add_option("--mode", ua.mode, "n1 or general")->check(CLI::IsMember({"n1", "general"}))->capture_default_str();
  uq->add_option("--params", ua.params, "take M from this parameter file");
  uq->add_option("--total", ua.total, "otherwise build M from this partition total")->capture_default_str();
  uq->add_option("--density", ua.density, "randomization density for a built M")->capture_default_str();
  uq->add_option("--b", ua.b, "general mode exponents, comma separated")->delimiter(',');
  uq->add_option("--trials", ua.trials, "trials")->capture_default_str();
  uq->add_option("--seed", ua.seed, "rng seed")->capture_default_str();
  uq->add_flag("--violate", ua.violate, "draw keys outside the hypothesis range");
  uq->add_option("--counterexamples", ua.counterexamples, "write counterexamples to this file");
  uq->add_option("--table", ua.tables.path, "semiring table file");
  uq->add_option("--emit", ua.emit, "output format")->check(CLI::IsMember({"kv", "csv"}))->capture_default_str();
  uq->callback([&] { action = [&] { return cmd_uniqueness(ua); }; });

  // bench
  auto* bench = app.add_subcommand("bench", "cost benchmarks (CSV)")->require_subcommand(1);
  SetupBenchConfig sb;
  ActBenchConfig ab;
  bool sweep = false;
  auto* bs = bench->add_subcommand("setup", "commuting-vector construction time versus dim");
  bs->add_flag("--sweep", sweep, "run every dim (otherwise the first only)");
  bs->add_option("--dims", sb.dims, "dims")->delimiter(',')->capture_default_str();
  bs->add_option("--n", sb.n, "vector length")->capture_default_str();
  bs->add_option("--degree", sb.degree, "polynomial degree")->capture_default_str();
  bs->add_option("--runs", sb.runs, "timed runs per point (>= 9)")->capture_default_str();
  bs->add_option("--seed", sb.seed, "rng seed")->capture_default_str();
  bs->callback([&] { action = [&] { return cmd_bench("setup", sweep, sb, ab); }; });
  auto* ba = bench->add_subcommand("act", "circulant action time versus n");
  ba->add_flag("--sweep", sweep, "run every n (otherwise the first only)");
  ba->add_option("--ns", ab.ns, "vector lengths")->delimiter(',')->capture_default_str();
  ba->add_option("--dim", ab.dim, "matrix dim")->capture_default_str();
  ba->add_option("--bound", ab.bound, "private entry bound")->capture_default_str();
  ba->add_option("--runs", ab.runs, "timed runs per point (>= 9)")->capture_default_str();
  ba->add_option("--seed", ab.seed, "rng seed")->capture_default_str();
  ba->callback([&] { action = [&] { return cmd_bench("act", sweep, sb, ab); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (!isa.empty()) {
      if (isa == "scalar") {
        kernels::set_active(kernels::Isa::Scalar);
      } else if (isa == "avx2") {
        kernels::set_active(kernels::Isa::Avx2);
      } else {
        std::cerr << "error: unknown --isa '" << isa << "'\n\n" << app.help();
        return kExitUsage;
      }
    }
    return action();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}
