#include "semikex/bench.hpp"

#include <algorithm>
#include <chrono>

#include "semikex/circulant.hpp"
#include "semikex/error.hpp"
#include "semikex/paramgen.hpp"

namespace semikex {

namespace {

template <class F>
std::uint64_t median_ns(std::size_t runs, F&& f) {
  if (runs < kMinBenchRuns) throw Error("benchmarks need at least 9 runs");
  std::vector<std::uint64_t> t;
  t.reserve(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    const auto start = std::chrono::steady_clock::now();
    f();
    t.push_back(static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count()));
  }
  std::nth_element(t.begin(), t.begin() + t.size() / 2, t.end());
  return t[t.size() / 2];
}

MatrixSR random_matrix(const TablePtr& table, std::size_t dim, Rng& rng) {
  std::vector<ElementId> e(dim * dim);
  for (auto& x : e) x = static_cast<ElementId>(rng.uniform(0, table->size() - 1));
  return MatrixSR(table, dim, std::move(e));
}

}  // namespace

std::vector<BenchRow> bench_setup(const SetupBenchConfig& cfg) {
  const TablePtr table = cfg.table ? cfg.table : builtin_maze20();
  std::vector<BenchRow> rows;
  for (auto dim : cfg.dims) {
    Rng rng(cfg.seed + dim);
    const MatrixSR m = random_matrix(table, dim, rng);
    auto run = [&] { build_commuting_vector(m, cfg.n, cfg.degree, rng); };
    run();  // warm-up
    rows.push_back({cfg.n, dim, 0, "setup", median_ns(cfg.runs, run), cfg.runs});
  }
  return rows;
}

std::vector<BenchRow> bench_act(const ActBenchConfig& cfg) {
  const TablePtr table = cfg.table ? cfg.table : builtin_maze20();
  std::vector<BenchRow> rows;
  for (auto n : cfg.ns) {
    Rng rng(cfg.seed + n);
    const MatrixSR m = random_matrix(table, cfg.dim, rng);
    const CommutingVector v = build_commuting_vector(m, n, cfg.degree, rng).v;
    const CirculantNat c = circ_random(n, cfg.bound, rng);
    auto run = [&] { circ_act(c, v); };
    run();
    rows.push_back({n, cfg.dim, cfg.bound, "act", median_ns(cfg.runs, run), cfg.runs});
  }
  return rows;
}

std::string bench_csv_header() { return "n,dim,bound,op,median_ns,iters"; }

std::string bench_csv_row(const BenchRow& r) {
  return std::to_string(r.n) + "," + std::to_string(r.dim) + "," + std::to_string(r.bound) + "," + r.op + "," +
         std::to_string(r.median_ns) + "," + std::to_string(r.iters);
}

std::vector<double> successive_ratios(const std::vector<BenchRow>& rows) {
  std::vector<double> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    out.push_back(static_cast<double>(rows[i].median_ns) / static_cast<double>(std::max<std::uint64_t>(1, rows[i - 1].median_ns)));
  }
  return out;
}

}  // namespace semikex
