#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "semikex/semiring.hpp"

namespace semikex {

struct BenchRow {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::uint64_t bound = 0;
  std::string op;
  std::uint64_t median_ns = 0;
  std::size_t iters = 0;
};

inline constexpr std::size_t kMinBenchRuns = 9;

struct SetupBenchConfig {
  std::vector<std::size_t> dims{16, 32, 64, 128};
  std::size_t n = 4;
  std::size_t degree = 3;
  std::size_t runs = kMinBenchRuns;
  std::uint64_t seed = 1;
  TablePtr table;  // null: built-in 20-element table
};

// Times build_commuting_vector on a random dim x dim matrix; op = "setup".
std::vector<BenchRow> bench_setup(const SetupBenchConfig& cfg);

struct ActBenchConfig {
  std::vector<std::size_t> ns{2, 4, 8, 16};
  std::size_t dim = 16;
  std::uint64_t bound = 1u << 16;
  std::size_t degree = 3;
  std::size_t runs = kMinBenchRuns;
  std::uint64_t seed = 1;
  TablePtr table;
};

// Times circ_act of a random private circulant on a commuting vector; op = "act".
std::vector<BenchRow> bench_act(const ActBenchConfig& cfg);

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& r);

// Ratios median[k+1] / median[k] of consecutive rows.
std::vector<double> successive_ratios(const std::vector<BenchRow>& rows);

}  // namespace semikex
