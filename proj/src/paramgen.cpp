#include "semikex/paramgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semikex/error.hpp"

namespace semikex {

std::size_t Partition::total() const {
  return std::accumulate(parts.begin(), parts.end(), std::size_t{0}) + padding;
}

std::uint64_t Partition::lcm() const {
  std::uint64_t l = 1;
  for (auto a : parts) l = std::lcm(l, static_cast<std::uint64_t>(a));
  return l;
}

Partition best_partition(std::size_t total) {
  if (total == 0) throw Error("partition total must be positive");
  if (total > kPartitionDpLimit) throw Error("total exceeds partition DP limit 64");
  if (total == 1) return Partition{{1}, 0};

  std::vector<std::size_t> primes;
  for (std::size_t p = 2; p <= total; ++p) {
    bool prime = true;
    for (std::size_t d = 2; d * d <= p; ++d) prime = prime && p % d != 0;
    if (prime) primes.push_back(p);
  }

  // best[s]: max product of prime powers (distinct primes) with sum <= s.
  std::vector<std::uint64_t> best(total + 1, 1);
  std::vector<std::vector<std::size_t>> choice(primes.size(), std::vector<std::size_t>(total + 1, 0));
  for (std::size_t pi = 0; pi < primes.size(); ++pi) {
    std::vector<std::uint64_t> next = best;
    for (std::size_t s = 0; s <= total; ++s) {
      for (std::size_t q = primes[pi]; q <= s; q *= primes[pi]) {
        if (best[s - q] * q > next[s]) {
          next[s] = best[s - q] * q;
          choice[pi][s] = q;
        }
      }
    }
    best = std::move(next);
  }

  Partition p;
  std::size_t s = total;
  for (std::size_t pi = primes.size(); pi-- > 0;) {
    if (auto q = choice[pi][s]) {
      p.parts.push_back(q);
      s -= q;
    }
  }
  std::sort(p.parts.begin(), p.parts.end());
  p.padding = total - std::accumulate(p.parts.begin(), p.parts.end(), std::size_t{0});
  return p;
}

LandauBounds landau_bounds(std::size_t total) {
  if (total < 3) throw Error("landau bounds need total >= 3");
  const double n = static_cast<double>(total);
  const double ln = std::log(n);
  return {n * ln, std::sqrt(n) * ln * (1.0 + std::log(ln) / (2.0 * ln))};
}

std::vector<std::size_t> block_of_index(const Partition& p) {
  std::vector<std::size_t> block;
  block.reserve(p.total());
  for (std::size_t b = 0; b < p.parts.size(); ++b) block.insert(block.end(), p.parts[b], b);
  block.insert(block.end(), p.padding, p.parts.size());
  return block;
}

MatrixSR base_block_matrix(const Partition& p, TablePtr table) {
  if (p.total() == 0) throw Error("empty partition");
  if (std::any_of(p.parts.begin(), p.parts.end(), [](auto a) { return a == 0; })) {
    throw Error("partition parts must be positive");
  }
  const auto one = table->one();
  if (!one || !table->zero()) throw Error("block matrix needs a semiring with 0 and 1");
  MatrixSR m = MatrixSR::zeros(table, p.total());
  std::size_t offset = 0;
  for (auto a : p.parts) {
    for (std::size_t i = 0; i < a; ++i) m.set(offset + i, offset + (i + 1) % a, *one);
    offset += a;
  }
  for (std::size_t i = 0; i < p.padding; ++i) m.set(offset + i, offset + i, *one);
  return m;
}

MatrixSR randomize_upper_blocks(const MatrixSR& a, const Partition& p, double density, Rng& rng) {
  if (!(density >= 0.0 && density <= 1.0)) throw Error("density must lie in [0, 1]");
  if (a.dim() != p.total()) {
    throw Error("shape mismatch: matrix dim " + std::to_string(a.dim()) + " vs partition total " +
                std::to_string(p.total()));
  }
  const auto& t = a.table();
  const auto zero = t.zero();
  if (!zero) throw Error("randomization needs a semiring with 0");
  std::vector<ElementId> nonzero;
  for (std::size_t x = 0; x < t.size(); ++x) {
    if (x != *zero) nonzero.push_back(static_cast<ElementId>(x));
  }

  const auto block = block_of_index(p);
  MatrixSR out = a;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) {
      if (block[i] > block[j] && a.at(i, j) != *zero) {
        throw Error("shape mismatch: nonzero entry below the block diagonal");
      }
      if (block[i] < block[j] && rng.unit() < density) {
        out.set(i, j, nonzero[rng.uniform(0, nonzero.size() - 1)]);
      }
    }
  }
  return out;
}

GeneralizedPermutation random_generalized_permutation(std::size_t dim, const SemiringTable& table,
                                                      Rng& rng) {
  if (dim == 0) throw Error("dimension must be positive");
  std::vector<ElementId> units;
  for (std::size_t x = 0; x < table.size(); ++x) {
    if (multiplicative_inverse(table, static_cast<ElementId>(x))) units.push_back(static_cast<ElementId>(x));
  }
  if (units.empty()) throw Error("semiring has no invertible element");

  GeneralizedPermutation g;
  g.perm.resize(dim);
  std::iota(g.perm.begin(), g.perm.end(), std::size_t{0});
  for (std::size_t i = dim - 1; i > 0; --i) std::swap(g.perm[i], g.perm[rng.uniform(0, i)]);
  g.units.resize(dim);
  for (auto& u : g.units) u = units[rng.uniform(0, units.size() - 1)];
  return g;
}

PublicMatrix build_public_matrix(std::size_t total, TablePtr table, double density, Rng& rng,
                                 std::uint64_t measure_cap) {
  MatrixProvenance prov;
  prov.partition = best_partition(total);
  prov.seed = rng.seed();
  prov.density = density;
  prov.certified_lower_bound = prov.partition.lcm();

  MatrixSR base = base_block_matrix(prov.partition, table);
  MatrixSR randomized = randomize_upper_blocks(base, prov.partition, density, rng);
  prov.gp = random_generalized_permutation(base.dim(), *table, rng);
  MatrixSR m = conjugate(randomized, prov.gp);

  if (prov.certified_lower_bound <= measure_cap) {
    prov.measured = order_profile(m, measure_cap);
    if (prov.measured->exact && prov.measured->distinct_powers < prov.certified_lower_bound) {
      throw Error("measured order " + std::to_string(prov.measured->distinct_powers) +
                  " below certified bound " + std::to_string(prov.certified_lower_bound));
    }
  }
  return {std::move(m), std::move(prov)};
}

MatrixSR eval_polynomial(const Polynomial& p, const MatrixSR& m) {
  const auto& t = m.table();
  const auto zero = t.zero();
  if (!zero) throw Error("polynomial evaluation needs a semiring with 0");
  std::vector<std::size_t> degrees;  // nonzero terms, descending
  for (std::size_t k = p.size(); k-- > 0;) {
    if (p[k] >= t.size()) throw Error("polynomial coefficient out of range");
    if (p[k] != *zero) degrees.push_back(k);
  }
  if (degrees.empty()) return MatrixSR::zeros(m.table_ptr(), m.dim());

  const MatrixSR id = MatrixSR::identity(m.table_ptr(), m.dim());
  MatrixSR acc = scalar_mul(p[degrees.front()], id);
  for (std::size_t i = 1; i < degrees.size(); ++i) {
    acc = mat_add(mat_mul(acc, mat_pow(m, degrees[i - 1] - degrees[i])), scalar_mul(p[degrees[i]], id));
  }
  if (degrees.back() > 0) acc = mat_mul(acc, mat_pow(m, degrees.back()));
  return acc;
}

CommutingVector commuting_vector_from_polynomials(const MatrixSR& m,
                                                  const std::vector<Polynomial>& polys) {
  const auto c = center(m.table());
  std::vector<MatrixSR> mats;
  mats.reserve(polys.size());
  for (const auto& p : polys) {
    for (auto coeff : p) {
      if (std::find(c.begin(), c.end(), coeff) == c.end()) {
        throw Error("polynomial coefficient is not central");
      }
    }
    mats.push_back(eval_polynomial(p, m));
  }
  for (const auto& x : mats) {
    if (!commutes(x, m)) throw Error("commuting vector entry does not commute with M");
  }
  return CommutingVector::make(std::move(mats));
}

CommutingBuild build_commuting_vector(const MatrixSR& m, std::size_t n, std::size_t max_degree,
                                      Rng& rng) {
  if (n == 0) throw Error("vector length must be positive");
  if (max_degree == 0) throw Error("max degree must be at least 1");
  const auto& t = m.table();
  const auto c = center(t);
  const auto zero = t.zero();
  if (std::none_of(c.begin(), c.end(), [&](ElementId x) { return !zero || x != *zero; })) {
    throw Error("center = {0}: cannot form nonzero polynomials");
  }

  CommutingBuild out{CommutingVector::unchecked({m}), {}};
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial p(max_degree + 1);
    std::size_t nonzero = 0;
    do {
      for (auto& coeff : p) coeff = c[rng.uniform(0, c.size() - 1)];
      nonzero = static_cast<std::size_t>(std::count_if(p.begin(), p.end(), [&](ElementId x) { return !zero || x != *zero; }));
    } while (nonzero < 2);
    out.polynomials.push_back(std::move(p));
  }
  out.v = commuting_vector_from_polynomials(m, out.polynomials);
  return out;
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::uint8_t kParamsMagic[4] = {'S', 'K', 'X', 'P'};
constexpr std::uint8_t kParamsVersion = 0x01;
}  // namespace

Bytes encode_params(const PublicParams& p) {
  if (p.v.dim() != p.m.dim()) throw Error("params: v and M dimensions differ");
  Bytes out;
  put_bytes(out, kParamsMagic);
  put_u8(out, kParamsVersion);
  put_bytes(out, p.table->digest());
  put_u16(out, static_cast<std::uint16_t>(p.dim()));
  put_u16(out, static_cast<std::uint16_t>(p.n()));
  put_u64(out, p.entry_bound);
  encode_matrix(out, p.m);
  for (const auto& x : p.v.mats()) encode_matrix(out, x);
  return out;
}

PublicParams decode_params(std::span<const std::uint8_t> data, const TableRegistry& registry) {
  ByteReader in(data);
  auto magic = in.take(4);
  if (!std::equal(magic.begin(), magic.end(), kParamsMagic)) throw ParseError("not a parameter file (bad magic)");
  if (auto ver = in.u8(); ver != kParamsVersion) {
    throw ParseError("unsupported parameter file version " + std::to_string(ver));
  }
  Digest digest;
  auto d = in.take(digest.size());
  std::copy(d.begin(), d.end(), digest.begin());
  TablePtr table = registry.find(digest);
  if (!table) throw ParseError("parameter file names an unknown semiring table " + to_hex(digest));

  const std::size_t dim = in.u16();
  const std::size_t n = in.u16();
  const std::uint64_t bound = in.u64();
  if (n == 0) throw ParseError("parameter file has n = 0");
  if (bound == 0) throw ParseError("parameter file has entry bound 0");

  MatrixSR m = decode_matrix(in, table);
  if (m.dim() != dim) throw ParseError("parameter file: M dimension disagrees with header");
  std::vector<MatrixSR> mats;
  for (std::size_t i = 0; i < n; ++i) {
    mats.push_back(decode_matrix(in, table));
    if (mats.back().dim() != dim) throw ParseError("parameter file: v dimension disagrees with header");
  }
  if (!in.empty()) throw ParseError("parameter file has trailing bytes");

  for (const auto& x : mats) {
    if (!commutes(x, m)) throw ParseError("parameter file: v does not commute with M");
  }
  try {
    return PublicParams{table, std::move(m), CommutingVector::make(std::move(mats)), bound};
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("parameter file: ") + e.what());
  }
}

Digest params_hash(const PublicParams& p) { return sha256(encode_params(p)); }

GeneratedParams generate_params(const ParamsConfig& cfg) {
  if (cfg.n == 0 || cfg.n > 0xFFFF) throw Error("vector length must be in [1, 65535]");
  if (cfg.entry_bound == 0) throw Error("degenerate bound");
  TablePtr table = cfg.table ? cfg.table : builtin_maze20();
  Rng rng(cfg.seed);
  PublicMatrix pm = build_public_matrix(cfg.total, table, cfg.density, rng);
  CommutingBuild cb = build_commuting_vector(pm.m, cfg.n, cfg.max_degree, rng);
  return GeneratedParams{PublicParams{table, pm.m, std::move(cb.v), cfg.entry_bound},
                         std::move(pm.provenance), std::move(cb.polynomials)};
}

}  // namespace semikex
