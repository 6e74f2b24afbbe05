#include "semikex/semiring.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "semikex/error.hpp"

namespace semikex {

namespace {

std::optional<ElementId> detect_zero(std::size_t n, const std::vector<ElementId>& add,
                                     const std::vector<ElementId>& mul) {
  for (std::size_t z = 0; z < n; ++z) {
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x) {
      ok = add[z * n + x] == x && add[x * n + z] == x && mul[z * n + x] == z &&
           mul[x * n + z] == z;
    }
    if (ok) return static_cast<ElementId>(z);
  }
  return std::nullopt;
}

std::optional<ElementId> detect_one(std::size_t n, const std::vector<ElementId>& mul) {
  for (std::size_t e = 0; e < n; ++e) {
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x) ok = mul[e * n + x] == x && mul[x * n + e] == x;
    if (ok) return static_cast<ElementId>(e);
  }
  return std::nullopt;
}

}  // namespace

SemiringTable::SemiringTable(std::vector<std::string> names, std::vector<ElementId> add,
                             std::vector<ElementId> mul, std::optional<ElementId> declared_zero,
                             std::optional<ElementId> declared_one)
    : size_(names.size()), names_(std::move(names)), add_(std::move(add)), mul_(std::move(mul)) {
  if (size_ == 0) throw Error("semiring must have at least one element");
  if (size_ > kMaxSemiringSize) {
    throw Error("semiring has " + std::to_string(size_) + " elements; at most 256 supported");
  }
  if (add_.size() != size_ * size_ || mul_.size() != size_ * size_) {
    throw Error("non-square table");
  }
  for (auto v : add_) {
    if (v >= size_) throw Error("addition table holds out-of-range element id");
  }
  for (auto v : mul_) {
    if (v >= size_) throw Error("multiplication table holds out-of-range element id");
  }
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw Error("duplicate names: '" + n + "'");
  }

  zero_ = detect_zero(size_, add_, mul_);
  one_ = detect_one(size_, mul_);
  if (declared_zero && declared_zero != zero_) {
    throw Error("declared zero '" + names_.at(*declared_zero) + "' does not behave as zero");
  }
  if (declared_one && declared_one != one_) {
    throw Error("declared one '" + names_.at(*declared_one) + "' does not behave as one");
  }

  add_wide_.assign(add_.begin(), add_.end());
  mul_wide_.assign(mul_.begin(), mul_.end());
}

ElementId SemiringTable::add(ElementId x, ElementId y) const {
  if (x >= size_ || y >= size_) throw std::out_of_range("element id out of range");
  return add_unchecked(x, y);
}

ElementId SemiringTable::mul(ElementId x, ElementId y) const {
  if (x >= size_ || y >= size_) throw std::out_of_range("element id out of range");
  return mul_unchecked(x, y);
}

std::optional<ElementId> SemiringTable::find(std::string_view name) const {
  for (std::size_t i = 0; i < size_; ++i) {
    if (names_[i] == name) return static_cast<ElementId>(i);
  }
  return std::nullopt;
}

ElementId SemiringTable::id(std::string_view name) const {
  auto x = find(name);
  if (!x) throw ParseError("unknown element name '" + std::string(name) + "'");
  return *x;
}

Bytes SemiringTable::canonical_bytes() const {
  Bytes out;
  out.reserve(2 + 2 * add_.size());
  put_u16(out, static_cast<std::uint16_t>(size_));
  put_bytes(out, add_);
  put_bytes(out, mul_);
  return out;
}

std::string SemiringTable::to_text() const {
  std::ostringstream os;
  os << "semiring " << size_ << "\nelements";
  for (const auto& n : names_) os << ' ' << n;
  os << '\n';
  for (auto [label, tbl] : {std::pair{"add", &add_}, std::pair{"mul", &mul_}}) {
    os << label << '\n';
    for (std::size_t x = 0; x < size_; ++x) {
      for (std::size_t y = 0; y < size_; ++y) {
        if (y) os << ' ';
        os << names_[(*tbl)[x * size_ + y]];
      }
      os << '\n';
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Table file parsing

namespace {

std::vector<std::vector<std::string>> tokenize_lines(std::string_view text) {
  std::vector<std::vector<std::string>> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string tok; ls >> tok;) toks.push_back(tok);
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  return lines;
}

}  // namespace

SemiringTable load_table(std::string_view text) {
  auto lines = tokenize_lines(text);
  std::size_t pos = 0;

  if (lines.empty() || lines[0].size() != 2 || lines[0][0] != "semiring") {
    throw ParseError("malformed header: expected 'semiring <size>'");
  }
  std::size_t size = 0;
  try {
    std::size_t used = 0;
    long long v = std::stoll(lines[0][1], &used);
    if (used != lines[0][1].size() || v <= 0) throw std::invalid_argument("size");
    size = static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw ParseError("malformed header: bad size '" + lines[0][1] + "'");
  }
  if (size > kMaxSemiringSize) {
    throw ParseError("semiring size " + std::to_string(size) + " exceeds limit 256");
  }
  ++pos;

  if (pos >= lines.size() || lines[pos][0] != "elements") {
    throw ParseError("malformed header: expected 'elements' line");
  }
  std::vector<std::string> names(lines[pos].begin() + 1, lines[pos].end());
  if (names.size() != size) {
    throw ParseError("malformed header: 'elements' lists " + std::to_string(names.size()) +
                     " names for size " + std::to_string(size));
  }
  {
    std::unordered_set<std::string> seen;
    for (const auto& n : names) {
      if (!seen.insert(n).second) throw ParseError("duplicate names: '" + n + "'");
    }
  }
  ++pos;

  auto lookup = [&](const std::string& n) -> ElementId {
    for (std::size_t i = 0; i < size; ++i) {
      if (names[i] == n) return static_cast<ElementId>(i);
    }
    throw ParseError("unknown element name '" + n + "'");
  };

  std::optional<ElementId> declared_zero, declared_one;
  std::vector<ElementId> add, mul;
  bool have_add = false, have_mul = false;

  while (pos < lines.size()) {
    const auto& head = lines[pos];
    if ((head[0] == "zero" || head[0] == "one") && head.size() == 2) {
      (head[0] == "zero" ? declared_zero : declared_one) = lookup(head[1]);
      ++pos;
      continue;
    }
    if ((head[0] == "add" || head[0] == "mul") && head.size() == 1) {
      bool is_add = head[0] == "add";
      if ((is_add && have_add) || (!is_add && have_mul)) {
        throw ParseError("malformed header: duplicate '" + head[0] + "' section");
      }
      auto& tbl = is_add ? add : mul;
      ++pos;
      for (std::size_t row = 0; row < size; ++row, ++pos) {
        if (pos >= lines.size()) throw ParseError("non-square table: missing rows in " + head[0]);
        const auto& cells = lines[pos];
        if (cells.size() != size) {
          throw ParseError("non-square table: row " + std::to_string(row) + " of " + head[0] +
                           " has " + std::to_string(cells.size()) + " entries, expected " +
                           std::to_string(size));
        }
        for (const auto& c : cells) tbl.push_back(lookup(c));
      }
      (is_add ? have_add : have_mul) = true;
      continue;
    }
    throw ParseError("malformed header: unexpected line starting with '" + head[0] + "'");
  }
  if (!have_add || !have_mul) throw ParseError("malformed header: missing add or mul section");

  try {
    return SemiringTable(std::move(names), std::move(add), std::move(mul), declared_zero,
                         declared_one);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

SemiringTable load_table_file(const std::string& path) { return load_table(read_text_file(path)); }

SemiringTable direct_product(const SemiringTable& a, const SemiringTable& b) {
  const std::size_t na = a.size(), nb = b.size(), n = na * nb;
  if (n > kMaxSemiringSize) throw Error("direct product too large");
  std::vector<std::string> names;
  for (std::size_t x = 0; x < na; ++x) {
    for (std::size_t y = 0; y < nb; ++y) names.push_back("(" + a.names()[x] + "," + b.names()[y] + ")");
  }
  std::vector<ElementId> add(n * n), mul(n * n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      auto px = static_cast<ElementId>(p / nb), py = static_cast<ElementId>(p % nb);
      auto qx = static_cast<ElementId>(q / nb), qy = static_cast<ElementId>(q % nb);
      add[p * n + q] = static_cast<ElementId>(a.add_unchecked(px, qx) * nb + b.add_unchecked(py, qy));
      mul[p * n + q] = static_cast<ElementId>(a.mul_unchecked(px, qx) * nb + b.mul_unchecked(py, qy));
    }
  }
  return SemiringTable(std::move(names), std::move(add), std::move(mul));
}

// ---------------------------------------------------------------------------
// Structural checks

std::string_view law_name(Law law) {
  switch (law) {
    case Law::AddAssociative: return "additive associativity";
    case Law::MulAssociative: return "multiplicative associativity";
    case Law::LeftDistributive: return "left distributivity";
    case Law::RightDistributive: return "right distributivity";
  }
  return "?";
}

ValidationReport validate_axioms(const SemiringTable& t) {
  ValidationReport r;
  const std::size_t n = t.size();
  auto A = [&](std::size_t x, std::size_t y) { return t.add_unchecked(ElementId(x), ElementId(y)); };
  auto M = [&](std::size_t x, std::size_t y) { return t.mul_unchecked(ElementId(x), ElementId(y)); };

  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t z = 0; z < n; ++z) {
        auto record = [&](Law law) {
          r.violations.push_back({law, ElementId(x), ElementId(y), ElementId(z)});
        };
        if (A(A(x, y), z) != A(x, A(y, z))) record(Law::AddAssociative);
        if (M(M(x, y), z) != M(x, M(y, z))) record(Law::MulAssociative);
        // x(y+z) = xy + xz
        if (M(x, A(y, z)) != A(M(x, y), M(x, z))) record(Law::LeftDistributive);
        // (y+z)x = yx + zx
        if (M(A(y, z), x) != A(M(y, x), M(z, x))) record(Law::RightDistributive);
      }
    }
  }

  r.additive_commutative = r.multiplicative_commutative = r.additive_idempotent = true;
  for (std::size_t x = 0; x < n; ++x) {
    if (A(x, x) != x) r.additive_idempotent = false;
    for (std::size_t y = 0; y < n; ++y) {
      if (A(x, y) != A(y, x)) r.additive_commutative = false;
      if (M(x, y) != M(y, x)) r.multiplicative_commutative = false;
    }
  }
  return r;
}

SpecialElements find_special_elements(const SemiringTable& t) {
  SpecialElements s;
  const std::size_t n = t.size();
  for (std::size_t e = 0; e < n; ++e) {
    auto x = ElementId(e);
    bool add_neutral = true, mul_identity = true, mul_absorbing = true, add_absorbing = true;
    for (std::size_t k = 0; k < n; ++k) {
      auto y = ElementId(k);
      add_neutral &= t.add_unchecked(x, y) == y && t.add_unchecked(y, x) == y;
      mul_identity &= t.mul_unchecked(x, y) == y && t.mul_unchecked(y, x) == y;
      mul_absorbing &= t.mul_unchecked(x, y) == x && t.mul_unchecked(y, x) == x;
      add_absorbing &= t.add_unchecked(x, y) == x && t.add_unchecked(y, x) == x;
    }
    if (add_neutral && !s.additive_neutral) s.additive_neutral = x;
    if (mul_identity && !s.multiplicative_identity) s.multiplicative_identity = x;
    if (mul_absorbing && !s.multiplicative_absorbing) s.multiplicative_absorbing = x;
    if (add_absorbing && !s.additive_absorbing) s.additive_absorbing = x;
  }
  return s;
}

std::vector<ElementId> center(const SemiringTable& t) {
  std::vector<ElementId> out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    bool central = true;
    for (std::size_t s = 0; s < t.size() && central; ++s) {
      central = t.mul_unchecked(ElementId(r), ElementId(s)) == t.mul_unchecked(ElementId(s), ElementId(r));
    }
    if (central) out.push_back(ElementId(r));
  }
  return out;
}

CongruencePartition::CongruencePartition(std::vector<std::vector<ElementId>> blocks)
    : blocks_(std::move(blocks)) {
  std::size_t total = 0;
  for (auto& b : blocks_) {
    if (b.empty()) throw Error("congruence partition has an empty block");
    std::sort(b.begin(), b.end());
    total += b.size();
  }
  std::sort(blocks_.begin(), blocks_.end(),
            [](const auto& l, const auto& r) { return l.front() < r.front(); });
  block_index_.assign(total, total);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    for (auto x : blocks_[i]) {
      if (x >= total || block_index_[x] != total) {
        throw Error("congruence partition blocks are not a partition of 0..size-1");
      }
      block_index_[x] = i;
    }
  }
}

CongruencePartition congruence_closure(const SemiringTable& t,
                                       std::span<const ElementPair> seed_pairs) {
  const std::size_t n = t.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  std::vector<ElementPair> work(seed_pairs.begin(), seed_pairs.end());
  for (auto [x, y] : work) {
    if (x >= n || y >= n) throw std::out_of_range("seed pair element out of range");
  }
  // Every merged pair pushes its four one-sided translates for each c; the
  // equivalence closure of all pushed pairs is then compatible with + and *.
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    auto rx = find(x), ry = find(y);
    if (rx == ry) continue;
    parent[rx] = ry;
    for (std::size_t k = 0; k < n; ++k) {
      auto c = ElementId(k);
      work.emplace_back(t.add_unchecked(x, c), t.add_unchecked(y, c));
      work.emplace_back(t.add_unchecked(c, x), t.add_unchecked(c, y));
      work.emplace_back(t.mul_unchecked(x, c), t.mul_unchecked(y, c));
      work.emplace_back(t.mul_unchecked(c, x), t.mul_unchecked(c, y));
    }
  }

  std::map<std::size_t, std::vector<ElementId>> by_root;
  for (std::size_t x = 0; x < n; ++x) by_root[find(x)].push_back(ElementId(x));
  std::vector<std::vector<ElementId>> blocks;
  for (auto& [root, members] : by_root) blocks.push_back(std::move(members));
  return CongruencePartition(std::move(blocks));
}

SimplicityResult is_congruence_simple(const SemiringTable& t) {
  SimplicityResult r;
  if (t.size() < 2) throw Error("congruence simplicity needs at least two elements");
  for (std::size_t a = 0; a < t.size(); ++a) {
    for (std::size_t b = a + 1; b < t.size(); ++b) {
      ElementPair seed{ElementId(a), ElementId(b)};
      auto part = congruence_closure(t, std::span(&seed, 1));
      if (part.block_count() != 1) {
        r.witness_pair = seed;
        r.witness = std::move(part);
        return r;
      }
    }
  }
  r.simple = true;
  return r;
}

bool satisfies_irreducibility_hypotheses(const SemiringTable& t, ElementId x) {
  const std::size_t n = t.size();
  for (std::size_t k = 0; k < n; ++k) {
    auto y = ElementId(k);
    if (t.add_unchecked(x, y) != x || t.add_unchecked(y, x) != x) return false;
  }
  for (std::size_t z = 0; z < n; ++z) {
    for (std::size_t y = 0; y < n; ++y) {
      if (t.add_unchecked(ElementId(z), ElementId(y)) == x && z != x && y != x) return false;
    }
  }
  return true;
}

std::optional<ElementId> irreducibility_witness(const SemiringTable& t) {
  for (std::size_t x = 0; x < t.size(); ++x) {
    if (satisfies_irreducibility_hypotheses(t, ElementId(x))) return ElementId(x);
  }
  return std::nullopt;
}

std::optional<ElementId> multiplicative_inverse(const SemiringTable& t, ElementId x) {
  auto one = t.one();
  if (!one || x >= t.size()) return std::nullopt;
  for (std::size_t y = 0; y < t.size(); ++y) {
    if (t.mul_unchecked(x, ElementId(y)) == *one && t.mul_unchecked(ElementId(y), x) == *one) {
      return ElementId(y);
    }
  }
  return std::nullopt;
}

TableRegistry::TableRegistry() {
  add(builtin_maze20());
  add(builtin_boolean());
}

TablePtr TableRegistry::add(TablePtr table) {
  auto [it, inserted] = tables_.emplace(table->digest(), table);
  return it->second;
}

TablePtr TableRegistry::find(const Digest& digest) const {
  auto it = tables_.find(digest);
  return it == tables_.end() ? nullptr : it->second;
}

}  // namespace semikex
