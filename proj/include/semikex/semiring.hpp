#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semikex/bytes.hpp"

namespace semikex {

// Dense element index into a SemiringTable. Tables hold at most 256 elements,
// so an id is exactly one byte on the wire.
using ElementId = std::uint8_t;
using ElementPair = std::pair<ElementId, ElementId>;

inline constexpr std::size_t kMaxSemiringSize = 256;

/// A finite semiring given by explicit addition and multiplication tables.
///
/// Immutable after construction. Construction checks totality and that any
/// declared zero/one actually behaves as such; it does not check the semiring
/// axioms (see validate_axioms).
class SemiringTable {
 public:
  /// `add` and `mul` are row-major size x size tables: add[x*size+y] = x+y.
  /// Declared zero/one are compared with auto-detection; a mismatch throws.
  SemiringTable(std::vector<std::string> names, std::vector<ElementId> add,
                std::vector<ElementId> mul,
                std::optional<ElementId> declared_zero = std::nullopt,
                std::optional<ElementId> declared_one = std::nullopt);

  std::size_t size() const { return size_; }

  // Checked lookups; throw std::out_of_range for ids >= size().
  ElementId add(ElementId x, ElementId y) const;
  ElementId mul(ElementId x, ElementId y) const;

  // Unchecked lookups for inner loops.
  ElementId add_unchecked(ElementId x, ElementId y) const { return add_[x * size_ + y]; }
  ElementId mul_unchecked(ElementId x, ElementId y) const { return mul_[x * size_ + y]; }

  std::span<const ElementId> add_table() const { return add_; }
  std::span<const ElementId> mul_table() const { return mul_; }
  // Same tables widened to int32 for gather-based kernels.
  std::span<const std::int32_t> add_table_wide() const { return add_wide_; }
  std::span<const std::int32_t> mul_table_wide() const { return mul_wide_; }

  const std::string& name(ElementId x) const { return names_.at(x); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<ElementId> find(std::string_view name) const;
  ElementId id(std::string_view name) const;  // throws ParseError if unknown

  // zero: additive neutral and multiplicatively absorbing. one: multiplicative identity.
  std::optional<ElementId> zero() const { return zero_; }
  std::optional<ElementId> one() const { return one_; }

  // size (2-byte BE) || add table || mul table. Names are not part of it.
  Bytes canonical_bytes() const;
  Digest digest() const { return sha256(canonical_bytes()); }

  // Serialize in the table file format (round-trips through load_table).
  std::string to_text() const;

  bool operator==(const SemiringTable& other) const {
    return add_ == other.add_ && mul_ == other.mul_;
  }

 private:
  std::size_t size_;
  std::vector<std::string> names_;
  std::vector<ElementId> add_;
  std::vector<ElementId> mul_;
  std::vector<std::int32_t> add_wide_;
  std::vector<std::int32_t> mul_wide_;
  std::optional<ElementId> zero_;
  std::optional<ElementId> one_;
};

using TablePtr = std::shared_ptr<const SemiringTable>;

/// Parse the text table format:
///
///     semiring <size>
///     elements <name_0> ... <name_{size-1}>
///     [zero <name>] [one <name>]
///     add
///     <size rows of size names>
///     mul
///     <size rows of size names>
///
/// `#` starts a comment. Throws ParseError.
SemiringTable load_table(std::string_view text);
SemiringTable load_table_file(const std::string& path);

// Built-in tables. maze20 is the 20-element congruence-simple semiring with
// elements 0,a,b,...,r,1 (ids 0..19 in that order).
TablePtr builtin_maze20();
TablePtr builtin_boolean();
std::string_view maze20_text();

// Component-wise product semiring on pairs; element (x,y) has id x*b.size()+y.
SemiringTable direct_product(const SemiringTable& a, const SemiringTable& b);

enum class Law { AddAssociative, MulAssociative, LeftDistributive, RightDistributive };
std::string_view law_name(Law law);

struct AxiomViolation {
  Law law;
  ElementId x, y, z;
  bool operator==(const AxiomViolation&) const = default;
};

struct ValidationReport {
  std::vector<AxiomViolation> violations;
  bool additive_commutative = false;
  bool multiplicative_commutative = false;
  bool additive_idempotent = false;

  bool ok() const { return violations.empty(); }
};

/// Exhaustive scan over all triples of both associativities and both
/// distributive laws, plus commutativity and additive idempotence flags.
ValidationReport validate_axioms(const SemiringTable& t);

struct SpecialElements {
  std::optional<ElementId> additive_neutral;
  std::optional<ElementId> multiplicative_identity;
  std::optional<ElementId> multiplicative_absorbing;
  std::optional<ElementId> additive_absorbing;
};

SpecialElements find_special_elements(const SemiringTable& t);

// {r : r*s = s*r for all s}, ascending.
std::vector<ElementId> center(const SemiringTable& t);

class CongruencePartition {
 public:
  explicit CongruencePartition(std::vector<std::vector<ElementId>> blocks);

  const std::vector<std::vector<ElementId>>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }
  std::size_t block_of(ElementId x) const { return block_index_.at(x); }
  bool related(ElementId x, ElementId y) const { return block_of(x) == block_of(y); }

  bool operator==(const CongruencePartition&) const = default;

 private:
  std::vector<std::vector<ElementId>> blocks_;  // each sorted; ordered by first element
  std::vector<std::size_t> block_index_;
};

/// Smallest congruence containing every seed pair (union-find saturation).
CongruencePartition congruence_closure(const SemiringTable& t,
                                       std::span<const ElementPair> seed_pairs);

struct SimplicityResult {
  bool simple = false;
  // Set when not simple: a pair whose closure is a proper nontrivial congruence.
  std::optional<ElementPair> witness_pair;
  std::optional<CongruencePartition> witness;
};

SimplicityResult is_congruence_simple(const SemiringTable& t);

// x with (i) z+y = x implies z = x or y = x, and (ii) x+y = y+x = x for all y.
bool satisfies_irreducibility_hypotheses(const SemiringTable& t, ElementId x);
std::optional<ElementId> irreducibility_witness(const SemiringTable& t);

// Two-sided multiplicative inverse, if the table has a one and x has one.
std::optional<ElementId> multiplicative_inverse(const SemiringTable& t, ElementId x);

/// Tables known locally, addressed by digest. Parameter files only carry the
/// digest of their semiring, so readers resolve it here.
class TableRegistry {
 public:
  TableRegistry();  // preloaded with the built-in tables

  TablePtr add(TablePtr table);
  TablePtr find(const Digest& digest) const;  // nullptr if unknown

 private:
  std::map<Digest, TablePtr> tables_;
};

}  // namespace semikex
