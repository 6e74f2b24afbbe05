#include "semikex/matrix.hpp"

#include <functional>
#include <sstream>
#include <string_view>

#include "semikex/error.hpp"
#include "semikex/kernels.hpp"

namespace semikex {

namespace {

void require_same_shape(const MatrixSR& a, const MatrixSR& b) {
  if (a.dim() != b.dim()) {
    throw Error("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  if (a.table_ptr() != b.table_ptr() && !(a.table() == b.table())) {
    throw Error("matrices are over different semirings");
  }
}

}  // namespace

MatrixSR::MatrixSR(TablePtr table, std::size_t dim, ElementId fill)
    : table_(std::move(table)), dim_(dim), entries_(dim * dim, fill) {
  if (!table_) throw Error("matrix needs a semiring table");
  if (dim_ == 0) throw Error("matrix dimension must be positive");
  if (dim_ > 0xFFFF) throw Error("matrix dimension exceeds 65535");
  if (fill >= table_->size()) throw Error("fill element out of range");
}

MatrixSR::MatrixSR(TablePtr table, std::size_t dim, std::vector<ElementId> entries)
    : table_(std::move(table)), dim_(dim), entries_(std::move(entries)) {
  if (!table_) throw Error("matrix needs a semiring table");
  if (dim_ == 0) throw Error("matrix dimension must be positive");
  if (dim_ > 0xFFFF) throw Error("matrix dimension exceeds 65535");
  if (entries_.size() != dim_ * dim_) throw Error("matrix entry count does not match dim^2");
  for (auto e : entries_) {
    if (e >= table_->size()) throw Error("matrix entry out of range for its semiring");
  }
}

MatrixSR MatrixSR::zeros(TablePtr table, std::size_t dim) {
  auto z = table->zero();
  if (!z) throw Error("semiring has no zero");
  return MatrixSR(std::move(table), dim, *z);
}

MatrixSR MatrixSR::identity(TablePtr table, std::size_t dim) {
  auto one = table->one();
  if (!one) throw Error("semiring has no multiplicative identity");
  MatrixSR m = zeros(std::move(table), dim);
  for (std::size_t i = 0; i < dim; ++i) m.entries_[i * dim + i] = *one;
  return m;
}

void MatrixSR::set(std::size_t i, std::size_t j, ElementId v) {
  if (i >= dim_ || j >= dim_) throw std::out_of_range("matrix index out of range");
  if (v >= table_->size()) throw Error("matrix entry out of range for its semiring");
  entries_[i * dim_ + j] = v;
}

std::uint64_t MatrixSR::hash() const {
  std::string_view bytes(reinterpret_cast<const char*>(entries_.data()), entries_.size());
  return std::hash<std::string_view>{}(bytes) ^ (static_cast<std::uint64_t>(dim_) * 0x9E3779B97F4A7C15ULL);
}

bool MatrixSR::operator==(const MatrixSR& other) const {
  if (dim_ != other.dim_ || entries_ != other.entries_) return false;
  return table_ == other.table_ || *table_ == *other.table_;
}

MatrixSR mat_add(const MatrixSR& a, const MatrixSR& b) {
  require_same_shape(a, b);
  MatrixSR out(a.table_ptr(), a.dim(), ElementId{0});
  kernels::add(kernels::TableView::of(a.table()), a.entries().data(), b.entries().data(),
               out.mutable_entries().data(), a.entries().size());
  return out;
}

MatrixSR mat_mul(const MatrixSR& a, const MatrixSR& b) {
  require_same_shape(a, b);
  MatrixSR out(a.table_ptr(), a.dim(), ElementId{0});
  kernels::matmul(kernels::TableView::of(a.table()), a.entries().data(), b.entries().data(),
                  out.mutable_entries().data(), a.dim());
  return out;
}

MatrixSR mat_pow(const MatrixSR& a, std::uint64_t k) {
  if (k == 0) return MatrixSR::identity(a.table_ptr(), a.dim());
  std::optional<MatrixSR> result;
  MatrixSR base = a;
  while (true) {
    if (k & 1) result = result ? mat_mul(*result, base) : base;
    k >>= 1;
    if (k == 0) break;
    base = mat_mul(base, base);
  }
  return *result;
}

MatrixSR scalar_mul(ElementId c, const MatrixSR& a) {
  if (c >= a.table().size()) throw Error("scalar out of range");
  MatrixSR out = a;
  for (auto& e : out.mutable_entries()) e = a.table().mul_unchecked(c, e);
  return out;
}

bool commutes(const MatrixSR& a, const MatrixSR& b) { return mat_mul(a, b) == mat_mul(b, a); }

void encode_matrix(Bytes& out, const MatrixSR& a) {
  put_u16(out, static_cast<std::uint16_t>(a.dim()));
  put_bytes(out, a.entries());
}

Bytes encode_matrix(const MatrixSR& a) {
  Bytes out;
  out.reserve(2 + a.entries().size());
  encode_matrix(out, a);
  return out;
}

MatrixSR decode_matrix(ByteReader& in, TablePtr table) {
  std::size_t dim = in.u16();
  if (dim == 0) throw ParseError("matrix dimension is zero");
  auto raw = in.take(dim * dim);
  try {
    return MatrixSR(std::move(table), dim, std::vector<ElementId>(raw.begin(), raw.end()));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

std::string format_matrix(const MatrixSR& a) {
  std::ostringstream os;
  os << "matrix " << a.dim() << '\n';
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) {
      if (j) os << ' ';
      os << a.table().name(a.at(i, j));
    }
    os << '\n';
  }
  return os.str();
}

MatrixSR parse_matrix(std::string_view text, TablePtr table) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
  }
  if (tokens.size() < 2 || tokens[0] != "matrix") throw ParseError("expected 'matrix <dim>'");
  std::size_t dim = 0;
  try {
    dim = std::stoul(tokens[1]);
  } catch (const std::logic_error&) {
    throw ParseError("bad matrix dimension '" + tokens[1] + "'");
  }
  if (dim == 0 || tokens.size() != 2 + dim * dim) {
    throw ParseError("matrix body has " + std::to_string(tokens.size() - 2) + " entries, expected " +
                     std::to_string(dim * dim));
  }
  std::vector<ElementId> entries;
  entries.reserve(dim * dim);
  for (std::size_t i = 2; i < tokens.size(); ++i) entries.push_back(table->id(tokens[i]));
  return MatrixSR(std::move(table), dim, std::move(entries));
}

MatrixSR load_matrix_file(const std::string& path, TablePtr table) {
  return parse_matrix(read_text_file(path), std::move(table));
}

// ---------------------------------------------------------------------------

std::optional<GeneralizedPermutation> is_generalized_permutation(const MatrixSR& a) {
  const auto& t = a.table();
  if (!t.zero() || !t.one()) throw Error("generalized permutations need a semiring with 0 and 1");
  const std::size_t n = a.dim();
  GeneralizedPermutation p;
  p.perm.resize(n);
  p.units.resize(n);
  std::vector<bool> column_used(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<std::size_t> col;
    for (std::size_t j = 0; j < n; ++j) {
      if (a.at(i, j) == *t.zero()) continue;
      if (col) return std::nullopt;
      col = j;
    }
    if (!col || column_used[*col]) return std::nullopt;
    if (!multiplicative_inverse(t, a.at(i, *col))) return std::nullopt;
    column_used[*col] = true;
    p.perm[i] = *col;
    p.units[i] = a.at(i, *col);
  }
  return p;
}

namespace {

void validate_gp(const GeneralizedPermutation& p, const SemiringTable& t) {
  const std::size_t n = p.dim();
  if (n == 0 || p.units.size() != n) throw Error("malformed generalized permutation");
  std::vector<bool> seen(n, false);
  for (auto c : p.perm) {
    if (c >= n || seen[c]) throw Error("generalized permutation: perm is not a bijection");
    seen[c] = true;
  }
  for (auto u : p.units) {
    if (!multiplicative_inverse(t, u)) throw Error("generalized permutation: unit has no inverse");
  }
}

}  // namespace

MatrixSR to_matrix(const GeneralizedPermutation& p, TablePtr table) {
  validate_gp(p, *table);
  MatrixSR m = MatrixSR::zeros(table, p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) m.set(i, p.perm[i], p.units[i]);
  return m;
}

GeneralizedPermutation gp_inverse(const GeneralizedPermutation& p, const SemiringTable& table) {
  validate_gp(p, table);
  GeneralizedPermutation inv;
  inv.perm.resize(p.dim());
  inv.units.resize(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) {
    inv.perm[p.perm[i]] = i;
    inv.units[p.perm[i]] = *multiplicative_inverse(table, p.units[i]);
  }
  return inv;
}

MatrixSR conjugate(const MatrixSR& a, const GeneralizedPermutation& p) {
  if (p.dim() != a.dim()) throw Error("conjugation: dimension mismatch");
  MatrixSR pm = to_matrix(p, a.table_ptr());
  MatrixSR pinv = to_matrix(gp_inverse(p, a.table()), a.table_ptr());
  return mat_mul(mat_mul(pm, a), pinv);
}

std::optional<MatrixSR> invertibility_oracle(const MatrixSR& a, std::uint64_t budget) {
  const auto& t = a.table();
  if (auto gp = is_generalized_permutation(a)) {
    return to_matrix(gp_inverse(*gp, t), a.table_ptr());
  }

  const std::size_t n = a.dim(), cells = n * n, q = t.size();
  std::uint64_t candidates = 1;
  for (std::size_t i = 0; i < cells; ++i) {
    if (candidates > budget / q) {
      throw BudgetExceeded("inverse search over " + std::to_string(q) + "^" + std::to_string(cells) +
                           " candidates exceeds budget " + std::to_string(budget));
    }
    candidates *= q;
  }

  const MatrixSR id = MatrixSR::identity(a.table_ptr(), n);
  std::vector<ElementId> x(cells, 0);
  std::vector<ElementId> prod(cells);
  auto product_is_identity = [&](const ElementId* l, const ElementId* r) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        ElementId s = t.mul_unchecked(l[i * n], r[j]);
        for (std::size_t k = 1; k < n; ++k) {
          s = t.add_unchecked(s, t.mul_unchecked(l[i * n + k], r[k * n + j]));
        }
        if (s != id.at(i, j)) return false;
      }
    }
    return true;
  };

  const ElementId* ap = a.entries().data();
  for (std::uint64_t c = 0; c < candidates; ++c) {
    if (product_is_identity(ap, x.data()) && product_is_identity(x.data(), ap)) {
      return MatrixSR(a.table_ptr(), n, x);
    }
    for (std::size_t i = 0; i < cells; ++i) {
      if (++x[i] < q) break;
      x[i] = 0;
    }
  }
  return std::nullopt;
}

}  // namespace semikex
