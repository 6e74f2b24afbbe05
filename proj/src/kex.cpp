#include "semikex/kex.hpp"

#include <algorithm>

#include "semikex/error.hpp"

namespace semikex {

namespace {
constexpr std::uint8_t kKeyMagic[4] = {'S', 'K', 'X', 'K'};
constexpr std::uint8_t kKeyVersion = 0x01;
}  // namespace

KeyPair keygen(const PublicParams& params, Rng& rng) {
  if (params.n() == 0) throw Error("degenerate params: n = 0");
  PrivateKey priv{circ_random(params.n(), params.entry_bound, rng)};
  PublicKeyMsg pub = public_key(params, priv);
  return {std::move(priv), std::move(pub)};
}

PublicKeyMsg public_key(const PublicParams& params, const PrivateKey& priv) {
  return PublicKeyMsg{circ_act(priv.circ, params.v)};
}

SharedSecret derive_shared(const PrivateKey& priv, const PublicKeyMsg& peer) {
  CommutingVector vec = circ_act(priv.circ, peer.vec);
  Digest fp = key_fingerprint(vec);
  return {std::move(vec), fp};
}

Bytes canonical_encode(const CommutingVector& vec) {
  Bytes out;
  out.reserve(2 + vec.size() * (2 + vec.dim() * vec.dim()));
  put_u16(out, static_cast<std::uint16_t>(vec.size()));
  for (const auto& m : vec.mats()) encode_matrix(out, m);
  return out;
}

CommutingVector canonical_decode(std::span<const std::uint8_t> data, TablePtr table) {
  ByteReader in(data);
  const std::size_t n = in.u16();
  if (n == 0) throw ParseError("matrix vector of length 0");
  std::vector<MatrixSR> mats;
  mats.reserve(n);
  for (std::size_t i = 0; i < n; ++i) mats.push_back(decode_matrix(in, table));
  if (!in.empty()) throw ParseError("trailing bytes after matrix vector");
  try {
    return CommutingVector::unchecked(std::move(mats));
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

Digest key_fingerprint(const CommutingVector& vec) { return sha256(canonical_encode(vec)); }

void check_public_key_shape(const PublicParams& params, const PublicKeyMsg& pk) {
  if (pk.vec.size() != params.n()) {
    throw Error("public key has " + std::to_string(pk.vec.size()) + " matrices, expected " +
                std::to_string(params.n()));
  }
  if (pk.vec.dim() != params.dim()) throw Error("public key matrix dimension mismatch");
  if (!(pk.vec.table_ptr() == params.table || *pk.vec.table_ptr() == *params.table)) {
    throw Error("public key semiring mismatch");
  }
}

Bytes encode_private_key(const PrivateKey& k) {
  Bytes out;
  put_bytes(out, kKeyMagic);
  put_u8(out, kKeyVersion);
  encode_circulant(out, k.circ);
  return out;
}

PrivateKey decode_private_key(std::span<const std::uint8_t> data) {
  ByteReader in(data);
  auto magic = in.take(4);
  if (!std::equal(magic.begin(), magic.end(), kKeyMagic)) throw ParseError("not a private key file (bad magic)");
  if (auto ver = in.u8(); ver != kKeyVersion) {
    throw ParseError("unsupported private key version " + std::to_string(ver));
  }
  CirculantNat c = decode_circulant(in);
  if (!in.empty()) throw ParseError("private key file has trailing bytes");
  if (c.is_zero()) throw ParseError("private key is all zero");
  return PrivateKey{std::move(c)};
}

}  // namespace semikex
