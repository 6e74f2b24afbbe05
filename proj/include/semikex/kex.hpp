#pragma once

#include <cstdint>
#include <span>

#include "semikex/bytes.hpp"
#include "semikex/circulant.hpp"
#include "semikex/paramgen.hpp"
#include "semikex/rng.hpp"

namespace semikex {

struct PrivateKey {
  CirculantNat circ;
};

struct PublicKeyMsg {
  CommutingVector vec;
};

struct SharedSecret {
  CommutingVector vec;
  Digest fingerprint;
};

struct KeyPair {
  PrivateKey priv;
  PublicKeyMsg pub;
};

// private = circ_random(n, entry_bound); public = private acting on v.
KeyPair keygen(const PublicParams& params, Rng& rng);
PublicKeyMsg public_key(const PublicParams& params, const PrivateKey& priv);

SharedSecret derive_shared(const PrivateKey& priv, const PublicKeyMsg& peer);

// n (u16 BE) then each matrix in canonical encoding.
Bytes canonical_encode(const CommutingVector& vec);
// Inverse of canonical_encode. The decoded matrices are shape-checked only;
// commutation of a peer's vector is not assumed.
CommutingVector canonical_decode(std::span<const std::uint8_t> data, TablePtr table);

Digest key_fingerprint(const CommutingVector& vec);

// Checks that a peer's public key has the session's n, dim and table.
void check_public_key_shape(const PublicParams& params, const PublicKeyMsg& pk);

// "SKXK" 0x01 | n u16 | n x u64 entries. The file holds secret material;
// callers should create it with owner-only permissions.
Bytes encode_private_key(const PrivateKey& k);
PrivateKey decode_private_key(std::span<const std::uint8_t> data);

}  // namespace semikex
