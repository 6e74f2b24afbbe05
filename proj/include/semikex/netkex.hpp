#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semikex/bytes.hpp"
#include "semikex/kex.hpp"
#include "semikex/paramgen.hpp"
#include "semikex/transport.hpp"

namespace semikex {

enum class FrameType : std::uint8_t {
  Hello = 0x01,
  Params = 0x02,
  ParamsAck = 0x03,
  PubKey = 0x04,
  Confirm = 0x05,
  Error = 0x7F,
};

std::string frame_type_name(FrameType t);
bool is_known_frame_type(std::uint8_t code);

struct Frame {
  FrameType type;
  Bytes payload;

  bool operator==(const Frame&) const = default;
};

inline constexpr std::uint32_t kDefaultMaxFrame = 16u << 20;
inline constexpr std::uint8_t kProtocolVersion = 0x01;
inline constexpr std::chrono::milliseconds kDefaultFrameTimeout{30'000};

class FrameError : public ParseError {
 public:
  using ParseError::ParseError;
};

// length (u32 BE, counts type + payload) | type | payload
Bytes encode_frame(const Frame& f);
// Consumes exactly one frame from `in`; bytes after it stay unread.
Frame decode_frame(ByteReader& in, std::uint32_t max_len = kDefaultMaxFrame);

void write_frame(ByteStream& s, const Frame& f);
Frame read_frame(ByteStream& s, std::chrono::milliseconds timeout, std::uint32_t max_len = kDefaultMaxFrame);

enum class Direction { Sent, Received };

struct TranscriptEntry {
  Direction dir;
  Frame frame;
};

enum class SessionState { Completed, Failed };

struct SessionTranscript {
  std::vector<TranscriptEntry> frames;
  SessionState state = SessionState::Failed;
  std::string failure;                    // "confirm-mismatch", "timeout", ...
  std::optional<Digest> fingerprint;      // set when completed
  std::optional<Digest> params_hash;
  // Locally derived secret; kept in memory only, never serialized.
  std::optional<SharedSecret> local_secret;

  bool completed() const { return state == SessionState::Completed; }
};

struct SessionOptions {
  std::chrono::milliseconds timeout = kDefaultFrameTimeout;
  std::uint32_t max_frame = kDefaultMaxFrame;
};

/// Both roles draw their private key with keygen(params, rng) before any
/// other use of rng.
SessionTranscript run_initiator(ByteStream& s, const PublicParams& params, Rng& rng,
                                const SessionOptions& opt = {});

struct ResponderContext {
  // Parameter sets the responder already holds, keyed by params hash.
  std::map<Digest, PublicParams> known;
  TableRegistry registry;
};

SessionTranscript run_responder(ByteStream& s, const ResponderContext& ctx, Rng& rng,
                                const SessionOptions& opt = {});

// Copies frames from `from` to `to`, passing each through `filter`, until
// `from` closes; then closes `to`.
using FrameFilter = std::function<Frame(Frame)>;
void relay_frames(ByteStream& from, ByteStream& to, const FrameFilter& filter,
                  const SessionOptions& opt = {});

/// Accepts connections and runs one responder per connection on its own
/// thread; session k uses Rng(seed + k). Stops after `sessions` connections
/// (0 = forever). `report` is called from a single thread at a time.
void serve(TcpListener& listener, const ResponderContext& ctx, std::uint64_t seed, std::uint64_t sessions,
           const std::function<void(std::uint64_t, const SessionTranscript&)>& report,
           const SessionOptions& opt = {});

}  // namespace semikex
