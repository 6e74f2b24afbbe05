#include "semikex/netkex.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <thread>

namespace semikex {

std::string frame_type_name(FrameType t) {
  switch (t) {
    case FrameType::Hello: return "HELLO";
    case FrameType::Params: return "PARAMS";
    case FrameType::ParamsAck: return "PARAMS_ACK";
    case FrameType::PubKey: return "PUBKEY";
    case FrameType::Confirm: return "CONFIRM";
    case FrameType::Error: return "ERROR";
  }
  return "UNKNOWN";
}

bool is_known_frame_type(std::uint8_t code) {
  return (code >= 0x01 && code <= 0x05) || code == 0x7F;
}

namespace {

std::string hex_byte(std::uint8_t b) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%02X", b);
  return buf;
}

}  // namespace

Bytes encode_frame(const Frame& f) {
  if (f.payload.size() >= 0xFFFFFFFFull) throw Error("frame payload too large");
  Bytes out;
  out.reserve(5 + f.payload.size());
  put_u32(out, static_cast<std::uint32_t>(f.payload.size() + 1));
  put_u8(out, static_cast<std::uint8_t>(f.type));
  put_bytes(out, f.payload);
  return out;
}

Frame decode_frame(ByteReader& in, std::uint32_t max_len) {
  if (in.remaining() < 5) throw FrameError("truncated frame");
  const std::uint32_t len = in.u32();
  if (len == 0) throw FrameError("frame length 0 has no type byte");
  if (len > max_len) {
    throw FrameError("frame length " + std::to_string(len) + " exceeds maximum " + std::to_string(max_len));
  }
  if (in.remaining() < len) throw FrameError("truncated frame");
  const std::uint8_t type = in.u8();
  if (!is_known_frame_type(type)) throw FrameError("unknown frame type " + hex_byte(type));
  auto body = in.take(len - 1);
  return Frame{static_cast<FrameType>(type), Bytes(body.begin(), body.end())};
}

void write_frame(ByteStream& s, const Frame& f) { s.write_all(encode_frame(f)); }

Frame read_frame(ByteStream& s, std::chrono::milliseconds timeout, std::uint32_t max_len) {
  std::uint8_t header[5];
  s.read_exact(header, timeout);
  const std::uint32_t len = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                            (std::uint32_t{header[2]} << 8) | header[3];
  if (len == 0) throw FrameError("frame length 0 has no type byte");
  if (len > max_len) {
    throw FrameError("frame length " + std::to_string(len) + " exceeds maximum " + std::to_string(max_len));
  }
  if (!is_known_frame_type(header[4])) throw FrameError("unknown frame type " + hex_byte(header[4]));
  Frame f{static_cast<FrameType>(header[4]), Bytes(len - 1)};
  if (!f.payload.empty()) s.read_exact(f.payload, timeout);
  return f;
}

namespace {

struct Abort {
  std::string reason;
};

class Session {
 public:
  Session(ByteStream& s, const SessionOptions& opt) : s_(s), opt_(opt) {}

  SessionTranscript& transcript() { return t_; }

  void send(FrameType type, Bytes payload) {
    Frame f{type, std::move(payload)};
    write_frame(s_, f);
    t_.frames.push_back({Direction::Sent, std::move(f)});
  }

  Frame recv() {
    Frame f = read_frame(s_, opt_.timeout, opt_.max_frame);
    t_.frames.push_back({Direction::Received, f});
    if (f.type == FrameType::Error) {
      throw Abort{"peer error: " + std::string(f.payload.begin(), f.payload.end())};
    }
    return f;
  }

  Frame expect(FrameType type) {
    Frame f = recv();
    if (f.type != type) {
      fail_with_error("unexpected " + frame_type_name(f.type) + " frame, expected " + frame_type_name(type));
    }
    return f;
  }

  // Tells the peer why, then aborts.
  [[noreturn]] void fail_with_error(const std::string& reason) {
    try {
      send(FrameType::Error, Bytes(reason.begin(), reason.end()));
    } catch (const Error&) {
    }
    throw Abort{reason};
  }

  template <class Body>
  SessionTranscript run(Body&& body) {
    try {
      body(*this);
    } catch (const Abort& a) {
      t_.failure = a.reason;
    } catch (const TimeoutError&) {
      t_.failure = "timeout";
    } catch (const ConnectionClosed& e) {
      t_.failure = std::string("connection closed: ") + e.what();
    } catch (const FrameError& e) {
      t_.failure = std::string("malformed frame: ") + e.what();
    } catch (const Error& e) {
      t_.failure = e.what();
    }
    if (!t_.failure.empty()) t_.state = SessionState::Failed;
    return std::move(t_);
  }

 private:
  ByteStream& s_;
  SessionOptions opt_;
  SessionTranscript t_;
};

Bytes hello_payload(const Digest& hash) {
  Bytes p;
  put_u8(p, kProtocolVersion);
  put_bytes(p, hash);
  return p;
}

Digest digest_of(std::span<const std::uint8_t> bytes) {
  Digest d;
  std::copy(bytes.begin(), bytes.end(), d.begin());
  return d;
}

// Checks a HELLO payload; returns the carried params hash.
Digest check_hello(Session& s, const Frame& f) {
  if (f.payload.empty()) s.fail_with_error("malformed HELLO");
  if (f.payload[0] != kProtocolVersion) {
    s.fail_with_error("version mismatch: peer " + hex_byte(f.payload[0]) + ", local " + hex_byte(kProtocolVersion));
  }
  if (f.payload.size() != 33) s.fail_with_error("malformed HELLO");
  return digest_of(std::span(f.payload).subspan(1));
}

PublicKeyMsg read_pubkey(Session& s, const PublicParams& params) {
  Frame f = s.expect(FrameType::PubKey);
  try {
    PublicKeyMsg pk{canonical_decode(f.payload, params.table)};
    check_public_key_shape(params, pk);
    return pk;
  } catch (const Error& e) {
    s.fail_with_error(std::string("bad PUBKEY: ") + e.what());
  }
}

// Exchanges CONFIRM frames; `first` sends before reading.
void confirm(Session& s, const SharedSecret& secret, bool first) {
  const Bytes mine(secret.fingerprint.begin(), secret.fingerprint.end());
  if (first) s.send(FrameType::Confirm, mine);
  Frame peer = s.expect(FrameType::Confirm);
  if (!first) s.send(FrameType::Confirm, mine);
  auto& t = s.transcript();
  t.local_secret = secret;
  if (peer.payload != mine) throw Abort{"confirm-mismatch"};
  t.fingerprint = secret.fingerprint;
  t.state = SessionState::Completed;
}

}  // namespace

SessionTranscript run_initiator(ByteStream& stream, const PublicParams& params, Rng& rng,
                                const SessionOptions& opt) {
  Session session(stream, opt);
  return session.run([&](Session& s) {
    const KeyPair kp = keygen(params, rng);
    const Bytes file = encode_params(params);
    const Digest hash = sha256(file);
    s.transcript().params_hash = hash;

    s.send(FrameType::Hello, hello_payload(hash));
    Frame reply = s.recv();
    if (reply.type == FrameType::Hello) {
      if (check_hello(s, reply) != hash) s.fail_with_error("params hash mismatch");
    } else if (reply.type == FrameType::Params && reply.payload.empty()) {
      s.send(FrameType::Params, file);
      Frame ack = s.expect(FrameType::ParamsAck);
      if (ack.payload.size() != hash.size() || digest_of(ack.payload) != hash) {
        s.fail_with_error("params hash mismatch");
      }
    } else {
      s.fail_with_error("unexpected " + frame_type_name(reply.type) + " frame after HELLO");
    }

    s.send(FrameType::PubKey, canonical_encode(kp.pub.vec));
    const PublicKeyMsg peer = read_pubkey(s, params);
    confirm(s, derive_shared(kp.priv, peer), true);
  });
}

SessionTranscript run_responder(ByteStream& stream, const ResponderContext& ctx, Rng& rng,
                                const SessionOptions& opt) {
  Session session(stream, opt);
  return session.run([&](Session& s) {
    const Digest hash = check_hello(s, s.expect(FrameType::Hello));
    s.transcript().params_hash = hash;

    std::optional<PublicParams> params;
    if (auto it = ctx.known.find(hash); it != ctx.known.end()) {
      params = it->second;
      s.send(FrameType::Hello, hello_payload(hash));
    } else {
      s.send(FrameType::Params, {});
      Frame f = s.expect(FrameType::Params);
      if (sha256(f.payload) != hash) s.fail_with_error("params hash mismatch");
      try {
        params = decode_params(f.payload, ctx.registry);
      } catch (const Error& e) {
        s.fail_with_error(std::string("bad PARAMS: ") + e.what());
      }
      s.send(FrameType::ParamsAck, Bytes(hash.begin(), hash.end()));
    }

    const KeyPair kp = keygen(*params, rng);
    const PublicKeyMsg peer = read_pubkey(s, *params);
    s.send(FrameType::PubKey, canonical_encode(kp.pub.vec));
    confirm(s, derive_shared(kp.priv, peer), false);
  });
}

void relay_frames(ByteStream& from, ByteStream& to, const FrameFilter& filter, const SessionOptions& opt) {
  try {
    while (true) write_frame(to, filter(read_frame(from, opt.timeout, opt.max_frame)));
  } catch (const Error&) {
  }
  to.close();
}

void serve(TcpListener& listener, const ResponderContext& ctx, std::uint64_t seed, std::uint64_t sessions,
           const std::function<void(std::uint64_t, const SessionTranscript&)>& report,
           const SessionOptions& opt) {
  std::mutex report_mu;
  std::vector<std::thread> workers;
  for (std::uint64_t k = 0; sessions == 0 || k < sessions; ++k) {
    std::shared_ptr<TcpStream> conn = listener.accept();
    workers.emplace_back([&, conn, k] {
      Rng rng(seed + k);
      SessionTranscript t = run_responder(*conn, ctx, rng, opt);
      conn->close();
      std::lock_guard lock(report_mu);
      report(k, t);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace semikex
