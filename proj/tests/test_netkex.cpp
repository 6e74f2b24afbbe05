#include <doctest.h>

#include <algorithm>
#include <thread>

#include "oracles.hpp"
#include "semikex/kex.hpp"
#include "semikex/netkex.hpp"
#include "semikex/transport.hpp"

using namespace semikex;
using namespace std::chrono_literals;

namespace {

PublicParams small_params(std::uint64_t seed, std::size_t n = 3, std::size_t total = 6) {
  ParamsConfig cfg;
  cfg.total = total;
  cfg.n = n;
  cfg.entry_bound = 1000;
  cfg.seed = seed;
  return generate_params(cfg).params;
}

ResponderContext knowing(const PublicParams& p) {
  ResponderContext ctx;
  ctx.known.emplace(params_hash(p), p);
  return ctx;
}

struct Pair {
  SessionTranscript init, resp;
};

Pair run_loopback(const PublicParams& p, const ResponderContext& ctx, std::uint64_t si, std::uint64_t sr) {
  auto [a, b] = make_loopback_pair();
  Pair out;
  std::thread responder([&, &b = b] {
    Rng rng(sr);
    out.resp = run_responder(*b, ctx, rng, {5000ms});
    b->close();
  });
  Rng rng(si);
  out.init = run_initiator(*a, p, rng, {5000ms});
  a->close();
  responder.join();
  return out;
}

std::vector<Frame> sent(const SessionTranscript& t) {
  std::vector<Frame> f;
  for (const auto& e : t.frames) {
    if (e.dir == Direction::Sent) f.push_back(e.frame);
  }
  return f;
}

std::vector<FrameType> types(const std::vector<Frame>& frames) {
  std::vector<FrameType> t;
  for (const auto& f : frames) t.push_back(f.type);
  return t;
}

Bytes private_entries(const PublicParams& p, std::uint64_t seed) {
  Rng rng(seed);
  Bytes enc;
  encode_circulant(enc, keygen(p, rng).priv.circ);
  return Bytes(enc.begin() + 2, enc.end());
}

bool contains(const Bytes& hay, const Bytes& needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

TEST_SUITE("netkex") {

TEST_CASE("frame layout") {
  CHECK(encode_frame({FrameType::Hello, {}}) == Bytes{0, 0, 0, 1, 0x01});
  CHECK(encode_frame({FrameType::PubKey, {0xAA, 0xBB, 0xCC}}) == Bytes{0, 0, 0, 4, 0x04, 0xAA, 0xBB, 0xCC});

  const Bytes two = [] {
    Bytes b = encode_frame({FrameType::Confirm, {1, 2}});
    b.push_back(0x99);
    return b;
  }();
  ByteReader in(two);
  CHECK(decode_frame(in) == Frame{FrameType::Confirm, {1, 2}});
  CHECK(in.remaining() == 1);

  const Bytes truncated{0, 0, 0, 4, 0x04, 0xAA};
  ByteReader tin(truncated);
  CHECK_THROWS_WITH_AS(decode_frame(tin), "truncated frame", FrameError);
  const Bytes unknown{0, 0, 0, 1, 0x42};
  ByteReader uin(unknown);
  CHECK_THROWS_WITH_AS(decode_frame(uin), "unknown frame type 0x42", FrameError);
  const Bytes big{0, 0, 1, 0, 0x02};
  ByteReader bin(big);
  CHECK_THROWS_WITH_AS(decode_frame(bin, 100), "frame length 256 exceeds maximum 100", FrameError);
  const Bytes empty{0, 0, 0, 0};
  ByteReader ein(empty);
  CHECK_THROWS_AS(decode_frame(ein), FrameError);

  Rng rng(1);
  const FrameType all[] = {FrameType::Hello,  FrameType::Params,  FrameType::ParamsAck,
                           FrameType::PubKey, FrameType::Confirm, FrameType::Error};
  for (int trial = 0; trial < 200; ++trial) {
    Frame f{all[rng.uniform(0, 5)], Bytes(rng.uniform(0, 300))};
    for (auto& x : f.payload) x = static_cast<std::uint8_t>(rng.uniform(0, 255));
    const Bytes enc = encode_frame(f);
    ByteReader r(enc);
    CHECK(decode_frame(r) == f);
    CHECK(r.remaining() == 0);
  }
}

TEST_CASE("loopback session with preshared params") {
  const PublicParams p = small_params(1);
  const Pair s = run_loopback(p, knowing(p), 10, 20);
  REQUIRE(s.init.completed());
  REQUIRE(s.resp.completed());
  CHECK(s.init.fingerprint == s.resp.fingerprint);
  CHECK(s.init.local_secret->vec == s.resp.local_secret->vec);
  CHECK(types(sent(s.init)) ==
        std::vector<FrameType>{FrameType::Hello, FrameType::PubKey, FrameType::Confirm});
  CHECK(types(sent(s.resp)) ==
        std::vector<FrameType>{FrameType::Hello, FrameType::PubKey, FrameType::Confirm});
  const Frame hello = sent(s.init)[0];
  CHECK(hello.payload.size() == 33);
  CHECK(hello.payload[0] == kProtocolVersion);
  const Digest h = params_hash(p);
  CHECK(std::equal(h.begin(), h.end(), hello.payload.begin() + 1));

  const Bytes ci = sent(s.init)[2].payload, cr = sent(s.resp)[2].payload;
  CHECK(ci == cr);
  CHECK(ci == Bytes(s.init.fingerprint->begin(), s.init.fingerprint->end()));

  // Shared vector equals the direct three-way computation.
  Rng ri(10), rr(20);
  const KeyPair ki = keygen(p, ri), kr = keygen(p, rr);
  CHECK(s.init.local_secret->vec == circ_act(circ_mul(ki.priv.circ, kr.priv.circ), p.v));
  CHECK(sent(s.init)[1].payload == canonical_encode(ki.pub.vec));
}

TEST_CASE("params transfer path") {
  const PublicParams p = small_params(2);
  const Pair s = run_loopback(p, ResponderContext{}, 11, 21);
  REQUIRE(s.init.completed());
  REQUIRE(s.resp.completed());
  CHECK(s.init.fingerprint == s.resp.fingerprint);
  CHECK(types(sent(s.init)) ==
        std::vector<FrameType>{FrameType::Hello, FrameType::Params, FrameType::PubKey, FrameType::Confirm});
  CHECK(types(sent(s.resp)) == std::vector<FrameType>{FrameType::Params, FrameType::ParamsAck,
                                                      FrameType::PubKey, FrameType::Confirm});
  CHECK(sent(s.init)[1].payload == encode_params(p));
  const Digest h = params_hash(p);
  CHECK(sent(s.resp)[1].payload == Bytes(h.begin(), h.end()));
}

TEST_CASE("version mismatch") {
  const PublicParams p = small_params(3);
  auto [a, b] = make_loopback_pair();
  SessionTranscript resp;
  std::thread t([&, &b = b] {
    Rng rng(1);
    resp = run_responder(*b, knowing(p), rng, {5000ms});
    b->close();
  });
  Bytes payload{0x09};
  const Digest h = params_hash(p);
  payload.insert(payload.end(), h.begin(), h.end());
  write_frame(*a, {FrameType::Hello, payload});
  const Frame reply = read_frame(*a, 5000ms);
  a->close();
  t.join();
  CHECK(reply.type == FrameType::Error);
  CHECK_FALSE(resp.completed());
  CHECK(resp.failure.find("version mismatch") == 0);
}

TEST_CASE("tampered PUBKEY fails confirmation") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PublicParams p = small_params(40 + seed);
    const ResponderContext ctx = knowing(p);
    auto [ia, ma] = make_loopback_pair();
    auto [mb, rb] = make_loopback_pair();
    Rng evil(seed + 99);
    const FrameFilter replace = [&](Frame f) {
      if (f.type != FrameType::PubKey) return f;
      std::vector<MatrixSR> mats;
      for (std::size_t i = 0; i < p.n(); ++i) mats.push_back(oracle::random_matrix(p.table, p.dim(), evil));
      return Frame{FrameType::PubKey, canonical_encode(CommutingVector::unchecked(mats))};
    };
    std::thread fwd([&, &ma = ma, &mb = mb] { relay_frames(*ma, *mb, replace); });
    std::thread back([&, &ma = ma, &mb = mb] { relay_frames(*mb, *ma, [](Frame f) { return f; }); });
    SessionTranscript resp;
    std::thread responder([&, &rb = rb] {
      Rng rng(seed + 7);
      resp = run_responder(*rb, ctx, rng, {5000ms});
      rb->close();
    });
    Rng rng(seed + 3);
    const SessionTranscript init = run_initiator(*ia, p, rng, {5000ms});
    ia->close();
    responder.join();
    fwd.join();
    back.join();
    CHECK_FALSE(init.completed());
    CHECK_FALSE(resp.completed());
    CHECK(init.failure == "confirm-mismatch");
    CHECK(resp.failure == "confirm-mismatch");
  }
}

TEST_CASE("timeout") {
  const PublicParams p = small_params(5);
  auto [a, b] = make_loopback_pair();
  Rng rng(1);
  const SessionTranscript t = run_initiator(*a, p, rng, {50ms});
  CHECK_FALSE(t.completed());
  CHECK(t.failure == "timeout");
}

TEST_CASE("no private key bytes on the wire and deterministic replay") {
  for (std::uint64_t k = 0; k < 10; ++k) {
    const PublicParams p = small_params(60 + k, 4, 8);
    const Pair s = run_loopback(p, ResponderContext{}, 100 + k, 200 + k);
    REQUIRE(s.init.completed());
    Bytes wire;
    for (const auto* t : {&s.init, &s.resp}) {
      for (const auto& e : t->frames) {
        const Bytes enc = encode_frame(e.frame);
        wire.insert(wire.end(), enc.begin(), enc.end());
      }
    }
    CHECK_FALSE(contains(wire, private_entries(p, 100 + k)));
    CHECK_FALSE(contains(wire, private_entries(p, 200 + k)));

    const Pair again = run_loopback(p, ResponderContext{}, 100 + k, 200 + k);
    REQUIRE(again.init.frames.size() == s.init.frames.size());
    for (std::size_t i = 0; i < s.init.frames.size(); ++i) {
      CHECK(again.init.frames[i].frame == s.init.frames[i].frame);
      CHECK(again.init.frames[i].dir == s.init.frames[i].dir);
    }
  }
}

TEST_CASE("many loopback sessions agree") {
  for (std::uint64_t k = 0; k < 100; ++k) {
    Rng pick(k);
    const PublicParams p = small_params(300 + k, pick.uniform(1, 4), pick.uniform(1, 6));
    const Pair s = run_loopback(p, k % 2 ? ResponderContext{} : knowing(p), 1000 + k, 2000 + k);
    REQUIRE(s.init.completed());
    REQUIRE(s.resp.completed());
    CHECK(s.init.local_secret->vec == s.resp.local_secret->vec);
  }
}

TEST_CASE("tcp serve and connect") {
  CHECK(parse_endpoint("127.0.0.1:7001", "0.0.0.0") == std::pair<std::string, std::uint16_t>{"127.0.0.1", 7001});
  CHECK(parse_endpoint(":7002", "0.0.0.0") == std::pair<std::string, std::uint16_t>{"0.0.0.0", 7002});
  CHECK(parse_endpoint("7003", "0.0.0.0") == std::pair<std::string, std::uint16_t>{"0.0.0.0", 7003});
  CHECK_THROWS_AS(parse_endpoint("host:99999", "0.0.0.0"), Error);

  const PublicParams p = small_params(7);
  const ResponderContext ctx = knowing(p);
  TcpListener listener("127.0.0.1", 0);
  REQUIRE(listener.port() != 0);
  std::vector<std::pair<std::uint64_t, SessionTranscript>> reports;
  std::thread server([&] {
    serve(listener, ctx, 500, 3, [&](std::uint64_t k, const SessionTranscript& t) { reports.emplace_back(k, t); },
          {5000ms});
  });
  std::vector<SessionTranscript> clients;
  for (int i = 0; i < 3; ++i) {
    auto conn = tcp_connect("127.0.0.1", listener.port(), 5000ms);
    Rng rng(900 + i);
    clients.push_back(run_initiator(*conn, p, rng, {5000ms}));
    conn->close();
  }
  server.join();
  REQUIRE(reports.size() == 3);
  for (const auto& c : clients) CHECK(c.completed());
  for (const auto& [k, t] : reports) {
    CHECK(t.completed());
    CHECK(t.fingerprint == clients[k].fingerprint);
  }
}

}  // TEST_SUITE
