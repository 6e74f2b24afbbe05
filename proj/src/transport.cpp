#include "semikex/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

namespace semikex {

namespace {

struct Channel {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::uint8_t> buf;
  bool closed = false;
};

class LoopbackEnd : public ByteStream {
 public:
  LoopbackEnd(std::shared_ptr<Channel> in, std::shared_ptr<Channel> out)
      : in_(std::move(in)), out_(std::move(out)) {}
  ~LoopbackEnd() override { close(); }

  void write_all(std::span<const std::uint8_t> data) override {
    std::lock_guard lock(out_->mu);
    if (out_->closed) throw ConnectionClosed("write on closed stream");
    out_->buf.insert(out_->buf.end(), data.begin(), data.end());
    out_->cv.notify_all();
  }

  void read_exact(std::span<std::uint8_t> out, std::chrono::milliseconds timeout) override {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    std::unique_lock lock(in_->mu);
    std::size_t got = 0;
    while (got < out.size()) {
      if (!in_->cv.wait_until(lock, deadline, [&] { return !in_->buf.empty() || in_->closed; })) {
        throw TimeoutError("read timed out");
      }
      if (in_->buf.empty()) throw ConnectionClosed("peer closed the stream");
      while (got < out.size() && !in_->buf.empty()) {
        out[got++] = in_->buf.front();
        in_->buf.pop_front();
      }
    }
  }

  void close() override {
    std::lock_guard lock(out_->mu);
    out_->closed = true;
    out_->cv.notify_all();
  }

 private:
  std::shared_ptr<Channel> in_, out_;
};

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

}  // namespace

std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_loopback_pair() {
  auto ab = std::make_shared<Channel>(), ba = std::make_shared<Channel>();
  return {std::make_unique<LoopbackEnd>(ba, ab), std::make_unique<LoopbackEnd>(ab, ba)};
}

TcpStream::~TcpStream() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpStream::write_all(std::span<const std::uint8_t> data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    ssize_t k = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (k < 0) {
      if (errno == EINTR) continue;
      if (errno == EPIPE || errno == ECONNRESET) throw ConnectionClosed("peer closed the connection");
      throw Error(errno_text("send"));
    }
    sent += static_cast<std::size_t>(k);
  }
}

void TcpStream::read_exact(std::span<std::uint8_t> out, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::size_t got = 0;
  while (got < out.size()) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw TimeoutError("read timed out");
    pollfd p{fd_, POLLIN, 0};
    int r = ::poll(&p, 1, static_cast<int>(left.count()));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw Error(errno_text("poll"));
    }
    if (r == 0) throw TimeoutError("read timed out");
    ssize_t k = ::recv(fd_, out.data() + got, out.size() - got, 0);
    if (k < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      if (errno == ECONNRESET) throw ConnectionClosed("peer reset the connection");
      throw Error(errno_text("recv"));
    }
    if (k == 0) throw ConnectionClosed("peer closed the connection");
    got += static_cast<std::size_t>(k);
  }
}

void TcpStream::close() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
}

namespace {

addrinfo* resolve(const std::string& host, std::uint16_t port, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
  if (rc != 0) throw Error("cannot resolve '" + host + "': " + ::gai_strerror(rc));
  return res;
}

}  // namespace

std::unique_ptr<TcpStream> tcp_connect(const std::string& host, std::uint16_t port,
                                       std::chrono::milliseconds timeout) {
  addrinfo* res = resolve(host, port, false);
  std::string last = "no addresses";
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    timeval tv{static_cast<time_t>(timeout.count() / 1000), static_cast<suseconds_t>(timeout.count() % 1000 * 1000)};
    ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      ::freeaddrinfo(res);
      return std::make_unique<TcpStream>(fd);
    }
    last = errno_text("connect");
    ::close(fd);
  }
  ::freeaddrinfo(res);
  throw Error("cannot connect to " + host + ":" + std::to_string(port) + ": " + last);
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) : fd_(-1), port_(0) {
  addrinfo* res = resolve(host, port, true);
  std::string last = "no addresses";
  for (addrinfo* ai = res; ai && fd_ < 0; ai = ai->ai_next) {
    int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 16) == 0) {
      fd_ = fd;
    } else {
      last = errno_text("bind/listen");
      ::close(fd);
    }
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) throw Error("cannot listen on " + host + ":" + std::to_string(port) + ": " + last);

  sockaddr_storage addr{};
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  if (addr.ss_family == AF_INET) {
    port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  } else {
    port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
  }
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpStream> TcpListener::accept() {
  while (true) {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return std::make_unique<TcpStream>(fd);
    }
    if (errno != EINTR) throw Error(errno_text("accept"));
  }
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& s, const std::string& default_host) {
  std::string host = default_host, port = s;
  if (auto colon = s.rfind(':'); colon != std::string::npos) {
    host = colon ? s.substr(0, colon) : default_host;
    port = s.substr(colon + 1);
  }
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  char* end = nullptr;
  unsigned long p = std::strtoul(port.c_str(), &end, 10);
  if (port.empty() || *end != '\0' || p > 65535) throw Error("bad endpoint '" + s + "'");
  return {host, static_cast<std::uint16_t>(p)};
}

}  // namespace semikex
