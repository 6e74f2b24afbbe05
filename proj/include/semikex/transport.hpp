#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>

#include "semikex/error.hpp"

namespace semikex {

class TimeoutError : public Error {
 public:
  using Error::Error;
};

class ConnectionClosed : public Error {
 public:
  using Error::Error;
};

/// Reliable, ordered, bidirectional byte stream.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual void write_all(std::span<const std::uint8_t> data) = 0;
  // Fills `out` completely or throws TimeoutError / ConnectionClosed.
  virtual void read_exact(std::span<std::uint8_t> out, std::chrono::milliseconds timeout) = 0;
  // Half-close: the peer sees end of stream once buffered data is drained.
  virtual void close() = 0;
};

// Two connected in-memory endpoints.
std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_loopback_pair();

class TcpStream : public ByteStream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {}
  ~TcpStream() override;
  TcpStream(const TcpStream&) = delete;
  TcpStream& operator=(const TcpStream&) = delete;

  void write_all(std::span<const std::uint8_t> data) override;
  void read_exact(std::span<std::uint8_t> out, std::chrono::milliseconds timeout) override;
  void close() override;

 private:
  int fd_;
};

std::unique_ptr<TcpStream> tcp_connect(const std::string& host, std::uint16_t port,
                                       std::chrono::milliseconds timeout);

class TcpListener {
 public:
  // port 0 picks an ephemeral port; see port().
  TcpListener(const std::string& host, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  std::unique_ptr<TcpStream> accept();

 private:
  int fd_;
  std::uint16_t port_;
};

// "host:port" with the host part optional (":7000" or "7000" mean any host).
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& s, const std::string& default_host);

}  // namespace semikex
