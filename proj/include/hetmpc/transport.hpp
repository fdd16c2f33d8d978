#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "hetmpc/wire.hpp"

namespace hetmpc {

// Blocking, ordered, reliable frame pipe to the peer.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const Frame& frame) = 0;
  // Blocks until the next frame arrives. Throws ConnectionError once closed.
  virtual Frame receive() = 0;
  virtual void close() = 0;
};

// Unbounded single-producer/single-consumer queue. close() wakes waiters.
template <typename T>
class BlockingQueue {
 public:
  void push(T item) {
    {
      std::lock_guard lock(mu_);
      if (closed_) return;
      items_.push_back(std::move(item));
    }
    cv_.notify_one();
  }

  // Returns false once the queue is closed and drained.
  bool pop(T& out) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) return false;
    out = std::move(items_.front());
    items_.pop_front();
    return true;
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<T> items_;
  bool closed_ = false;
};

// In-memory duplex link for loopback runs. Frames pass through their wire
// encoding so loopback and TCP carry identical bytes.
class LoopbackLink {
 public:
  LoopbackLink();
  ~LoopbackLink();
  // Endpoint for party 0 or 1; the link must outlive both endpoints.
  Transport& endpoint(unsigned party);
  void close();

 private:
  class Endpoint;
  BlockingQueue<std::vector<std::uint8_t>> queues_[2];
  std::unique_ptr<Endpoint> ends_[2];
};

// One TCP connection. Party 1 listens, party 0 connects.
class TcpTransport final : public Transport {
 public:
  static std::unique_ptr<TcpTransport> listen(std::uint16_t port, double timeout_s = 30.0);
  static std::unique_ptr<TcpTransport> connect(const std::string& host, std::uint16_t port,
                                               double timeout_s = 30.0);
  ~TcpTransport() override;

  void send(const Frame& frame) override;
  Frame receive() override;
  void close() override;

 private:
  explicit TcpTransport(int fd) : fd_(fd) {}
  int fd_;
};

// Records the exact bytes of every frame sent through the wrapped transport.
class RecordingTransport final : public Transport {
 public:
  explicit RecordingTransport(Transport& inner) : inner_(inner) {}

  void send(const Frame& frame) override;
  Frame receive() override { return inner_.receive(); }
  void close() override { inner_.close(); }

  const std::vector<std::uint8_t>& transcript() const { return transcript_; }
  std::size_t frames_sent() const { return frames_; }
  std::size_t frames_sent(MsgType type) const { return per_type_[static_cast<int>(type)]; }
  std::size_t payload_bytes_sent() const { return payload_bytes_; }

 private:
  Transport& inner_;
  std::vector<std::uint8_t> transcript_;
  std::size_t frames_ = 0;
  std::size_t payload_bytes_ = 0;
  std::size_t per_type_[8] = {};
};

// "host:port" -> pair; throws UsageError.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text);

}  // namespace hetmpc
