#include "hetmpc/transport.hpp"

#include <fmt/format.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "hetmpc/errors.hpp"

namespace hetmpc {

class LoopbackLink::Endpoint final : public Transport {
 public:
  Endpoint(LoopbackLink& link, unsigned party) : link_(link), party_(party) {}

  void send(const Frame& frame) override { link_.queues_[1 - party_].push(encode_frame(frame)); }

  Frame receive() override {
    std::vector<std::uint8_t> bytes;
    if (!link_.queues_[party_].pop(bytes)) {
      throw ConnectionError(fmt::format("loopback link closed (party {})", party_));
    }
    return decode_frame(bytes);
  }

  void close() override { link_.close(); }

 private:
  LoopbackLink& link_;
  unsigned party_;
};

LoopbackLink::LoopbackLink() {
  ends_[0] = std::make_unique<Endpoint>(*this, 0);
  ends_[1] = std::make_unique<Endpoint>(*this, 1);
}

LoopbackLink::~LoopbackLink() = default;

Transport& LoopbackLink::endpoint(unsigned party) { return *ends_[party == 0 ? 0 : 1]; }

void LoopbackLink::close() {
  queues_[0].close();
  queues_[1].close();
}

void RecordingTransport::send(const Frame& frame) {
  append_frame(frame, transcript_);
  ++frames_;
  ++per_type_[static_cast<int>(frame.type) & 7];
  payload_bytes_ += frame.payload.size();
  inner_.send(frame);
}

namespace {

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

void write_all(int fd, const std::uint8_t* p, std::size_t n) {
  while (n > 0) {
    const ssize_t k = ::send(fd, p, n, MSG_NOSIGNAL);
    if (k < 0) {
      if (errno == EINTR) continue;
      throw ConnectionError(fmt::format("send failed: {}", std::strerror(errno)));
    }
    p += k;
    n -= static_cast<std::size_t>(k);
  }
}

void read_all(int fd, std::uint8_t* p, std::size_t n) {
  while (n > 0) {
    const ssize_t k = ::recv(fd, p, n, 0);
    if (k == 0) throw ConnectionError("peer closed the connection");
    if (k < 0) {
      if (errno == EINTR) continue;
      throw ConnectionError(fmt::format("recv failed: {}", std::strerror(errno)));
    }
    p += k;
    n -= static_cast<std::size_t>(k);
  }
}

}  // namespace

std::unique_ptr<TcpTransport> TcpTransport::listen(std::uint16_t port, double timeout_s) {
  const int server = ::socket(AF_INET, SOCK_STREAM, 0);
  if (server < 0) throw ConnectionError(fmt::format("socket: {}", std::strerror(errno)));
  int one = 1;
  ::setsockopt(server, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(port);
  if (::bind(server, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(server, 1) != 0) {
    const std::string why = std::strerror(errno);
    ::close(server);
    throw ConnectionError(fmt::format("cannot listen on port {}: {}", port, why));
  }
  pollfd pfd{server, POLLIN, 0};
  const int ready = ::poll(&pfd, 1, static_cast<int>(timeout_s * 1000));
  if (ready <= 0) {
    ::close(server);
    throw ConnectionError(fmt::format("no peer connected to port {} within {}s", port, timeout_s));
  }
  const int fd = ::accept(server, nullptr, nullptr);
  ::close(server);
  if (fd < 0) throw ConnectionError(fmt::format("accept: {}", std::strerror(errno)));
  set_nodelay(fd);
  return std::unique_ptr<TcpTransport>(new TcpTransport(fd));
}

std::unique_ptr<TcpTransport> TcpTransport::connect(const std::string& host, std::uint16_t port,
                                                    double timeout_s) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    throw ConnectionError(fmt::format("cannot resolve '{}': {}", host, ::gai_strerror(rc)));
  }
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  std::string last_error = "timed out";
  // The listener may not be up yet; keep retrying until the deadline.
  while (std::chrono::steady_clock::now() < deadline) {
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
        ::freeaddrinfo(res);
        set_nodelay(fd);
        return std::unique_ptr<TcpTransport>(new TcpTransport(fd));
      }
      last_error = std::strerror(errno);
      ::close(fd);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  ::freeaddrinfo(res);
  throw ConnectionError(fmt::format("cannot connect to {}:{}: {}", host, port, last_error));
}

TcpTransport::~TcpTransport() { close(); }

void TcpTransport::send(const Frame& frame) {
  if (fd_ < 0) throw ConnectionError("transport closed");
  const std::vector<std::uint8_t> bytes = encode_frame(frame);
  write_all(fd_, bytes.data(), bytes.size());
}

Frame TcpTransport::receive() {
  if (fd_ < 0) throw ConnectionError("transport closed");
  std::array<std::uint8_t, kFrameHeaderBytes> header{};
  read_all(fd_, header.data(), header.size());
  const FrameHeader h = decode_frame_header(header);
  Frame f{h.type, h.layer_id, std::vector<std::uint8_t>(h.length)};
  read_all(fd_, f.payload.data(), f.payload.size());
  return f;
}

void TcpTransport::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw UsageError(fmt::format("--connect expects HOST:PORT, got '{}'", text));
  }
  unsigned long port = 0;
  try {
    std::size_t used = 0;
    port = std::stoul(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError(fmt::format("--connect port in '{}' is not a number", text));
  }
  if (port == 0 || port > 65535) throw UsageError(fmt::format("--connect port {} out of range", port));
  return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

}  // namespace hetmpc
