// Copyright 2026 The VFL Workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vfl/protocol/transport.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>

#include "vfl/common/error.h"

namespace vfl::protocol {
namespace {

constexpr uint32_t kMaxFrameBytes = 1u << 30;

void WriteAll(int fd, const char* data, size_t size) {
  while (size > 0) {
    const ssize_t n = ::send(fd, data, size, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    VFL_ENFORCE(n > 0, ErrorCode::kTransportClosed,
                std::string("send failed: ") + std::strerror(errno));
    data += n;
    size -= static_cast<size_t>(n);
  }
}

void ReadAll(int fd, char* data, size_t size) {
  while (size > 0) {
    const ssize_t n = ::recv(fd, data, size, 0);
    if (n < 0 && errno == EINTR) continue;
    VFL_ENFORCE(n > 0, ErrorCode::kTransportClosed, "connection closed");
    data += n;
    size -= static_cast<size_t>(n);
  }
}

}  // namespace

void LoopbackTransport::Send(Role from, Role to, std::string frame) {
  {
    std::lock_guard lock(mu_);
    VFL_ENFORCE(!closed_, ErrorCode::kTransportClosed, "transport shut down");
    queues_[{from, to}].push_back(std::move(frame));
  }
  cv_.notify_all();
}

std::string LoopbackTransport::Receive(Role at, Role from) {
  std::unique_lock lock(mu_);
  auto& queue = queues_[{from, at}];
  cv_.wait(lock, [&] { return closed_ || !queue.empty(); });
  VFL_ENFORCE(!queue.empty(), ErrorCode::kTransportClosed, "transport shut down");
  std::string frame = std::move(queue.front());
  queue.pop_front();
  return frame;
}

void LoopbackTransport::Shutdown() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

FramedSocket& FramedSocket::operator=(FramedSocket&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

FramedSocket::~FramedSocket() {
  if (fd_ >= 0) ::close(fd_);
}

FramedSocket FramedSocket::Connect(const std::string& host, uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  VFL_ENFORCE(fd >= 0, ErrorCode::kIoError, "socket() failed");
  FramedSocket sock(fd);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  VFL_ENFORCE(::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1,
              ErrorCode::kInvalidArgument, "bad IPv4 address " + host);
  VFL_ENFORCE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0,
              ErrorCode::kTransportClosed,
              std::string("connect failed: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return sock;
}

void FramedSocket::SendFrame(const std::string& payload) {
  VFL_ENFORCE(payload.size() < kMaxFrameBytes, ErrorCode::kInvalidArgument,
              "frame too large");
  const auto len = static_cast<uint32_t>(payload.size());
  const std::array<char, 4> header{static_cast<char>(len >> 24), static_cast<char>(len >> 16),
                                   static_cast<char>(len >> 8), static_cast<char>(len)};
  WriteAll(fd_, header.data(), header.size());
  WriteAll(fd_, payload.data(), payload.size());
}

std::string FramedSocket::ReceiveFrame() {
  std::array<unsigned char, 4> header{};
  ReadAll(fd_, reinterpret_cast<char*>(header.data()), header.size());
  const uint32_t len = (uint32_t{header[0]} << 24) | (uint32_t{header[1]} << 16) |
                       (uint32_t{header[2]} << 8) | uint32_t{header[3]};
  VFL_ENFORCE(len < kMaxFrameBytes, ErrorCode::kParseError, "oversized frame");
  std::string payload(len, '\0');
  ReadAll(fd_, payload.data(), len);
  return payload;
}

void FramedSocket::ShutdownBoth() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

TcpListener::TcpListener(uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  VFL_ENFORCE(fd_ >= 0, ErrorCode::kIoError, "socket() failed");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  VFL_ENFORCE(::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0,
              ErrorCode::kIoError, std::string("bind failed: ") + std::strerror(errno));
  VFL_ENFORCE(::listen(fd_, 8) == 0, ErrorCode::kIoError, "listen failed");
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

FramedSocket TcpListener::Accept() {
  const int fd = ::accept(fd_, nullptr, nullptr);
  VFL_ENFORCE(fd >= 0, ErrorCode::kTransportClosed, "accept failed");
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return FramedSocket(fd);
}

std::unique_ptr<TcpTransport> TcpTransport::CreateLocalMesh() {
  std::unique_ptr<TcpTransport> t(new TcpTransport());
  const std::array<std::pair<Role, Role>, 3> pairs{{{Role::kGuest, Role::kHost},
                                                    {Role::kGuest, Role::kCollaborator},
                                                    {Role::kHost, Role::kCollaborator}}};
  for (const auto& [a, b] : pairs) {
    TcpListener listener;
    FramedSocket client = FramedSocket::Connect("127.0.0.1", listener.port());
    FramedSocket server = listener.Accept();
    t->sockets_.emplace(std::make_pair(a, b), std::move(client));
    t->sockets_.emplace(std::make_pair(b, a), std::move(server));
  }
  return t;
}

FramedSocket& TcpTransport::SocketFor(Role self, Role peer) {
  auto it = sockets_.find({self, peer});
  VFL_ENFORCE(it != sockets_.end(), ErrorCode::kInvalidArgument, "no such channel");
  return it->second;
}

void TcpTransport::Send(Role from, Role to, std::string frame) {
  SocketFor(from, to).SendFrame(frame);
}

std::string TcpTransport::Receive(Role at, Role from) {
  return SocketFor(at, from).ReceiveFrame();
}

void TcpTransport::Shutdown() {
  for (auto& [key, sock] : sockets_) sock.ShutdownBoth();
}

void MessageLog::Record(const ProtocolMessage& message, size_t bytes) {
  std::lock_guard lock(mu_);
  entries_.push_back({message, bytes});
  total_bytes_ += static_cast<int64_t>(bytes);
  if (mirror_) *mirror_ << message.Serialize() << '\n';
}

void MessageLog::MirrorTo(const std::filesystem::path& path) {
  std::lock_guard lock(mu_);
  mirror_ = std::make_unique<std::ofstream>(path, std::ios::trunc);
  VFL_ENFORCE(mirror_->good(), ErrorCode::kIoError, "cannot open " + path.string());
}

std::vector<LoggedMessage> MessageLog::Snapshot() const {
  std::lock_guard lock(mu_);
  return entries_;
}

int64_t MessageLog::total_bytes() const {
  std::lock_guard lock(mu_);
  return total_bytes_;
}

size_t MessageLog::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

void Endpoint::Send(Role to, MsgType type, int iteration, nlohmann::json payload) {
  ProtocolMessage msg;
  msg.type = type;
  msg.iteration = iteration;
  msg.sender = self_;
  msg.receiver = to;
  msg.payload = std::move(payload);
  std::string frame = msg.Serialize();
  log_.Record(msg, frame.size());
  transport_.Send(self_, to, std::move(frame));
}

ProtocolMessage Endpoint::Receive(Role from) {
  ProtocolMessage msg = ProtocolMessage::Parse(transport_.Receive(self_, from));
  VFL_ENFORCE(msg.sender == from && msg.receiver == self_, ErrorCode::kParseError,
              "misrouted message");
  return msg;
}

}  // namespace vfl::protocol
