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

#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "vfl/common/role.h"
#include "vfl/protocol/message.h"

namespace vfl::protocol {

// Ordered, reliable, typed point-to-point delivery between the three roles.
// Frames on one (from, to) channel arrive in send order.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void Send(Role from, Role to, std::string frame) = 0;
  // Blocks. Throws kTransportClosed after Shutdown().
  virtual std::string Receive(Role at, Role from) = 0;
  // Wakes every blocked receiver; the transport is unusable afterwards.
  virtual void Shutdown() = 0;
};

class LoopbackTransport final : public Transport {
 public:
  void Send(Role from, Role to, std::string frame) override;
  std::string Receive(Role at, Role from) override;
  void Shutdown() override;

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::pair<Role, Role>, std::deque<std::string>> queues_;
  bool closed_ = false;
};

// Blocking socket carrying length-prefixed frames: 4-byte big-endian length,
// then the payload bytes.
class FramedSocket {
 public:
  explicit FramedSocket(int fd) : fd_(fd) {}
  FramedSocket(FramedSocket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  FramedSocket& operator=(FramedSocket&& other) noexcept;
  FramedSocket(const FramedSocket&) = delete;
  FramedSocket& operator=(const FramedSocket&) = delete;
  ~FramedSocket();

  static FramedSocket Connect(const std::string& host, uint16_t port);

  void SendFrame(const std::string& payload);
  std::string ReceiveFrame();
  void ShutdownBoth();
  int fd() const { return fd_; }

 private:
  int fd_ = -1;
};

class TcpListener {
 public:
  // Port 0 picks an ephemeral port.
  explicit TcpListener(uint16_t port = 0);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  uint16_t port() const { return port_; }
  FramedSocket Accept();

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
};

// Three parties in one process talking over real localhost TCP connections,
// one connection per pair of roles.
class TcpTransport final : public Transport {
 public:
  static std::unique_ptr<TcpTransport> CreateLocalMesh();

  void Send(Role from, Role to, std::string frame) override;
  std::string Receive(Role at, Role from) override;
  void Shutdown() override;

 private:
  TcpTransport() = default;
  FramedSocket& SocketFor(Role self, Role peer);

  // Keyed by (owner, peer).
  std::map<std::pair<Role, Role>, FramedSocket> sockets_;
};

struct LoggedMessage {
  ProtocolMessage message;
  size_t bytes = 0;
};

// Records every message that crosses a party boundary. Optionally mirrors
// them to a JSON-lines file for offline audit.
class MessageLog {
 public:
  void Record(const ProtocolMessage& message, size_t bytes);
  void MirrorTo(const std::filesystem::path& path);

  std::vector<LoggedMessage> Snapshot() const;
  int64_t total_bytes() const;
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<LoggedMessage> entries_;
  int64_t total_bytes_ = 0;
  std::unique_ptr<std::ofstream> mirror_;
};

// A party's handle on the transport.
class Endpoint {
 public:
  Endpoint(Role self, Transport& transport, MessageLog& log)
      : self_(self), transport_(transport), log_(log) {}

  Role self() const { return self_; }
  void Send(Role to, MsgType type, int iteration, nlohmann::json payload);
  ProtocolMessage Receive(Role from);

 private:
  Role self_;
  Transport& transport_;
  MessageLog& log_;
};

}  // namespace vfl::protocol
