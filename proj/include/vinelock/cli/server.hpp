#pragma once
// Socket transports for the line protocol. Every connection gets its own thread and its
// own ProtocolSession; nothing is shared between connections.

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "vinelock/cli/commands.hpp"
#include "vinelock/io/protocol.hpp"

namespace vinelock::cli {

class LineServer {
 public:
  /// Binds and listens immediately; port 0 picks a free port.
  LineServer(io::ProtocolConfig config, Transport transport, const std::string& host,
             std::uint16_t port);
  ~LineServer();
  LineServer(const LineServer&) = delete;
  LineServer& operator=(const LineServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }

  /// Accepts connections until stop(); joins connection threads before returning.
  void run();
  /// Safe to call from any thread.
  void stop();

 private:
  void serve_tcp(int fd);
  void serve_websocket(int fd);

  io::ProtocolConfig config_;
  Transport transport_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex mutex_;
  std::set<int> clients_;
  std::vector<std::thread> threads_;
};

/// Reads protocol lines from `in` until EOF, answering each on `out`.
void serve_stream(const io::ProtocolConfig& config, std::istream& in, std::ostream& out);

}  // namespace vinelock::cli
