#include "vinelock/cli/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core/buffers_to_string.hpp>
#include <boost/beast/core/flat_buffer.hpp>
#include <boost/beast/websocket.hpp>
#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>

namespace vinelock::cli {

namespace {

namespace beast = boost::beast;
namespace asio = boost::asio;

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

// Feeds complete lines from `buffer` to the session, leaving any partial tail.
std::string drain_lines(std::string& buffer, io::ProtocolSession& session) {
  std::string replies;
  std::size_t start = 0;
  for (auto nl = buffer.find('\n'); nl != std::string::npos; nl = buffer.find('\n', start)) {
    std::string_view line(buffer.data() + start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) replies += session.handle_line(line) + "\n";
    start = nl + 1;
  }
  buffer.erase(0, start);
  return replies;
}

}  // namespace

LineServer::LineServer(io::ProtocolConfig config, Transport transport, const std::string& host,
                       std::uint16_t port)
    : config_(std::move(config)), transport_(transport) {
  if (transport_ == Transport::Stdio) {
    throw Error(ErrorCode::Precondition, "LineServer needs a socket transport");
  }
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw Error(ErrorCode::Precondition, "not an IPv4 address: " + host);
  }
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(ErrorCode::Io, std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 16) != 0) {
    const std::string msg = std::strerror(errno);
    ::close(listen_fd_);
    throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port) + ": " + msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

LineServer::~LineServer() {
  stop();
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void LineServer::run() {
  while (!stopping_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;
    }
    std::lock_guard lock(mutex_);
    if (stopping_) {
      ::close(fd);
      break;
    }
    clients_.insert(fd);
    threads_.emplace_back([this, fd] {
      try {
        if (transport_ == Transport::Tcp) {
          serve_tcp(fd);
        } else {
          serve_websocket(fd);
        }
      } catch (...) {
        // a broken connection only ends its own session
      }
      std::lock_guard inner(mutex_);
      if (clients_.erase(fd) > 0) ::close(fd);
    });
  }
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(mutex_);
    threads.swap(threads_);
  }
  for (auto& t : threads) t.join();
}

void LineServer::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  std::lock_guard lock(mutex_);
  for (const int fd : clients_) ::shutdown(fd, SHUT_RDWR);
}

void LineServer::serve_tcp(int fd) {
  io::ProtocolSession session(config_);
  std::string buffer;
  char chunk[4096];
  while (true) {
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return;
    buffer.append(chunk, static_cast<std::size_t>(n));
    if (const std::string replies = drain_lines(buffer, session); !replies.empty()) {
      if (!send_all(fd, replies)) return;
    }
  }
}

void LineServer::serve_websocket(int fd) {
  asio::io_context ioc;
  asio::ip::tcp::socket socket(ioc);
  // The socket object takes over the descriptor; keep our copy registered for stop().
  socket.assign(asio::ip::tcp::v4(), ::dup(fd));
  beast::websocket::stream<asio::ip::tcp::socket> ws(std::move(socket));
  ws.accept();
  ws.text(true);
  io::ProtocolSession session(config_);
  beast::flat_buffer buffer;
  while (true) {
    beast::error_code ec;
    ws.read(buffer, ec);
    if (ec) return;
    // One message may carry one line or several; a trailing newline is optional.
    std::string text = beast::buffers_to_string(buffer.data());
    buffer.consume(buffer.size());
    if (text.empty() || text.back() != '\n') text += '\n';
    std::size_t start = 0;
    for (auto nl = text.find('\n'); nl != std::string::npos; nl = text.find('\n', start)) {
      std::string_view line(text.data() + start, nl - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      start = nl + 1;
      if (line.empty()) continue;
      ws.write(asio::buffer(session.handle_line(line)), ec);
      if (ec) return;
    }
  }
}

void serve_stream(const io::ProtocolConfig& config, std::istream& in, std::ostream& out) {
  io::ProtocolSession session(config);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out << session.handle_line(line) << '\n';
    out.flush();
  }
}

}  // namespace vinelock::cli
