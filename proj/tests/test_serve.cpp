#include <gtest/gtest.h>
#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core/buffers_to_string.hpp>
#include <boost/beast/core/flat_buffer.hpp>
#include <boost/beast/websocket.hpp>
#include <filesystem>
#include <sstream>
#include <thread>

#include "vinelock/cli/commands.hpp"
#include "vinelock/cli/server.hpp"
#include "vinelock/io/json_codec.hpp"
#include "vinelock/io/tabular.hpp"

using namespace vinelock;
using namespace vinelock::cli;
using io::Json;
namespace fs = std::filesystem;

namespace {

// Runs a LineServer on a free port for the lifetime of the fixture object.
class RunningServer {
 public:
  explicit RunningServer(Transport t, io::ProtocolConfig config = {})
      : server_(std::move(config), t, "127.0.0.1", 0), thread_([this] { server_.run(); }) {}
  ~RunningServer() {
    server_.stop();
    thread_.join();
  }
  std::uint16_t port() const { return server_.port(); }

 private:
  LineServer server_;
  std::thread thread_;
};

class TcpClient {
 public:
  explicit TcpClient(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    connected_ = ::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0;
  }
  ~TcpClient() { ::close(fd_); }
  bool connected() const { return connected_; }

  void send(const std::string& text) {
    std::size_t sent = 0;
    while (sent < text.size()) {
      const ssize_t n = ::send(fd_, text.data() + sent, text.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) return;
      sent += static_cast<std::size_t>(n);
    }
  }

  // Next newline-terminated reply, or an empty string on EOF.
  std::string read_line() {
    while (true) {
      if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      char chunk[4096];
      const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n <= 0) return {};
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  Json request(const std::string& line) {
    send(line + "\n");
    return Json::parse(read_line());
  }

 private:
  int fd_ = -1;
  bool connected_ = false;
  std::string buffer_;
};

std::string grow(int seq, double len) {
  return Json{{"type", "command"}, {"seq", seq}, {"cmd", {{"Grow", {{"delta_len", len}}}}}}.dump();
}

}  // namespace

TEST(TcpServe, GrowAndSeqEcho) {
  RunningServer server(Transport::Tcp);
  TcpClient c(server.port());
  ASSERT_TRUE(c.connected());
  const Json reply = c.request(grow(7, 100));
  EXPECT_EQ(reply["type"], "state");
  EXPECT_EQ(reply["seq"], 7);
  EXPECT_EQ(reply["snapshot"]["everted_len"], 100.0);
}

TEST(TcpServe, MalformedLinesKeepConnection) {
  RunningServer server(Transport::Tcp);
  TcpClient c(server.port());
  ASSERT_TRUE(c.connected());
  c.request(grow(1, 50));
  const Json bad = c.request("this is not json");
  EXPECT_EQ(bad["type"], "error");
  EXPECT_TRUE(bad["seq"].is_null());
  const Json wrong = c.request(R"({"type":"command","seq":2,"cmd":{"Grow":{}}})");
  EXPECT_EQ(wrong["type"], "error");
  EXPECT_EQ(wrong["seq"], 2);
  const Json ok = c.request(grow(3, 25));
  EXPECT_EQ(ok["snapshot"]["everted_len"], 75.0);
}

TEST(TcpServe, PartialAndBatchedLines) {
  RunningServer server(Transport::Tcp);
  TcpClient c(server.port());
  ASSERT_TRUE(c.connected());
  const std::string two = grow(1, 10) + "\r\n" + grow(2, 15) + "\n";
  c.send(two.substr(0, 20));
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  c.send(two.substr(20));
  EXPECT_EQ(Json::parse(c.read_line())["seq"], 1);
  const Json second = Json::parse(c.read_line());
  EXPECT_EQ(second["seq"], 2);
  EXPECT_EQ(second["snapshot"]["everted_len"], 25.0);
}

TEST(TcpServe, ConnectionsAreIndependent) {
  RunningServer server(Transport::Tcp);
  TcpClient a(server.port());
  TcpClient b(server.port());
  ASSERT_TRUE(a.connected() && b.connected());
  a.request(grow(1, 300));
  const Json rb = b.request(grow(1, 40));
  EXPECT_EQ(rb["snapshot"]["everted_len"], 40.0);
  const Json ra = a.request(grow(2, 1));
  EXPECT_EQ(ra["snapshot"]["everted_len"], 301.0);
}

TEST(TcpServe, ReplayedTraceMatchesSimulate) {
  const auto dir = fs::temp_directory_path() / "vinelock_serve_replay";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const Plan plan = plan_from_shape(
      Shape{Line{200}, Arc{250, 1.1, Turn::Right}, Line{100}, Arc{162, 0.9, Turn::Left}, Line{250}},
      DesignParams{}, 3.0);
  Json cmds = Json::array();
  for (const auto& s : plan.steps) cmds.push_back(io::to_json(s));
  const auto scenario = (dir / "s.json").string();
  io::write_text_file(scenario, Json{{"pressure", 3.0}, {"source", {{"commands", cmds}}}}.dump());
  std::ostringstream out, err;
  ASSERT_EQ(cmd_simulate({scenario, dir.string(), std::nullopt}, out, err), kOk);
  const Polyline expected =
      io::parse_polyline_csv(io::read_text_file((dir / "centerline.csv").string()));

  io::ProtocolConfig config;
  config.pressure = 3.0;
  RunningServer server(Transport::Tcp, config);
  TcpClient c(server.port());
  ASSERT_TRUE(c.connected());
  std::istringstream trace(io::read_text_file((dir / "trace.jsonl").string()));
  Json last;
  for (std::string line; std::getline(trace, line);) {
    const Json t = Json::parse(line);
    last = c.request(Json{{"type", "command"}, {"seq", t["seq"]}, {"cmd", t["cmd"]}}.dump());
    ASSERT_EQ(last["type"], "state");
    EXPECT_EQ(last["snapshot"]["everted_len"], t["everted_len"]);
  }
  const auto& pts = last["snapshot"]["centerline"];
  ASSERT_EQ(pts.size(), expected.points.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(pts[i][0].get<double>(), expected.points[i].x);
    EXPECT_EQ(pts[i][1].get<double>(), expected.points[i].y);
  }
  fs::remove_all(dir);
}

TEST(TcpServe, StopEndsOpenConnections) {
  auto server = std::make_unique<RunningServer>(Transport::Tcp);
  TcpClient c(server->port());
  ASSERT_TRUE(c.connected());
  c.request(grow(1, 5));
  server.reset();  // must not hang with a client still connected
  EXPECT_EQ(c.read_line(), "");
}

TEST(WebSocketServe, OneReplyPerLine) {
  namespace beast = boost::beast;
  namespace asio = boost::asio;
  RunningServer server(Transport::WebSocket);
  asio::io_context ioc;
  asio::ip::tcp::resolver resolver(ioc);
  beast::websocket::stream<asio::ip::tcp::socket> ws(ioc);
  asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(server.port())));
  ws.handshake("127.0.0.1", "/");
  ws.text(true);

  auto read_json = [&] {
    beast::flat_buffer buf;
    ws.read(buf);
    return Json::parse(beast::buffers_to_string(buf.data()));
  };

  ws.write(asio::buffer(grow(1, 120)));
  const Json first = read_json();
  EXPECT_EQ(first["seq"], 1);
  EXPECT_EQ(first["snapshot"]["everted_len"], 120.0);

  ws.write(asio::buffer(std::string("nonsense")));
  EXPECT_EQ(read_json()["type"], "error");

  ws.write(asio::buffer(grow(2, 10) + "\n" + grow(3, 10) + "\n"));
  EXPECT_EQ(read_json()["seq"], 2);
  const Json third = read_json();
  EXPECT_EQ(third["seq"], 3);
  EXPECT_EQ(third["snapshot"]["everted_len"], 140.0);

  ws.write(asio::buffer(std::string(R"({"type":"reset","seq":4,"pressure":2})")));
  const Json reset = read_json();
  EXPECT_EQ(reset["snapshot"]["everted_len"], 0.0);
  EXPECT_EQ(reset["snapshot"]["pressure"], 2.0);
  ws.close(beast::websocket::close_code::normal);
}

TEST(LineServerSetup, RejectsBadBindings) {
  EXPECT_THROW(LineServer({}, Transport::Tcp, "not-an-ip", 0), Error);
  EXPECT_THROW(LineServer({}, Transport::Stdio, "127.0.0.1", 0), Error);
  LineServer first({}, Transport::Tcp, "127.0.0.1", 0);
  EXPECT_THROW(LineServer({}, Transport::Tcp, "127.0.0.1", first.port()), Error);
}
