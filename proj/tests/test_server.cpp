// Copyright 2026 The Consensus Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <fstream>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>

#include "consensus_lab/server.hpp"
#include "support.hpp"

namespace cl = consensus_lab;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using asio::ip::tcp;
using nlohmann::json;
using namespace consensus_lab::service;

namespace {

class Running {
 public:
  explicit Running(ServerOptions o) : server_(std::move(o)), thread_([this] { server_.run(); }) {}
  ~Running() {
    server_.stop();
    thread_.join();
  }
  Server& server() { return server_; }
  void stop_and_join() {
    server_.stop();
    thread_.join();
    thread_ = std::thread([] {});
  }

 private:
  Server server_;
  std::thread thread_;
};

ServerOptions quick(const std::filesystem::path& dir) {
  ServerOptions o;
  o.address = "127.0.0.1";
  o.port = 0;
  o.data_dir = dir;
  for (auto& c : o.session.schedule) c.countdown = 0.0;
  return o;
}

http::response<http::string_body> get(int port, const std::string& target) {
  asio::io_context ioc;
  tcp::socket sock(ioc);
  sock.connect({asio::ip::make_address("127.0.0.1"), static_cast<unsigned short>(port)});
  http::request<http::string_body> req{http::verb::get, target, 11};
  req.set(http::field::host, "127.0.0.1");
  http::write(sock, req);
  beast::flat_buffer buf;
  http::response<http::string_body> res;
  http::read(sock, buf, res);
  return res;
}

class Client {
 public:
  explicit Client(int port) : ws_(ioc_) {
    ws_.next_layer().connect({asio::ip::make_address("127.0.0.1"), static_cast<unsigned short>(port)});
    ws_.handshake("127.0.0.1", "/session");
    ws_.text(true);
  }
  void send(const json& j) { ws_.write(asio::buffer(j.dump())); }
  json recv() {
    beast::flat_buffer buf;
    ws_.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }
  json recv_until(const std::string& type) {
    for (;;) {
      json j = recv();
      if (j.at("type") == type || j.at("type") == "Error") return j;
    }
  }

 private:
  asio::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

bool wait_for(const std::function<bool()>& pred) {
  for (int i = 0; i < 300; ++i) {
    if (pred()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  return pred();
}

}  // namespace

TEST(Server, NextSessionId) {
  const auto dir = testkit::scratch_dir("server_ids");
  EXPECT_EQ(next_session_id(dir), 1);
  std::ofstream(dir / "session_0007.ndjson") << "";
  std::ofstream(dir / "notes.txt") << "";
  EXPECT_EQ(next_session_id(dir), 8);
}

TEST(Server, HealthAndStatic) {
  const auto dir = testkit::scratch_dir("server_health");
  const auto web = dir / "web";
  std::filesystem::create_directories(web);
  std::ofstream(web / "index.html") << "<html>lab</html>";
  ServerOptions o = quick(dir / "data");
  o.static_dir = web;
  Running r(o);
  const int port = r.server().port();
  ASSERT_GT(port, 0);
  const auto h = get(port, "/healthz");
  EXPECT_EQ(h.result(), http::status::ok);
  const json info = json::parse(h.body());
  EXPECT_EQ(info.at("status"), "ok");
  EXPECT_EQ(info.at("live_sessions"), 0);
  const auto idx = get(port, "/");
  EXPECT_EQ(idx.result(), http::status::ok);
  EXPECT_EQ(idx.body(), "<html>lab</html>");
  EXPECT_EQ(idx[http::field::content_type], "text/html");
  EXPECT_EQ(get(port, "/missing.js").result(), http::status::not_found);
  EXPECT_EQ(get(port, "/../secret").result(), http::status::bad_request);
}

TEST(Server, ServesShippedClient) {
  ServerOptions o = quick(testkit::scratch_dir("server_web"));
  o.static_dir = std::filesystem::path(CONSENSUS_LAB_SOURCE_DIR) / "web";
  Running r(o);
  const auto idx = get(r.server().port(), "/");
  EXPECT_EQ(idx.result(), http::status::ok);
  EXPECT_NE(idx.body().find("client.js"), std::string::npos);
  const auto js = get(r.server().port(), "/client.js");
  EXPECT_EQ(js.result(), http::status::ok);
  EXPECT_NE(js.body().find("/session"), std::string::npos);
}

TEST(Server, PortInUseThrows) {
  const auto dir = testkit::scratch_dir("server_port");
  Running r(quick(dir));
  ServerOptions o = quick(dir);
  o.port = r.server().port();
  EXPECT_THROW(Server{o}, std::system_error);
}

TEST(Server, CompletesSessionOverWebsocket) {
  const auto dir = testkit::scratch_dir("server_session");
  ServerOptions o = quick(dir);
  const cl::Vec2 red = o.session.sim.workspace.red_box.anchor();
  Running r(o);
  Client c(r.server().port());
  c.send({{"type", "Hello"}, {"name", "tester"}});
  json end;
  for (int trial = 1; trial <= 8; ++trial) {
    c.send({{"type", "Ready"}});
    const json start = c.recv_until("TrialStart");
    ASSERT_EQ(start.at("type"), "TrialStart");
    EXPECT_EQ(start.at("index"), trial);
    c.send({{"type", "Cursor"}, {"t", 0.0}, {"x", red.x}, {"y", red.y}});
    const json te = c.recv_until("TrialEnd");
    ASSERT_EQ(te.at("type"), "TrialEnd");
    EXPECT_EQ(te.at("human_press"), "red");
    if (trial == 8) end = c.recv_until("SessionEnd");
  }
  ASSERT_EQ(end.at("type"), "SessionEnd");
  EXPECT_EQ(end.at("outcomes").size(), 8u);
  ASSERT_TRUE(wait_for([&] { return std::filesystem::exists(dir / "session_0001.summary.json"); }));
  const json summary = json::parse(testkit::read_file(dir / "session_0001.summary.json"));
  EXPECT_FALSE(summary.at("aborted").get<bool>());
  EXPECT_EQ(summary.at("total_score"), end.at("total"));
}

TEST(Server, RefusesWhenFull) {
  const auto dir = testkit::scratch_dir("server_busy");
  ServerOptions o = quick(dir);
  o.max_sessions = 1;
  Running r(o);
  Client first(r.server().port());
  ASSERT_TRUE(wait_for([&] { return r.server().live_sessions() == 1; }));
  Client second(r.server().port());
  const json e = second.recv();
  EXPECT_EQ(e.at("type"), "Error");
  EXPECT_EQ(e.at("code"), "busy");
}

TEST(Server, StopFlushesAbortedSession) {
  const auto dir = testkit::scratch_dir("server_stop");
  Running r(quick(dir));
  Client c(r.server().port());
  c.send({{"type", "Ready"}});
  c.recv_until("TrialStart");
  c.recv_until("Tick");
  r.stop_and_join();
  ASSERT_TRUE(std::filesystem::exists(dir / "session_0001.summary.json"));
  const json summary = json::parse(testkit::read_file(dir / "session_0001.summary.json"));
  EXPECT_TRUE(summary.at("aborted").get<bool>());
  EXPECT_EQ(summary.at("trials"), 1);
}

TEST(Server, DisconnectFlushesAbortedSession) {
  const auto dir = testkit::scratch_dir("server_drop");
  Running r(quick(dir));
  {
    Client c(r.server().port());
    c.send({{"type", "Ready"}});
    c.recv_until("Tick");
  }
  EXPECT_TRUE(wait_for([&] { return std::filesystem::exists(dir / "session_0001.summary.json"); }));
  EXPECT_TRUE(wait_for([&] { return r.server().live_sessions() == 0; }));
}
