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

#include "consensus_lab/server.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <system_error>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/version.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include "consensus_lab/session_log.hpp"

#ifndef CONSENSUS_LAB_VERSION
#define CONSENSUS_LAB_VERSION "0.0.0"
#endif

namespace consensus_lab::service {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

nlohmann::json build_info() {
  return {{"status", "ok"},
          {"name", "consensus-lab"},
          {"version", CONSENSUS_LAB_VERSION},
          {"compiler", __VERSION__},
          {"schema", session_log::kSchemaVersion},
          {"boost", BOOST_LIB_VERSION}};
}

int next_session_id(const std::filesystem::path& dir) {
  int next = 1;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) return next;
  static const std::regex stem(R"(session_(\d+)\.(ndjson|summary\.json))");
  for (const auto& e : std::filesystem::directory_iterator(dir, ec)) {
    std::smatch m;
    const std::string name = e.path().filename().string();
    if (std::regex_match(name, m, stem)) next = std::max(next, std::stoi(m[1].str()) + 1);
  }
  return next;
}

namespace {

std::string_view mime_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".map") return "application/json";
  return "application/octet-stream";
}

class WsSession;

}  // namespace

struct Server::Impl : std::enable_shared_from_this<Server::Impl> {
  ServerOptions opt;
  asio::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  std::atomic<int> next_id{1};
  std::atomic<int> live{0};
  std::set<std::shared_ptr<WsSession>> sessions;
  bool stopping = false;

  explicit Impl(ServerOptions o) : opt(std::move(o)) {}

  void accept();
  void shutdown();
  void drain(std::shared_ptr<asio::steady_timer> timer,
             std::chrono::steady_clock::time_point deadline);
  void persist(const protocol::SessionRecord& s) {
    session_log::write_session(opt.data_dir, session_log::session_stem(s.participant_id), s);
  }
};

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(std::shared_ptr<Server::Impl> server, tcp::socket socket, int id)
      : server_(std::move(server)),
        ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        live_(id, server_->opt.session,
              [srv = server_](const protocol::SessionRecord& s) { srv->persist(s); }),
        period_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(server_->opt.session.sim.dt))) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->teardown();
      spdlog::info("session {} connected", self->live_.id());
      self->read();
      self->next_tick_ = std::chrono::steady_clock::now() + self->period_;
      self->schedule();
    });
  }

  // Server shutdown: abort, flush what we can, close.
  void shutdown() {
    send(live_.abort());
    close_after_flush();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->teardown();
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->send(self->live_.handle_text(text));
      if (self->live_.phase() == Phase::Done) return self->close_after_flush();
      self->read();
    });
  }

  void schedule() {
    timer_.expires_at(next_tick_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closing_) return;
      self->send(self->live_.tick());
      if (self->live_.phase() == Phase::Done) return self->close_after_flush();
      const auto now = std::chrono::steady_clock::now();
      self->next_tick_ += self->period_;
      if (self->next_tick_ + 5 * self->period_ < now) self->next_tick_ = now;
      self->schedule();
    });
  }

  void send(const Messages& msgs) {
    if (closed_) return;
    for (const json& m : msgs) outbox_.push_back(m.dump());
    if (!writing_) write_next();
  }

  void write_next() {
    if (outbox_.empty()) {
      writing_ = false;
      if (closing_) close();
      return;
    }
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      self->outbox_.pop_front();
                      if (ec) return self->teardown();
                      self->write_next();
                    });
  }

  void close_after_flush() {
    closing_ = true;
    timer_.cancel();
    if (!writing_) close();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    ws_.async_close(websocket::close_code::normal,
                    [self = shared_from_this()](beast::error_code) { self->teardown(); });
  }

  void teardown() {
    if (torn_down_) return;
    torn_down_ = true;
    closing_ = true;
    closed_ = true;
    timer_.cancel();
    live_.abort();  // disconnect mid-session flushes an aborted log
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().close(ignored);
    spdlog::info("session {} closed", live_.id());
    --server_->live;
    server_->sessions.erase(shared_from_this());
  }

  std::shared_ptr<Server::Impl> server_;
  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  LiveSession live_;
  std::chrono::steady_clock::duration period_;
  std::chrono::steady_clock::time_point next_tick_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  bool writing_ = false;
  bool closing_ = false;
  bool closed_ = false;
  bool torn_down_ = false;
};

// Sends one Error and closes; used when the server is full.
void refuse_busy(tcp::socket socket, http::request<http::string_body> req) {
  auto ws = std::make_shared<websocket::stream<beast::tcp_stream>>(std::move(socket));
  ws->async_accept(req, [ws](beast::error_code ec) {
    if (ec) return;
    auto text = std::make_shared<std::string>(wire::error(wire::kBusy, "server at capacity").dump());
    ws->text(true);
    ws->async_write(asio::buffer(*text), [ws, text](beast::error_code, std::size_t) {
      ws->async_close(websocket::close_code::try_again_later, [ws](beast::error_code) {});
    });
  });
}

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(std::shared_ptr<Server::Impl> server, tcp::socket socket)
      : server_(std::move(server)), stream_(std::move(socket)) {}

  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) return self->close();
                       self->dispatch();
                     });
  }

 private:
  void dispatch() {
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      if (req_.target() != "/session") return reply(not_found());
      Server::Impl& srv = *server_;
      if (srv.stopping || srv.live >= srv.opt.max_sessions) {
        return refuse_busy(stream_.release_socket(), std::move(req_));
      }
      ++srv.live;
      auto s = std::make_shared<WsSession>(server_, stream_.release_socket(), srv.next_id++);
      srv.sessions.insert(s);
      s->start(std::move(req_));
      return;
    }
    if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
      return reply(simple(http::status::method_not_allowed, "method not allowed\n"));
    }
    const std::string target(req_.target());
    if (target == "/healthz") {
      auto info = build_info();
      info["live_sessions"] = server_->live.load();
      auto res = simple(http::status::ok, info.dump() + "\n");
      res.set(http::field::content_type, "application/json");
      return reply(std::move(res));
    }
    reply(static_file(target));
  }

  http::response<http::string_body> simple(http::status status, std::string body) {
    http::response<http::string_body> res{status, req_.version()};
    res.set(http::field::server, "consensus-lab");
    res.set(http::field::content_type, "text/plain");
    res.keep_alive(req_.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  }

  http::response<http::string_body> not_found() { return simple(http::status::not_found, "not found\n"); }

  http::response<http::string_body> static_file(std::string target) {
    const auto& root = server_->opt.static_dir;
    if (root.empty()) return not_found();
    if (auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target.empty() || target[0] != '/' || target.find("..") != std::string::npos) {
      return simple(http::status::bad_request, "bad path\n");
    }
    if (target.back() == '/') target += "index.html";
    const std::filesystem::path p = root / target.substr(1);
    std::ifstream in(p, std::ios::binary);
    if (!in || std::filesystem::is_directory(p)) return not_found();
    std::ostringstream body;
    body << in.rdbuf();
    auto res = simple(http::status::ok, body.str());
    res.set(http::field::content_type, std::string(mime_type(p)));
    return res;
  }

  void reply(http::response<http::string_body> res) {
    auto r = std::make_shared<http::response<http::string_body>>(std::move(res));
    if (req_.method() == http::verb::head) r->body().clear();
    http::async_write(stream_, *r, [self = shared_from_this(), r](beast::error_code ec, std::size_t) {
      if (ec || !r->keep_alive() || self->server_->stopping) return self->close();
      self->read();
    });
  }

  void close() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
  }

  std::shared_ptr<Server::Impl> server_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

void Server::Impl::accept() {
  acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
    if (ec) {
      if (ec == asio::error::operation_aborted || !self->acceptor.is_open()) return;
      spdlog::warn("accept failed: {}", ec.message());
    } else {
      std::make_shared<HttpConnection>(self, std::move(socket))->read();
    }
    self->accept();
  });
}

void Server::Impl::shutdown() {
  if (stopping) return;
  stopping = true;
  beast::error_code ec;
  acceptor.close(ec);
  const auto live_now = sessions;
  for (const auto& s : live_now) s->shutdown();
  // Stop once sessions are gone, or after 3 s if a peer never completes
  // the close handshake.
  drain(std::make_shared<asio::steady_timer>(ioc),
        std::chrono::steady_clock::now() + std::chrono::seconds(3));
}

void Server::Impl::drain(std::shared_ptr<asio::steady_timer> timer,
                         std::chrono::steady_clock::time_point deadline) {
  if (sessions.empty() || std::chrono::steady_clock::now() >= deadline) {
    ioc.stop();
    return;
  }
  timer->expires_after(std::chrono::milliseconds(20));
  timer->async_wait([self = shared_from_this(), timer, deadline](beast::error_code) {
    self->drain(timer, deadline);
  });
}

Server::Server(ServerOptions options) : impl_(std::make_shared<Impl>(std::move(options))) {
  impl_->opt.session.sim.validate();
  protocol::validate_schedule(impl_->opt.session.schedule);
  std::filesystem::create_directories(impl_->opt.data_dir);
  impl_->next_id = next_session_id(impl_->opt.data_dir);
  const tcp::endpoint ep{asio::ip::make_address(impl_->opt.address),
                         static_cast<unsigned short>(impl_->opt.port)};
  try {
    impl_->acceptor.open(ep.protocol());
    impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
    impl_->acceptor.bind(ep);
    impl_->acceptor.listen(asio::socket_base::max_listen_connections);
  } catch (const boost::system::system_error& e) {
    throw std::system_error(e.code().value(), std::generic_category(),
                            "cannot listen on " + impl_->opt.address + ":" + std::to_string(impl_->opt.port));
  }
}

Server::~Server() = default;

int Server::port() const { return impl_->acceptor.local_endpoint().port(); }

int Server::live_sessions() const { return impl_->live.load(); }

void Server::run(bool handle_signals) {
  std::optional<asio::signal_set> signals;
  if (handle_signals) {
    signals.emplace(impl_->ioc, SIGINT, SIGTERM);
    signals->async_wait([impl = impl_](beast::error_code ec, int sig) {
      if (ec) return;
      spdlog::info("signal {}: draining", sig);
      impl->shutdown();
    });
  }
  spdlog::info("listening on {}:{}", impl_->opt.address, port());
  impl_->accept();
  impl_->ioc.run();
  // Anything still registered (hard stop) is aborted synchronously.
  for (const auto& s : std::set<std::shared_ptr<WsSession>>(impl_->sessions)) s->shutdown();
  impl_->sessions.clear();
}

void Server::stop() {
  asio::post(impl_->ioc, [impl = impl_] { impl->shutdown(); });
}

}  // namespace consensus_lab::service
