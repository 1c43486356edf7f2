#include <httplib.h>

#include <cstdlib>

#include "formalgrade/service.hpp"

namespace formalgrade {

using doc::Json;

ServerConfig load_server_config(const Json& j) {
  ServerConfig c;
  if (!j.is_null() && !j.is_object()) throw InvalidDocument("the server config must be an object");
  try {
    if (j.contains("addr")) c.addr = j.at("addr").get<std::string>();
    if (j.contains("port")) c.port = j.at("port").get<int>();
    if (j.contains("store_path")) c.store_path = j.at("store_path").get<std::string>();
    if (j.contains("token_secret")) c.token_secret = j.at("token_secret").get<std::string>();
  } catch (const Json::exception& e) {
    throw InvalidDocument(std::string("server config: ") + e.what());
  }
  if (const char* v = std::getenv("FG_ADDR")) c.addr = v;
  if (const char* v = std::getenv("FG_STORE_PATH")) c.store_path = v;
  if (const char* v = std::getenv("FG_TOKEN_SECRET")) c.token_secret = v;
  return c;
}

struct HttpServer::Impl {
  Service& service;
  std::string secret;
  httplib::Server server;

  Impl(Service& s, std::string k) : service(s), secret(std::move(k)) {}

  static void send_error(httplib::Response& res, int status, const std::string& code, const std::string& what) {
    res.status = status;
    res.set_content(Json{{"error", code}, {"message", what}}.dump(), "application/json");
  }

  // Wraps a handler with auth, body parsing and error mapping.
  template <class F>
  httplib::Server::Handler route(F f) {
    return [this, f](const httplib::Request& req, httplib::Response& res) {
      try {
        const std::string auth = req.get_header_value("Authorization");
        const std::string prefix = "Bearer ";
        if (auth.compare(0, prefix.size(), prefix) != 0)
          throw ServiceError(401, "unauthorized", "missing bearer token");
        const Caller who = verify_token(secret, auth.substr(prefix.size()));
        const Json body = req.body.empty() ? Json::object() : doc::parse(req.body);
        f(who, req, body, res);
      } catch (const ServiceError& e) {
        send_error(res, e.status(), e.code(), e.what());
      } catch (const Error& e) {
        send_error(res, 422, e.code(), e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "internal-error", e.what());
      }
    };
  }

  static void reply(httplib::Response& res, const Json& j, int status = 200) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
  }

  void install() {
    using Req = const httplib::Request&;
    using Res = httplib::Response&;
    server.Get("/health", [](Req, Res res) { reply(res, {{"status", "ok"}}); });
    server.Post("/courses", route([this](const Caller& c, Req, const Json& b, Res res) {
                  reply(res, service.create_course(c, b), 201);
                }));
    server.Post(R"(/courses/([^/]+)/enroll)", route([this](const Caller& c, Req req, const Json& b, Res res) {
                  reply(res, service.enroll(c, req.matches[1], b));
                }));
    server.Post(R"(/courses/([^/]+)/problems)", route([this](const Caller& c, Req req, const Json& b, Res res) {
                  reply(res, service.add_problem(c, req.matches[1], b), 201);
                }));
    server.Get(R"(/courses/([^/]+)/grades\.csv)", route([this](const Caller& c, Req req, const Json&, Res res) {
                 res.set_content(service.grades_csv(c, req.matches[1]), "text/csv; charset=utf-8");
               }));
    server.Post(R"(/problems/([^/]+)/pose)", route([this](const Caller& c, Req req, const Json& b, Res res) {
                  reply(res, service.pose(c, req.matches[1], b), 201);
                }));
    server.Get("/posed", route([this](const Caller& c, Req, const Json&, Res res) { reply(res, service.list_posed(c)); }));
    server.Post(R"(/posed/([^/]+)/attempts)", route([this](const Caller& c, Req req, const Json& b, Res res) {
                  reply(res, service.submit_attempt(c, req.matches[1], b), 201);
                }));
    server.Get(R"(/posed/([^/]+)/attempts)", route([this](const Caller& c, Req req, const Json&, Res res) {
                 reply(res, service.attempts(c, req.matches[1]));
               }));
    server.Post(R"(/posed/([^/]+)/game)", route([this](const Caller& c, Req req, const Json& b, Res res) {
                  reply(res, service.game(c, req.matches[1], b));
                }));
    server.Post("/generate", route([this](const Caller& c, Req, const Json& b, Res res) {
                  reply(res, service.generate(c, b));
                }));
    server.Post("/simulate", route([this](const Caller& c, Req, const Json& b, Res res) {
                  reply(res, service.simulate(c, b));
                }));
  }
};

HttpServer::HttpServer(Service& service, std::string token_secret)
    : impl_(std::make_unique<Impl>(service, std::move(token_secret))) {
  // SO_REUSEPORT (the library default) would let a second server share the
  // port silently; a taken port must fail to bind.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  impl_->install();
}

HttpServer::~HttpServer() = default;

bool HttpServer::bind(const std::string& addr, int port) { return impl_->server.bind_to_port(addr, port); }
int HttpServer::bind_any(const std::string& addr) { return impl_->server.bind_to_any_port(addr); }
void HttpServer::listen() { impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }
void HttpServer::wait_until_ready() { impl_->server.wait_until_ready(); }

}  // namespace formalgrade
