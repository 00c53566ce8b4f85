#include "dash/service/http_server.hpp"

#include <httplib.h>

namespace dash::service {

HttpServer::HttpServer(DashService& service)
    : service_(service), router_(service), server_(std::make_unique<httplib::Server>()) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest api;
    api.method = req.method;
    api.path = req.path;
    for (const auto& [k, v] : req.params) api.query[k] = v;
    api.authorization = req.get_header_value("Authorization");
    api.body = req.body;
    auto out = router_.handle(api);
    res.status = out.status;
    res.set_content(canonicalDump(out.body), "application/json");
  };
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Authorization, Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"}});
  server_->Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  if (!service_.config().uiDir.empty()) server_->set_mount_point("/ui", service_.config().uiDir);
  server_->Get(".*", handler);
  server_->Post(".*", handler);
  server_->Delete(".*", handler);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

void HttpServer::run() { server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

}  // namespace dash::service
