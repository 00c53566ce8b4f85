#pragma once

#include <map>
#include <string>

#include "dash/hash.hpp"
#include "dash/service/service.hpp"

namespace dash::service {

struct ApiRequest {
  std::string method;
  std::string path;  // without query string
  std::map<std::string, std::string> query;
  std::string authorization;  // "Bearer <key>" or the bare key
  std::string body;
};

struct ApiResponse {
  int status = 200;
  Json body = Json::object();
};

/// Transport-independent request dispatch, shared by the HTTP server and
/// the scenario runner.
class ApiRouter {
 public:
  explicit ApiRouter(DashService& service) : service_(service) {}
  ApiResponse handle(const ApiRequest& req);

 private:
  ApiResponse route(const ApiRequest& req);
  DashService& service_;
};

/// Splits "path?a=1&b=2" into path and query.
ApiRequest parseTarget(std::string method, const std::string& target);

}  // namespace dash::service
