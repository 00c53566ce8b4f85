#pragma once

#include <memory>
#include <string>

#include "dash/service/api.hpp"

namespace httplib {
class Server;
}

namespace dash::service {

class HttpServer {
 public:
  explicit HttpServer(DashService& service);
  ~HttpServer();

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void run();
  void stop();

 private:
  DashService& service_;
  ApiRouter router_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace dash::service
