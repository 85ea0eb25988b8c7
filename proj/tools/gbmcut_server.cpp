#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>

#include "gbmcut/service.hpp"

namespace {
gbmcut::Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}
}  // namespace

// GBMCUT_BIND=host:port (default 127.0.0.1:8080), GBMCUT_MAX_UPLOAD_BYTES, GBMCUT_DATA_DIR.
int main() {
  std::string bind = "127.0.0.1:8080";
  if (const char* env = std::getenv("GBMCUT_BIND"); env && *env) bind = env;
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "GBMCUT_BIND must be host:port\n";
    return 2;
  }
  const std::string host = bind.substr(0, colon);
  const int port = std::atoi(bind.c_str() + colon + 1);

  try {
    gbmcut::Service service(gbmcut::config_from_env());
    const int bound = service.bind(host, port);
    if (bound < 0) {
      std::cerr << "cannot bind " << bind << '\n';
      return 3;
    }
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on " << host << ':' << bound << '\n';
    service.run();
    g_service = nullptr;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
