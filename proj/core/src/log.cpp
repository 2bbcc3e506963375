#include "haam/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace haam {
namespace {

std::mutex g_mutex;
WarningHandler g_handler;

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(g_mutex);
  return std::exchange(g_handler, std::move(handler));
}

void warn(std::string_view message) {
  std::lock_guard lock(g_mutex);
  if (g_handler) {
    g_handler(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace haam
