#include "logging.hpp"

#include <atomic>
#include <mutex>

namespace erc {

namespace {
std::mutex g_mutex;
LogHook g_hook = nullptr;
void* g_user = nullptr;
}  // namespace

void set_log_hook(LogHook fn, void* user) {
  std::lock_guard<std::mutex> lock(g_mutex);
  g_hook = fn;
  g_user = user;
}

void log_line(const std::string& line) {
  std::lock_guard<std::mutex> lock(g_mutex);
  if (g_hook) g_hook(line.c_str(), g_user);
}

}  // namespace erc
