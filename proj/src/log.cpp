#include "cascadefuse/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace cascadefuse {
namespace {
std::atomic<bool> g_enabled{true};
std::atomic<std::size_t> g_count{0};
std::mutex g_mutex;
}  // namespace

void warn(const std::string& message) {
  g_count.fetch_add(1, std::memory_order_relaxed);
  if (!g_enabled.load(std::memory_order_relaxed)) return;
  std::lock_guard lock(g_mutex);
  std::clog << "warning: " << message << '\n';
}

void set_warnings_enabled(bool enabled) { g_enabled.store(enabled); }

std::size_t warning_count() { return g_count.load(); }

}  // namespace cascadefuse
