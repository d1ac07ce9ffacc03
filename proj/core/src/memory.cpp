#include "ggmc/memory.hpp"

#include <fstream>
#include <string>

namespace ggmc::memory {

namespace {

std::size_t status_field_kib(const std::string& key) {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key, 0) == 0) return std::stoull(line.substr(key.size())) * 1024;
  }
  return 0;
}

}  // namespace

std::size_t current_rss_bytes() { return status_field_kib("VmRSS:"); }

std::size_t peak_rss_bytes() { return status_field_kib("VmHWM:"); }

bool reset_peak_rss() {
  std::ofstream out("/proc/self/clear_refs");
  if (!out) return false;
  out << "5";
  out.flush();
  return static_cast<bool>(out);
}

}  // namespace ggmc::memory
