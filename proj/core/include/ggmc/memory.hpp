#pragma once

#include <cstddef>

namespace ggmc::memory {

// Resident set size of this process, from /proc/self/status. 0 if unknown.
std::size_t current_rss_bytes();
std::size_t peak_rss_bytes();

// Resets the kernel's peak-RSS counter so later peaks are measured from now.
// Returns false where the kernel does not support it.
bool reset_peak_rss();

}  // namespace ggmc::memory
