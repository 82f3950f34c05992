#pragma once

#include <cstddef>
#include <string>

namespace cascadefuse {

// Warnings go to stderr unless silenced; the counter lets tests observe them.
void warn(const std::string& message);
void set_warnings_enabled(bool enabled);
std::size_t warning_count();

}  // namespace cascadefuse
