#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cascadefuse {

/// Entry point of the `cascadefuse` tool. `args` excludes the program name.
/// Returns 0 on success, 2 on usage errors and 1 on any other failure; the
/// diagnostic goes to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_command(int argc, char** argv);

}  // namespace cascadefuse
