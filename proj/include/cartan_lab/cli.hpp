#pragma once

#include <string>
#include <vector>

namespace cartan_lab::cli {

// Full command-line entry point. Exit status: 0 when every asserted invariant holds,
// 1 on invariant failure or runtime error, 2 on invalid input, schema or usage errors.
int main(int argc, const char* const* argv);

// Same, with args excluding the program name.
int main(const std::vector<std::string>& args);

} // namespace cartan_lab::cli
