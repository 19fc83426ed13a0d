#pragma once

#include <string>
#include <vector>

namespace crad::cli {

/// Entry point of the `crad` tool. Returns the process exit status.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace crad::cli
