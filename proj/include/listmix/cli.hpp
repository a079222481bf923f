#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "listmix/graph.hpp"

namespace listmix {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitUsage = 2 };

/// Runs one invocation; output goes to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "0,1,4-6" -> {0,1,4,5,6}, ascending and deduplicated.
std::vector<Vertex> parse_vertex_set(const std::string& text);

}  // namespace listmix
