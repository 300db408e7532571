#pragma once

#include <string>
#include <vector>

namespace glassbox {

// Dispatches argv to the subcommands {ingest, train, eval, explain-shap,
// explain-lime, global-importance, surrogate, sp-lime, audit, reproduce}.
// Exit codes: 0 success, 2 validation or usage error, 3 I/O error.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace glassbox
