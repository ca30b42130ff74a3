#ifndef NETMY_CLI_HPP
#define NETMY_CLI_HPP

#include "netmy/benchmark.hpp"

namespace netmy {

/// Entry point behind the `netmy` binary; exposed so tests can drive the
/// command surface directly. Exit codes: 0 success, 1 runtime failure,
/// 2 usage error.
int cli_main(int argc, const char* const* argv);

/// Applies the fields present in j on top of `base` (partial overrides).
SolveOptions solve_options_from_json(const nlohmann::json& j, SolveOptions base);

}  // namespace netmy

#endif
