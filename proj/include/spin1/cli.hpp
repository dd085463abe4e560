#pragma once

namespace spin1 {

// Exit codes: 0 success, 1 usage error, 2 numerical failure.
int cli_main(int argc, char** argv);

}  // namespace spin1
