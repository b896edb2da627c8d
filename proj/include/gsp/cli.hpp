#pragma once

namespace gsp {

// Batch front-end. Exit codes: 0 ok, 1 verification suite found failures,
// 2 configuration/validation error, 3 inapplicable-math precondition.
int run_cli(int argc, const char* const* argv);

}  // namespace gsp
