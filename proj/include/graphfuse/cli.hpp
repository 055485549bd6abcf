// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end.
//
//   graphfuse train    --train F --valid F --out DIR [settings]
//   graphfuse eval     --checkpoint F --test F [--out DIR]
//   graphfuse predict  --checkpoint F --input F [--output F] [--batch-size N]
//   graphfuse generate --task copy|window|relational --out DIR [--seed N]
//   graphfuse ablate   [--task relational] [--seeds 1,2,3] --out DIR [settings]
//
// Settings: --preset, --config, --variant, --seed, --epochs, --lr,
// --batch-size, --max-len, --heads, --hidden.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace graphfuse {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,    // unexpected internal error
  kExitUsage = 2,      // bad flags, unreadable or invalid data, config errors
  kExitNumerical = 3,  // divergence or other numerical failure
};

/// `args` excludes the program name. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace graphfuse
