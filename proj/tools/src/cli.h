// Copyright 2026 The OOS-ASE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OOS_ASE_TOOLS_CLI_H_
#define OOS_ASE_TOOLS_CLI_H_

#include <ostream>

namespace oos_ase::cli {

// Entry point of the oos_ase command. Returns the process exit code:
// 0 success, 2 configuration, 3 numerical degeneracy, 4 solver, 5 I/O.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oos_ase::cli

#endif  // OOS_ASE_TOOLS_CLI_H_
