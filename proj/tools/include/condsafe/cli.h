// Copyright 2026 The CondSafe Authors
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

#ifndef CONDSAFE_CLI_H_
#define CONDSAFE_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace condsafe::cli {

// Exit codes of `run`.
inline constexpr int kAllSafe = 0;
inline constexpr int kSomeMaybe = 1;
inline constexpr int kUsageError = 2;
inline constexpr int kBackendError = 3;

// Entry point of the `condsafe` driver. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace condsafe::cli

#endif  // CONDSAFE_CLI_H_
