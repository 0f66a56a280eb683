/* Copyright 2026 The airgraph Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// The `airgraph` command-line interface, callable in-process.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace airgraph::cli {

// args[0] is the program name. Returns the process exit code: 0 on success,
// 2 for configuration errors and missing inputs, 3 for invalid data, 4 when
// training aborts.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace airgraph::cli
