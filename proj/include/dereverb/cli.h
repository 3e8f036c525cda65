// include/dereverb/cli.h

// Copyright 2026  Dereverb Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DEREVERB_CLI_H_
#define DEREVERB_CLI_H_

#include <string>
#include <vector>

namespace dereverb {

// Command-line entry point.  args includes the program name.  Returns 0 on
// success, 1 on usage errors, 2 on processing errors; warnings go to
// stderr and machine-readable outputs to the files named by flags.
int cli_run(const std::vector<std::string> &args);

}  // namespace dereverb

#endif  // DEREVERB_CLI_H_
