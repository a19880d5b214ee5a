// Copyright 2026 The lqdeep Authors.
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

#ifndef LQDEEP_SRC_PRESETS_H_
#define LQDEEP_SRC_PRESETS_H_

#include <map>
#include <string>

namespace lqdeep::internal {

// Preset name -> JSON text, generated at configure time from presets/*.json.
const std::map<std::string, std::string>& PresetTable();

}  // namespace lqdeep::internal

#endif  // LQDEEP_SRC_PRESETS_H_
