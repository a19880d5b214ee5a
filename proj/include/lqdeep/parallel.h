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

///////////////////////////////////////////////////////////////////////////////
//
// Static-partition parallel loop. Each index writes only its own output slot;
// callers reduce the slots afterwards in index order, so results do not
// depend on the thread count.
//
// The worker count comes from LQDEEP_NUM_THREADS (default: hardware
// concurrency, at least 1).
//
///////////////////////////////////////////////////////////////////////////////

#ifndef LQDEEP_PARALLEL_H_
#define LQDEEP_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace lqdeep {

inline constexpr const char* kThreadCountVariable = "LQDEEP_NUM_THREADS";

int WorkerCount();

// Calls body(i) for i in [0, count). The first exception thrown by any body
// is rethrown on the calling thread after all workers have joined.
void ParallelFor(std::size_t count,
                 const std::function<void(std::size_t)>& body);

}  // namespace lqdeep

#endif  // LQDEEP_PARALLEL_H_
