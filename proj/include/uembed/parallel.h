// Copyright 2026 The uembed Authors.
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

#ifndef UEMBED_PARALLEL_H_
#define UEMBED_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace uembed {

// Worker count: UEMBED_THREADS if set and positive, else the hardware count.
unsigned thread_count();

// Overrides the worker count for this process (0 restores the default).
void set_thread_count(unsigned n);

// Runs fn(begin, end) over [0, n) split into contiguous ranges of at most
// `grain` items. Ranges are fixed by (n, grain) alone, so results written per
// index do not depend on the number of workers. The first exception thrown
// by any range is rethrown.
void parallel_ranges(size_t n, size_t grain, const std::function<void(size_t, size_t)>& fn);

// Convenience form calling fn(i) for each index.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace uembed

#endif  // UEMBED_PARALLEL_H_
