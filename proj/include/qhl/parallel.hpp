// Copyright 2026 The QHL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QHL_PARALLEL_HPP
#define QHL_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace qhl {

/// QHL_THREADS if set and positive, otherwise std::thread::hardware_concurrency().
unsigned default_threads();

/// Calls body(begin, end) over a static partition of [0, count). Work
/// assignment depends only on `count` and `threads`; callers write results
/// by index so the outcome is independent of scheduling.
void parallel_for(size_t count, unsigned threads, const std::function<void(size_t, size_t)> &body);

}  // namespace qhl

#endif  // QHL_PARALLEL_HPP
