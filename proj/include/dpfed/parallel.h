/*
 * Copyright 2026 The dpfed Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DPFED_PARALLEL_H_
#define DPFED_PARALLEL_H_

#include <cstdint>
#include <functional>

namespace dpfed {

// Calls fn(i) for i in [0, n) on up to `workers` threads. fn must only write
// to slots owned by index i; callers reduce afterwards in index order, which
// keeps results independent of the worker count.
void ParallelFor(int64_t n, int workers, const std::function<void(int64_t)>& fn);

}  // namespace dpfed

#endif  // DPFED_PARALLEL_H_
