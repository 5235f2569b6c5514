/*
 * Copyright 2026 The rowfetch Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace rowfetch {

/// Input files or config values that cannot be parsed or violate a type invariant.
class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The cost model cannot be evaluated or fitted on the given data
/// (rank-deficient design, too few samples, mixed record counts).
class model_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rowfetch
