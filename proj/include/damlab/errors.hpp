/*
 * Copyright 2026 the damlab authors
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

namespace damlab {

/// Infeasible or inconsistent parameters (maps to exit code 2).
struct ParamError : std::runtime_error {
    explicit ParamError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller broke an operation contract (unsorted input, duplicate keys, ...).
struct ContractError : std::logic_error {
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

/// A simulated algorithm touched a record that is not resident, or overflowed
/// internal memory. This is a hard error, not a silent eviction.
struct ResidencyError : std::logic_error {
    explicit ResidencyError(const std::string& msg) : std::logic_error(msg) {}
};

/// File or stream problem (maps to exit code 4).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An algorithm's output disagreed with its brute-force oracle (exit code 3).
struct OracleError : std::runtime_error {
    explicit OracleError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace damlab
