/*
 Copyright 2026 The mtsc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef MTSC_ERROR_HPP
#define MTSC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mtsc {

enum class ErrorCode {
    SingularBf,
    BadDimensions,
    InconsistentTrajectory,
    LengthMismatch,
    UnsupportedNormPair,
    Unbounded,
    MaxIterations,
    BadBracket,
    BoundViolated,
    CheckFailed,
    DegenerateOpt,
    ParseError,
    ValidationError,
    IoError,
    InvalidArgument,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mtsc

#endif  // MTSC_ERROR_HPP
