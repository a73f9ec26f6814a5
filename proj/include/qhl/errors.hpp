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

#ifndef QHL_ERRORS_HPP
#define QHL_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace qhl {

enum class ErrorKind {
    NonHermitianInput,
    DimensionMismatch,
    NonSquareLength,
    StrengthOutOfRange,
    EmptySchedule,
    ParseError,
    ChannelValidation,
    InvalidDesign,
    ZeroEvidence,
    DegenerateCloud,
    SingularCovariance,
    NonPositiveLoss,
    InvalidConfig,
    IoError,
};

std::string_view error_kind_name(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

   private:
    ErrorKind kind_;
};

/// Parse failures additionally report where they happened (1-based).
class ParseError : public Error {
   public:
    ParseError(const std::string &message, size_t line, size_t column);

    size_t line() const noexcept { return line_; }
    size_t column() const noexcept { return column_; }

   private:
    size_t line_;
    size_t column_;
};

}  // namespace qhl

#endif  // QHL_ERRORS_HPP
