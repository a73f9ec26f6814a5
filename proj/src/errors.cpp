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

#include "qhl/errors.hpp"

namespace qhl {

std::string_view error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonHermitianInput: return "NonHermitianInput";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NonSquareLength: return "NonSquareLength";
        case ErrorKind::StrengthOutOfRange: return "StrengthOutOfRange";
        case ErrorKind::EmptySchedule: return "EmptySchedule";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ChannelValidation: return "ChannelValidation";
        case ErrorKind::InvalidDesign: return "InvalidDesign";
        case ErrorKind::ZeroEvidence: return "ZeroEvidence";
        case ErrorKind::DegenerateCloud: return "DegenerateCloud";
        case ErrorKind::SingularCovariance: return "SingularCovariance";
        case ErrorKind::NonPositiveLoss: return "NonPositiveLoss";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

ParseError::ParseError(const std::string &message, size_t line, size_t column)
    : Error(ErrorKind::ParseError,
            message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

}  // namespace qhl
