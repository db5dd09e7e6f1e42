// Copyright 2026 The qreal Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qreal {

enum class ErrorKind {
    NotHermitian,
    NotSquare,
    NotUnitary,
    NotProjection,
    NotNormalized,
    NotOrthonormalInput,
    DimMismatch,
    EmptyFamily,
    UnmappedEigenvalue,
    UnboundObservable,
    InvalidArgument,
    Parse,
    Io,
};

constexpr std::string_view error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotHermitian:
            return "NotHermitian";
        case ErrorKind::NotSquare:
            return "NotSquare";
        case ErrorKind::NotUnitary:
            return "NotUnitary";
        case ErrorKind::NotProjection:
            return "NotProjection";
        case ErrorKind::NotNormalized:
            return "NotNormalized";
        case ErrorKind::NotOrthonormalInput:
            return "NotOrthonormalInput";
        case ErrorKind::DimMismatch:
            return "DimMismatch";
        case ErrorKind::EmptyFamily:
            return "EmptyFamily";
        case ErrorKind::UnmappedEigenvalue:
            return "UnmappedEigenvalue";
        case ErrorKind::UnboundObservable:
            return "UnboundObservable";
        case ErrorKind::InvalidArgument:
            return "InvalidArgument";
        case ErrorKind::Parse:
            return "ParseError";
        case ErrorKind::Io:
            return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {
    }

    ErrorKind kind() const noexcept {
        return kind_;
    }

   private:
    ErrorKind kind_;
};

}  // namespace qreal
