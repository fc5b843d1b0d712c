// Copyright 2026 The qmerkle Authors
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

#ifndef QMT_ERROR_H
#define QMT_ERROR_H

#include <stdexcept>
#include <string>

namespace qmt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: shapes, non-unitary matrices, instance schema violations.
class ValidationError : public Error {
   public:
    using Error::Error;
};

/// A configured capacity (qubit cap, dense oracle cap) would be exceeded.
class ResourceError : public Error {
   public:
    using Error::Error;
};

/// API misuse such as dead or duplicate qubit labels.
class UsageError : public Error {
   public:
    using Error::Error;
};

/// A party acted on registers it does not hold, or a message was incomplete.
class ProtocolViolation : public Error {
   public:
    using Error::Error;
};

/// Two numerical routes that must agree did not.
class NumericalError : public Error {
   public:
    using Error::Error;
};

}  // namespace qmt

#endif  // QMT_ERROR_H
