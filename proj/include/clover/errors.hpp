// Copyright 2026 The Clover Authors
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

namespace clover {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Register layouts that cannot be combined or do not match an operation.
class LayoutError : public Error {
   public:
    using Error::Error;
};

/// Input violates a documented precondition (non-Hermitian, unnormalized, mixed where pure is needed...).
class PreconditionError : public Error {
   public:
    using Error::Error;
};

/// An operation would need a dense matrix above the dense dimension cap.
class DenseCapError : public Error {
   public:
    using Error::Error;
};

/// A protocol uses more quantum communication than its declared budget.
class BudgetError : public Error {
   public:
    using Error::Error;
};

/// Malformed state, protocol or report files.
class FormatError : public Error {
   public:
    using Error::Error;
};

}  // namespace clover
