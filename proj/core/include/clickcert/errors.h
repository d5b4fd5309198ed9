// Copyright 2026 The clickcert Authors
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

#ifndef CLICKCERT_ERRORS_H
#define CLICKCERT_ERRORS_H

#include <stdexcept>
#include <string>

namespace clickcert {

/// A parameter or configuration violated a documented precondition.
class InvalidParameter : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// A dataset, partition string or config could not be parsed.
class ParseError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace clickcert

#endif
