// Copyright 2026 The CondSafe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONDSAFE_ERRORS_H_
#define CONDSAFE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace condsafe {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// A `!=` appeared where only conjunctions are allowed (transition relations).
class DisequalityNotAllowedHere : public Error {
 public:
  using Error::Error;
};

class IncompleteValuation : public Error {
 public:
  using Error::Error;
};

class EmptyConjunction : public Error {
 public:
  using Error::Error;
};

class UnknownLocation : public Error {
 public:
  using Error::Error;
};

class EncoderError : public Error {
 public:
  using Error::Error;
};

class ModelIncomplete : public Error {
 public:
  using Error::Error;
};

// The solver process died, could not be started, or stopped answering.
class BackendError : public Error {
 public:
  using Error::Error;
};

// The solver answered with something we could not interpret.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// A synthesized invariant failed re-validation. Always a bug.
class InternalSoundnessError : public Error {
 public:
  using Error::Error;
};

}  // namespace condsafe

#endif  // CONDSAFE_ERRORS_H_
