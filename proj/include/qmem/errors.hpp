// Copyright 2026 The qmem Authors
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

#ifndef QMEM_ERRORS_HPP
#define QMEM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qmem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside its allowed range.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A loss channel removes both polarizations (or the whole input state).
class DegenerateChannelError : public Error {
  public:
    using Error::Error;
};

/// Tagged outcomes refer to settings that do not exist.
class ConsistencyError : public Error {
  public:
    using Error::Error;
};

class InsufficientDataError : public Error {
  public:
    using Error::Error;
};

/// CHSH input does not contain the four canonical settings exactly once.
class SettingsMismatchError : public Error {
  public:
    using Error::Error;
};

class FitError : public Error {
  public:
    using Error::Error;
};

/// The simulation could not reach its event target within the trial cap.
class ProgressError : public Error {
  public:
    using Error::Error;
};

/// Configuration text is malformed, names an unknown key, or violates a range.
class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace qmem

#endif  // QMEM_ERRORS_HPP
