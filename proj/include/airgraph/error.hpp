/* Copyright 2026 The airgraph Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace airgraph {

// Base for every error raised by the library. The CLI maps subclasses to
// exit codes: ConfigError -> 2, DataError -> 3, TrainingAborted -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  enum class Kind {
    kMissingFile,
    kChecksumMismatch,
    kHeaderInconsistency,
    kValidation,
    kVersionMismatch,
  };

  DataError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class TrainingAborted : public Error {
 public:
  using Error::Error;
};

}  // namespace airgraph
