// Copyright 2026 The edgenas Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace edgenas {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor shapes do not line up for the requested operation.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A row id, segment id or graph endpoint lies outside its valid range.
class IndexError : public Error {
public:
    using Error::Error;
};

/// A non-finite value was produced while validation mode was on, or a loss diverged.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Malformed on-disk data (JSONL datasets, genotypes, checkpoints).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent user configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Dataset contents violate a precondition (empty split, width mismatch, ...).
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace edgenas
