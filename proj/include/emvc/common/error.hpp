// Copyright 2026 The emvc Authors
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

#ifndef EMVC__COMMON__ERROR_HPP_
#define EMVC__COMMON__ERROR_HPP_

#include <stdexcept>
#include <string>

namespace emvc
{

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Tensor or parameter dimensions do not conform.
class ShapeError : public Error
{
public:
  using Error::Error;
};

// A value violates an operation's precondition (range, sign, enum).
class ValueError : public Error
{
public:
  using Error::Error;
};

// NaN or Inf produced by a forward or backward pass.
class NumericError : public Error
{
public:
  using Error::Error;
};

// Malformed or truncated file contents (checkpoint, shard, manifest, image).
class FormatError : public Error
{
public:
  using Error::Error;
};

class IoError : public Error
{
public:
  using Error::Error;
};

// Invalid or unknown configuration keys/values.
class ConfigError : public Error
{
public:
  using Error::Error;
};

}  // namespace emvc

#endif  // EMVC__COMMON__ERROR_HPP_
