/*
 * Copyright 2026 The MQFL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MQFL_ERRORS_H_
#define MQFL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace mqfl {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (shape, domain, scale, level).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Invalid scheme or ring parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// More data than a container can hold.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// No modulus left to drop.
class LevelExhausted : public Error {
 public:
  using Error::Error;
};

// Bad user-provided data (empty datasets, short sequences, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration; `field` names the offending entry when known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, std::string field = "")
      : Error(message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Federated protocol rule broken (manifest mismatch, missing client, ...).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Decrypted data failed a sanity check.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized bytes. `reason` lets callers tell failure modes apart.
class ParseError : public Error {
 public:
  enum class Reason {
    kTruncated,
    kBadMagic,
    kBadVersion,
    kBadChecksum,
    kUnknownKind,
    kTooLarge,
    kContextMismatch,
    kMalformed,
  };
  ParseError(Reason reason, const std::string& message)
      : Error(message), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

// Transport failure (peer closed, timeout, refused connection).
class TransportError : public Error {
 public:
  enum class Reason { kClosed, kTimeout, kConnect, kIo };
  TransportError(Reason reason, const std::string& message)
      : Error(message), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

// A computation has no well-defined answer for the given input.
class UndefinedResult : public Error {
 public:
  using Error::Error;
};

}  // namespace mqfl

#endif  // MQFL_ERRORS_H_
