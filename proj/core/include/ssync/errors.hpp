#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ssync {

// Raised when user data violates a documented input contract (e.g. a symbol
// outside the declared alphabet).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a bit stream is not a well-formed encoding.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(const std::string& what, uint64_t bit_offset)
      : std::runtime_error(what + " at bit " + std::to_string(bit_offset)),
        offset_(bit_offset) {}
  uint64_t offset() const noexcept { return offset_; }

 private:
  uint64_t offset_;
};

// Raised for malformed containers on disk.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ssync
