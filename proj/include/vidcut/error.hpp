#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vidcut {

// Bad or inconsistent user input. The CLI maps this family to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed file contents; carries the byte offset where decoding stopped.
class FormatError : public InputError {
public:
    FormatError(const std::string& what, std::size_t offset)
        : InputError(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class TruncationError : public FormatError {
public:
    TruncationError(const std::string& what, std::size_t offset) : FormatError(what, offset) {}
};

// A broken internal guarantee (energy mismatch, inconsistent partition, ...).
// The CLI maps this to exit code 3.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace vidcut
