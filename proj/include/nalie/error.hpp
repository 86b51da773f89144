#pragma once

#include <stdexcept>
#include <string>

namespace nalie {

/// Malformed input: bad shape, out-of-range index, unknown key.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Well-formed input violating a mathematical precondition
/// (degenerate form, division by zero, non-closed form, ...).
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// A self-check inside an algorithm failed.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace nalie
