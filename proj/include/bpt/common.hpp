#pragma once

#include <stdexcept>
#include <string>

namespace bpt {

// Input violates an operation's preconditions (bad dimensions, ranges, ...).
using InvalidArgument = std::invalid_argument;

// A serialized file or byte stream does not match the expected layout.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solver hit its iteration cap; carries the last estimate so
// callers can inspect near-degenerate cases.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_estimate)
        : std::runtime_error(what), last_estimate_(last_estimate) {}

    double last_estimate() const { return last_estimate_; }

private:
    double last_estimate_;
};

}  // namespace bpt
