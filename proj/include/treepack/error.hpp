#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace treepack {

/// Malformed or out-of-contract input supplied by the caller.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The request is well-formed but exceeds a configured computational limit
/// (exhaustive enumeration sizes, search budgets).
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a host edge is removed twice, i.e. an edge collision reached
/// the host graph unrepaired.
class DoubleUseError : public std::runtime_error {
public:
    DoubleUseError(int u, int v)
        : std::runtime_error("host edge {" + std::to_string(u) + "," + std::to_string(v) +
                             "} is absent (double use)"),
          pair_(u, v)
    {
    }

    std::pair<int, int> pair() const { return pair_; }

private:
    std::pair<int, int> pair_;
};

/// Broken internal invariant; indicates a bug rather than bad input.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace treepack
