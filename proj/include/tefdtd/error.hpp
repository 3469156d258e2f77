#pragma once

#include <stdexcept>
#include <string>

namespace tefdtd {

enum class ErrorKind {
    config,    // invalid configuration file or scenario description
    material,  // non-physical material values (eps/mu <= 0, sigma < 0, ...)
    state,     // field state inconsistent with the grid it claims to match
    argument,  // bad call arguments (sizes, ranges)
    diagnostic // runtime detection (divergence, failed convergence)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace tefdtd
