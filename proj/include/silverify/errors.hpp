#pragma once

#include <stdexcept>
#include <string>

namespace silverify {

// Raised when an algorithm cannot meet its accuracy contract (quadrature
// failing to converge, impossible conditioning in the simulator). Invalid
// caller input is reported as std::domain_error instead.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace silverify
