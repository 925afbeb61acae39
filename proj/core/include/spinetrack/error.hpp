#pragma once

#include <stdexcept>
#include <string>

namespace spinetrack {

/// Thrown on invalid input data or violated construction invariants.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spinetrack
