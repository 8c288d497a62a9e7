#pragma once

#include <stdexcept>
#include <string>

namespace kpe {

// Input failed a structural invariant (norm, hermiticity, trace, PSD, file format).
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Request exceeds a dense-representation or combinatorial size guard.
class cap_error : public std::runtime_error {
public:
    explicit cap_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kpe
