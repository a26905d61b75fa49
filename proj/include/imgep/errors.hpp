#pragma once

#include <stdexcept>
#include <string>

namespace imgep {

struct DivergentRollout : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroKernel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownFeature : std::invalid_argument {
    explicit UnknownFeature(const std::string& name)
        : std::invalid_argument("unknown constraint feature: " + name), feature(name) {}
    std::string feature;
};

struct InsufficientHistory : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ValidationError : std::invalid_argument {
    ValidationError(std::string field_name, const std::string& message)
        : std::invalid_argument(field_name + ": " + message), field(std::move(field_name)) {}
    std::string field;
};

}  // namespace imgep
