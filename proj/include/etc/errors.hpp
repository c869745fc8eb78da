#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace etc {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonFinite : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotSymmetric : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Singular : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidGenerator : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Reducible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AbsorbingState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidProbability : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Connected components of the union graph travel with the error.
struct UnionDisconnected : std::runtime_error {
    UnionDisconnected(const std::string& what, std::vector<std::vector<int>> parts)
        : std::runtime_error(what), components(std::move(parts)) {}
    std::vector<std::vector<int>> components;
};

struct InvariantViolation : std::runtime_error {
    InvariantViolation(const std::string& what, std::size_t at_step)
        : std::runtime_error(what), step(at_step) {}
    std::size_t step;
};

}  // namespace etc
