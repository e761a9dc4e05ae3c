#pragma once

#include <stdexcept>
#include <string>

namespace pdag {

/// Malformed or inconsistent input (bad indices, dimension mismatch, parse failure).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure such as a singular normalizer matrix.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No candidate node had a usable overdispersion score.
class OrderingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cross-validation could not fit any fold.
class TuningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure inside one stage of the end-to-end learner; the message is prefixed with the stage name.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage_name, const std::string& detail)
        : std::runtime_error(stage_name + ": " + detail), stage(std::move(stage_name))
    {
    }

    std::string stage;
};

} // namespace pdag
