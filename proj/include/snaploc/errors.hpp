#pragma once

#include <stdexcept>
#include <string>

namespace snaploc {

/// A factorization or eigensolve failed; signals a non-SPD assembly.
class NumericalBreakdown : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Error raised by one stage of the experiment pipeline, tagged with the stage name.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& message)
        : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

}  // namespace snaploc
