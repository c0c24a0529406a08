#pragma once

#include <functional>

namespace snaploc {

using SpaceTimeFunction = std::function<double(double x, double t)>;

/// Closed-form space-time function with the partial derivatives the
/// discretizations need. `dt` and `dxdt` may be left empty when unused.
struct Field {
    SpaceTimeFunction value;
    SpaceTimeFunction dx;
    SpaceTimeFunction dt;
    SpaceTimeFunction dxdt;
};

/// Closed-form function of x with its derivative.
struct Profile {
    std::function<double(double)> value;
    std::function<double(double)> dx;
};

}  // namespace snaploc
