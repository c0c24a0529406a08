#pragma once

#include "snaploc/field.hpp"
#include "snaploc/spacetime.hpp"

namespace snaploc {

/// Closed-form optimal triple with an interior layer of width eps at t = 1/2:
///   y = sin(pi x) atan((t - 1/2) / eps),  p = sin(pi x) sin(pi t),  u = -p / alpha,
/// with f and y_d chosen so that y_t - nu y_xx = f + u and -p_t - nu p_xx = y - y_d.
class ManufacturedProblem {
public:
    ManufacturedProblem(double eps, double alpha = 1.0, double nu = 1.0);

    double eps() const { return eps_; }
    double alpha() const { return alpha_; }
    double nu() const { return nu_; }

    double state(double x, double t) const;
    double adjoint(double x, double t) const;
    double control(double x, double t) const;
    double forcing(double x, double t) const;
    double desired(double x, double t) const;
    double initial(double x) const;

    Field state_field() const;
    Field adjoint_field() const;
    Field forcing_field() const;  ///< with dt and dxdt
    Field desired_field() const;
    Profile initial_profile() const;

    /// Data for the space-time reformulation.
    SpaceTimeData spacetime_data() const;

private:
    // Time factors; every function here is sin(pi x) times one of them.
    double layer(double t) const;         // atan((t - 1/2) / eps)
    double layer_dt(double t) const;      // eps / (eps^2 + (t - 1/2)^2)
    double layer_dtt(double t) const;
    double forcing_time(double t) const;
    double forcing_time_dt(double t) const;
    double desired_time(double t) const;
    double desired_time_dt(double t) const;

    double eps_;
    double alpha_;
    double nu_;
};

}  // namespace snaploc
