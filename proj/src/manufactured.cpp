#include "snaploc/manufactured.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace snaploc {

namespace {

constexpr double kPi = std::numbers::pi;

double shape(double x) { return std::sin(kPi * x); }
double shape_dx(double x) { return kPi * std::cos(kPi * x); }

Field separable(std::function<double(double)> time, std::function<double(double)> time_dt) {
    Field f;
    f.value = [time](double x, double t) { return shape(x) * time(t); };
    f.dx = [time](double x, double t) { return shape_dx(x) * time(t); };
    if (time_dt) {
        f.dt = [time_dt](double x, double t) { return shape(x) * time_dt(t); };
        f.dxdt = [time_dt](double x, double t) { return shape_dx(x) * time_dt(t); };
    }
    return f;
}

}  // namespace

ManufacturedProblem::ManufacturedProblem(double eps, double alpha, double nu)
    : eps_(eps), alpha_(alpha), nu_(nu) {
    if (!(eps > 0.0)) throw std::invalid_argument("ManufacturedProblem: eps must be > 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("ManufacturedProblem: alpha must be > 0");
    if (!(nu > 0.0)) throw std::invalid_argument("ManufacturedProblem: nu must be > 0");
}

double ManufacturedProblem::layer(double t) const { return std::atan((t - 0.5) / eps_); }

double ManufacturedProblem::layer_dt(double t) const {
    const double s = t - 0.5;
    return eps_ / (eps_ * eps_ + s * s);
}

double ManufacturedProblem::layer_dtt(double t) const {
    const double s = t - 0.5;
    const double d = eps_ * eps_ + s * s;
    return -2.0 * eps_ * s / (d * d);
}

double ManufacturedProblem::forcing_time(double t) const {
    return layer_dt(t) + nu_ * kPi * kPi * layer(t) + std::sin(kPi * t) / alpha_;
}

double ManufacturedProblem::forcing_time_dt(double t) const {
    return layer_dtt(t) + nu_ * kPi * kPi * layer_dt(t) + kPi * std::cos(kPi * t) / alpha_;
}

double ManufacturedProblem::desired_time(double t) const {
    return layer(t) + kPi * std::cos(kPi * t) - nu_ * kPi * kPi * std::sin(kPi * t);
}

double ManufacturedProblem::desired_time_dt(double t) const {
    return layer_dt(t) - kPi * kPi * std::sin(kPi * t) - nu_ * kPi * kPi * kPi * std::cos(kPi * t);
}

double ManufacturedProblem::state(double x, double t) const { return shape(x) * layer(t); }
double ManufacturedProblem::adjoint(double x, double t) const { return shape(x) * std::sin(kPi * t); }
double ManufacturedProblem::control(double x, double t) const { return -adjoint(x, t) / alpha_; }
double ManufacturedProblem::forcing(double x, double t) const { return shape(x) * forcing_time(t); }
double ManufacturedProblem::desired(double x, double t) const { return shape(x) * desired_time(t); }
double ManufacturedProblem::initial(double x) const { return shape(x) * layer(0.0); }

Field ManufacturedProblem::state_field() const {
    return separable([this](double t) { return layer(t); }, [this](double t) { return layer_dt(t); });
}

Field ManufacturedProblem::adjoint_field() const {
    return separable([](double t) { return std::sin(kPi * t); },
                     [](double t) { return kPi * std::cos(kPi * t); });
}

Field ManufacturedProblem::forcing_field() const {
    return separable([this](double t) { return forcing_time(t); },
                     [this](double t) { return forcing_time_dt(t); });
}

Field ManufacturedProblem::desired_field() const {
    return separable([this](double t) { return desired_time(t); },
                     [this](double t) { return desired_time_dt(t); });
}

Profile ManufacturedProblem::initial_profile() const {
    const double a = layer(0.0);
    return Profile{[a](double x) { return a * shape(x); }, [a](double x) { return a * shape_dx(x); }};
}

SpaceTimeData ManufacturedProblem::spacetime_data() const {
    return SpaceTimeData{desired_field(), forcing_field(), initial_profile()};
}

}  // namespace snaploc
