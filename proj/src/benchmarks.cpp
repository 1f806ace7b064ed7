#include "ddc/benchmarks.hpp"

namespace ddc::benchmarks {

StatePlant batch_reactor() {
    StatePlant plant;
    plant.A.resize(4, 4);
    plant.A << 1.38, -0.2077, 6.715, -5.676,
               -0.5814, -4.29, 0.0, 0.675,
               1.067, 4.273, -6.654, 5.893,
               0.048, 4.273, 1.343, -2.104;
    plant.B.resize(4, 2);
    plant.B << 0.0, 0.0,
               5.679, 0.0,
               1.136, -3.146,
               1.136, 0.0;
    return plant;
}

Vector reactor_reference_x0() {
    Vector x0(4);
    x0 << 0.311, -0.6576, 0.4121, -0.9363;
    return x0;
}

SignalSpec reactor_input() {
    SignalSpec spec;
    spec.channels.resize(2);
    for (double w : {1.0, 3.0, 5.0, 7.0}) spec.channels[0].terms.push_back({1.0, w, 0.0});
    for (double w : {2.0, 4.0, 6.0, 8.0}) spec.channels[1].terms.push_back({1.0, w, 0.0});
    return spec;
}

StateFilterParams reactor_filter() { return {1.0, 1.0}; }

Matrix reactor_published_gain() {
    Matrix k(2, 6);
    k << -1.507, -18.69, 0.155, -0.681, 2.925, 0.79,
         17.45, 0.224, 44.06, -36.37, 1.09, -3.518;
    return k;
}

ComplexVector reactor_published_closed_loop_eigs() {
    ComplexVector eigs(6);
    eigs << std::complex<double>(-5.107, 10.729), std::complex<double>(-5.107, -10.729),
        std::complex<double>(-1.238, 0.0), std::complex<double>(-1.024, 9.654),
        std::complex<double>(-1.024, -9.654), std::complex<double>(-0.759, 0.0);
    return eigs;
}

ComplexVector reactor_open_loop_eigs() {
    ComplexVector eigs(4);
    eigs << std::complex<double>(-8.67, 0.0), std::complex<double>(-5.06, 0.0),
        std::complex<double>(0.0635, 0.0), std::complex<double>(1.99, 0.0);
    return eigs;
}

OutputPlant nonmin_phase_plant() {
    Vector num(2), den(4);
    num << -1.0, 1.0;              // s - 1
    den << 0.0, 4.0, 0.0, 1.0;     // s^3 + 4 s
    return plant_from_transfer_function(num, den);
}

Vector siso_reference_x0() {
    Vector x0(3);
    x0 << -3.9223, 4.0631, 3.7965;
    return x0;
}

SignalSpec siso_input() {
    SignalSpec spec;
    spec.channels.resize(1);
    for (double w : {1.0, 2.5, 4.0, 5.5}) spec.channels[0].terms.push_back({1.0, w, 0.0});
    return spec;
}

OutputFilterParams siso_filter() {
    OutputFilterParams params;
    params.lambdas.resize(3);
    params.lambdas << 1.0, 2.0, 3.0;
    params.gammas.resize(3);
    params.gammas << 1.0, 2.0, 3.0;
    return params;
}

Matrix siso_published_gain() {
    Matrix k(1, 6);
    k << -0.508, 3.208, -2.392, 0.001, -0.577, 1.055;
    return k;
}

ComplexVector siso_published_closed_loop_eigs() {
    ComplexVector eigs(6);
    eigs << std::complex<double>(-2.028, 0.0), std::complex<double>(-0.723, 0.647),
        std::complex<double>(-0.723, -0.647), std::complex<double>(-0.22, 0.0),
        std::complex<double>(-0.147, 2.09), std::complex<double>(-0.147, -2.09);
    return eigs;
}

Vector siso_reference_theta1() {
    Vector t(3);
    t << 2.5, -8.0, 6.5;
    return t;
}

Vector siso_reference_theta2() {
    Vector t(3);
    t << -1.0, 1.5, -2.0 / 3.0;
    return t;
}

}  // namespace ddc::benchmarks
