#pragma once

#include <array>
#include <cmath>

namespace pspectral {

using State2 = std::array<double, 2>;

struct StepResult {
    State2 y;    // 5th order solution at t + h
    State2 err;  // embedded 5(4) error estimate
    State2 k7;   // f(t + h, y), reusable as k1 of the next step (FSAL)
};

/// One Dormand-Prince 5(4) step for a 2-component system.
/// k1 = f(t, y) is supplied by the caller (FSAL reuse).
template <typename F>
StepResult dopri5_step(F&& f, double t, const State2& y, const State2& k1, double h) {
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

    State2 y2 = {y[0] + h * a21 * k1[0], y[1] + h * a21 * k1[1]};
    State2 k2 = f(t + c2 * h, y2);
    State2 y3 = {y[0] + h * (a31 * k1[0] + a32 * k2[0]), y[1] + h * (a31 * k1[1] + a32 * k2[1])};
    State2 k3 = f(t + c3 * h, y3);
    State2 y4 = {y[0] + h * (a41 * k1[0] + a42 * k2[0] + a43 * k3[0]),
                 y[1] + h * (a41 * k1[1] + a42 * k2[1] + a43 * k3[1])};
    State2 k4 = f(t + c4 * h, y4);
    State2 y5 = {y[0] + h * (a51 * k1[0] + a52 * k2[0] + a53 * k3[0] + a54 * k4[0]),
                 y[1] + h * (a51 * k1[1] + a52 * k2[1] + a53 * k3[1] + a54 * k4[1])};
    State2 k5 = f(t + c5 * h, y5);
    State2 y6 = {y[0] + h * (a61 * k1[0] + a62 * k2[0] + a63 * k3[0] + a64 * k4[0] + a65 * k5[0]),
                 y[1] + h * (a61 * k1[1] + a62 * k2[1] + a63 * k3[1] + a64 * k4[1] + a65 * k5[1])};
    State2 k6 = f(t + h, y6);
    State2 ynew = {y[0] + h * (b1 * k1[0] + b3 * k3[0] + b4 * k4[0] + b5 * k5[0] + b6 * k6[0]),
                   y[1] + h * (b1 * k1[1] + b3 * k3[1] + b4 * k4[1] + b5 * k5[1] + b6 * k6[1])};
    State2 k7 = f(t + h, ynew);
    State2 err = {
        h * (e1 * k1[0] + e3 * k3[0] + e4 * k4[0] + e5 * k5[0] + e6 * k6[0] + e7 * k7[0]),
        h * (e1 * k1[1] + e3 * k3[1] + e4 * k4[1] + e5 * k5[1] + e6 * k6[1] + e7 * k7[1])};
    return {ynew, err, k7};
}

} // namespace pspectral
