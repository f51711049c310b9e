#pragma once

#include <algorithm>
#include <cmath>

#include "saddleflow/core.hpp"

namespace saddleflow::detail {

// Dormand-Prince 5(4) for autonomous systems y' = f(y).
struct RkResult {
    Vector y;    // fifth-order solution
    Vector err;  // difference to the embedded fourth-order solution
    Vector f_end;
};

template <class F>
RkResult dopri5_step(F&& f, const Vector& y, const Vector& k1, double h) {
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                     b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    const Vector k2 = f(Vector(y + h * a21 * k1));
    const Vector k3 = f(Vector(y + h * (a31 * k1 + a32 * k2)));
    const Vector k4 = f(Vector(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const Vector k5 = f(Vector(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const Vector k6 = f(Vector(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    RkResult out;
    out.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    out.f_end = f(out.y);
    out.err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * out.f_end);
    return out;
}

inline double error_norm(const Vector& err, const Vector& y0, const Vector& y1, double abs_tol,
                         double rel_tol) {
    double worst = 0.0;
    for (Index i = 0; i < err.size(); ++i) {
        const double sc = abs_tol + rel_tol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        worst = std::max(worst, std::abs(err(i)) / sc);
    }
    return worst;
}

// PI step-size controller (Gustafsson), exponents for a fifth-order method.
class PiController {
public:
    double accept(double err) {
        const double e = std::max(err, 1e-10);
        double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(prev_, 0.4 / 5.0);
        fac = std::clamp(fac, 0.2, reject_last_ ? 1.0 : 10.0);
        prev_ = std::max(e, 1e-4);
        reject_last_ = false;
        return fac;
    }
    double reject(double err) {
        reject_last_ = true;
        return std::max(0.2, 0.9 * std::pow(err, -1.0 / 5.0));
    }

private:
    double prev_ = 1e-4;
    bool reject_last_ = false;
};

}  // namespace saddleflow::detail
