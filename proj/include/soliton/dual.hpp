#pragma once

#include <cmath>

namespace soliton {

// Forward-mode dual number. Evaluating a residual with Dual inputs yields the
// exact directional derivative in the .d slot, which is how the wing solver
// builds its Jacobian.
struct Dual {
    double a = 0.0; // value
    double d = 0.0; // derivative

    Dual() = default;
    Dual(double value) : a(value), d(0.0) {}
    Dual(double value, double deriv) : a(value), d(deriv) {}
};

inline Dual operator+(Dual x, Dual y) { return {x.a + y.a, x.d + y.d}; }
inline Dual operator-(Dual x, Dual y) { return {x.a - y.a, x.d - y.d}; }
inline Dual operator-(Dual x) { return {-x.a, -x.d}; }
inline Dual operator*(Dual x, Dual y) { return {x.a * y.a, x.a * y.d + x.d * y.a}; }
inline Dual operator/(Dual x, Dual y) {
    const double inv = 1.0 / y.a;
    const double v = x.a * inv;
    return {v, (x.d - v * y.d) * inv};
}

inline Dual& operator+=(Dual& x, Dual y) { x = x + y; return x; }
inline Dual& operator-=(Dual& x, Dual y) { x = x - y; return x; }
inline Dual& operator*=(Dual& x, Dual y) { x = x * y; return x; }
inline Dual& operator/=(Dual& x, Dual y) { x = x / y; return x; }

inline bool operator<(Dual x, Dual y) { return x.a < y.a; }
inline bool operator>(Dual x, Dual y) { return x.a > y.a; }

inline Dual sqrt(Dual x) {
    const double s = std::sqrt(x.a);
    return {s, x.d / (2.0 * s)};
}
inline Dual exp(Dual x) {
    const double e = std::exp(x.a);
    return {e, x.d * e};
}
inline Dual log(Dual x) { return {std::log(x.a), x.d / x.a}; }
inline Dual tanh(Dual x) {
    const double t = std::tanh(x.a);
    return {t, x.d * (1.0 - t * t)};
}
inline Dual cosh(Dual x) { return {std::cosh(x.a), x.d * std::sinh(x.a)}; }
inline Dual sinh(Dual x) { return {std::sinh(x.a), x.d * std::cosh(x.a)}; }
inline Dual sin(Dual x) { return {std::sin(x.a), x.d * std::cos(x.a)}; }
inline Dual cos(Dual x) { return {std::cos(x.a), -x.d * std::sin(x.a)}; }
inline Dual atan2(Dual y, Dual x) {
    const double r2 = x.a * x.a + y.a * y.a;
    return {std::atan2(y.a, x.a), (x.a * y.d - y.a * x.d) / r2};
}
inline Dual pow(Dual x, double p) {
    const double v = std::pow(x.a, p);
    return {v, x.d * p * std::pow(x.a, p - 1.0)};
}

inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.a; }

} // namespace soliton
