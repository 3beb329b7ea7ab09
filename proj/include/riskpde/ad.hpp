#pragma once

// Forward-mode scalar with two seeded first-derivative directions (x and T)
// and the pure second derivative in x. One pass through a function of (x, T)
// yields exactly the quantities a convection-diffusion residual needs:
// value, d/dx, d/dT, d2/dx2. No cross term d2/dxdT is carried.

#include <cmath>

namespace riskpde {

struct HyperDual {
    double val = 0.0;
    double dx = 0.0;
    double dt = 0.0;
    double dxx = 0.0;

    static HyperDual var_x(double v) { return {v, 1.0, 0.0, 0.0}; }
    static HyperDual var_t(double v) { return {v, 0.0, 1.0, 0.0}; }
    static HyperDual constant(double v) { return {v, 0.0, 0.0, 0.0}; }

    HyperDual& operator+=(const HyperDual& o) {
        val += o.val;
        dx += o.dx;
        dt += o.dt;
        dxx += o.dxx;
        return *this;
    }
    HyperDual& operator-=(const HyperDual& o) {
        val -= o.val;
        dx -= o.dx;
        dt -= o.dt;
        dxx -= o.dxx;
        return *this;
    }
};

inline HyperDual operator+(HyperDual a, const HyperDual& b) { return a += b; }
inline HyperDual operator-(HyperDual a, const HyperDual& b) { return a -= b; }
inline HyperDual operator-(const HyperDual& a) { return {-a.val, -a.dx, -a.dt, -a.dxx}; }

inline HyperDual operator*(const HyperDual& a, const HyperDual& b) {
    // Leibniz; second derivative picks up the 2*a'*b' cross term.
    return {a.val * b.val,
            a.dx * b.val + a.val * b.dx,
            a.dt * b.val + a.val * b.dt,
            a.dxx * b.val + 2.0 * a.dx * b.dx + a.val * b.dxx};
}

inline HyperDual operator*(double c, const HyperDual& a) {
    return {c * a.val, c * a.dx, c * a.dt, c * a.dxx};
}
inline HyperDual operator*(const HyperDual& a, double c) { return c * a; }
inline HyperDual operator+(const HyperDual& a, double c) {
    return {a.val + c, a.dx, a.dt, a.dxx};
}
inline HyperDual operator+(double c, const HyperDual& a) { return a + c; }
inline HyperDual operator-(const HyperDual& a, double c) { return a + (-c); }
inline HyperDual operator-(double c, const HyperDual& a) { return (-a) + c; }

// Composition with a scalar map f: chain rule
//   f(u)' = f'(u) u', f(u)'' = f'(u) u'' + f''(u) (u')^2.
inline HyperDual compose(const HyperDual& u, double f, double fp, double fpp) {
    return {f, fp * u.dx, fp * u.dt, fp * u.dxx + fpp * u.dx * u.dx};
}

inline HyperDual tanh(const HyperDual& u) {
    const double t = std::tanh(u.val);
    const double s = 1.0 - t * t;
    return compose(u, t, s, -2.0 * t * s);
}

inline HyperDual exp(const HyperDual& u) {
    const double e = std::exp(u.val);
    return compose(u, e, e, e);
}

inline HyperDual reciprocal(const HyperDual& u) {
    const double r = 1.0 / u.val;
    return compose(u, r, -r * r, 2.0 * r * r * r);
}

inline HyperDual operator/(const HyperDual& a, const HyperDual& b) {
    return a * reciprocal(b);
}
inline HyperDual operator/(const HyperDual& a, double c) { return a * (1.0 / c); }
inline HyperDual operator/(double c, const HyperDual& a) { return c * reciprocal(a); }

} // namespace riskpde
