#pragma once

// Smooth compactly supported profile functions used throughout:
//   f    : C0-infinity bump on (1,2), normalized so that its integral is 1
//   F(s) : cumulative integral of f; 0 on (-inf,1], 1 on [2,inf)
//   h(s) : 1 - F(s); smooth decreasing low-pass profile, 1 on [0,1], 0 on [2,inf)
//   phi  : odd non-decreasing saturation profile, phi(r) = r on |r| <= 1/2,
//          |phi(r)| = 1 on |r| >= 1
// All evaluators are smooth to machine precision (no table interpolation).

#include <array>
#include <cmath>
#include <cstddef>

namespace lightcone {

namespace detail {

// Nodes/weights of 64-point Gauss-Legendre on [-1,1], generated once by
// Newton iteration on the Legendre recurrence.
struct GaussLegendre64 {
    std::array<double, 64> x{};
    std::array<double, 64> w{};

    GaussLegendre64() {
        const int n = 64;
        for (int i = 0; i < n / 2; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int j = 2; j <= n; ++j) {
                    double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (t * p1 - p0) / (t * t - 1.0);
                double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            double ww = 2.0 / ((1.0 - t * t) * dp * dp);
            x[i] = -t;
            w[i] = ww;
            x[n - 1 - i] = t;
            w[n - 1 - i] = ww;
        }
    }
};

inline const GaussLegendre64& gl64() {
    static const GaussLegendre64 g;
    return g;
}

template <class Fn>
double integrate(Fn&& fn, double a, double b) {
    if (b <= a) return 0.0;
    const auto& g = gl64();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < 64; ++i) s += g.w[i] * fn(mid + half * g.x[i]);
    return s * half;
}

}  // namespace detail

// The un-normalized bump exp(-1/((tau-1)(2-tau))) on (1,2) and its first
// three derivatives, computed analytically through r = 1/w, w = (tau-1)(2-tau).
class Bump {
  public:
    Bump() {
        norm_ = 1.0;
        norm_ = 1.0 / detail::integrate([this](double t) { return f(t); }, 1.0, 2.0);
        // integral of F over [1,2], needed by the phi construction
        int_F_ = detail::integrate([this](double t) { return F(t); }, 1.0, 2.0);
    }

    // f and derivatives
    double f(double tau) const {
        if (tau <= 1.0 || tau >= 2.0) return 0.0;
        return norm_ * std::exp(-rinv(tau));
    }
    double df(double tau) const {
        if (tau <= 1.0 || tau >= 2.0) return 0.0;
        auto [r, r1, r2, r3] = rders(tau);
        (void)r2;
        (void)r3;
        return -r1 * f(tau);
    }
    double d2f(double tau) const {
        if (tau <= 1.0 || tau >= 2.0) return 0.0;
        auto [r, r1, r2, r3] = rders(tau);
        (void)r3;
        (void)r;
        return (-r2 + r1 * r1) * f(tau);
    }
    double d3f(double tau) const {
        if (tau <= 1.0 || tau >= 2.0) return 0.0;
        auto [r, r1, r2, r3] = rders(tau);
        (void)r;
        return (-r3 + 3.0 * r1 * r2 - r1 * r1 * r1) * f(tau);
    }

    // F(s) = int_{-inf}^{s} f; plateau value is exactly 1
    double F(double s) const {
        if (s <= 1.0) return 0.0;
        if (s >= 2.0) return 1.0;
        // clamp quadrature rounding so F stays a cumulative profile in [0,1]
        return std::min(1.0, detail::integrate([this](double t) { return f(t); }, 1.0, s));
    }
    double dF(double s) const { return f(s); }

    // h(s) = 1 - F(s): smooth decreasing, 1 on [0,1], 0 on [2,inf)
    double h(double s) const { return 1.0 - F(s); }

    double int_F() const { return int_F_; }  // int_1^2 F(u) du

  private:
    double norm_ = 1.0;
    double int_F_ = 0.0;

    static double rinv(double tau) {
        const double w = (tau - 1.0) * (2.0 - tau);
        return 1.0 / w;
    }
    // r = 1/w and its first three derivatives
    static std::array<double, 4> rders(double tau) {
        const double w = (tau - 1.0) * (2.0 - tau);
        const double w1 = 3.0 - 2.0 * tau;
        const double w2 = -2.0;
        const double r = 1.0 / w;
        const double r1 = -w1 * r * r;
        const double r2 = -w2 * r * r - 2.0 * w1 * r * r1;
        const double r3 = -3.0 * w2 * r * r1 - 2.0 * w1 * (r1 * r1 + r * r2);
        return {r, r1, r2, r3};
    }
};

inline const Bump& bump() {
    static const Bump b;
    return b;
}

// Odd saturation profile: phi(r) = int_0^r m(s) ds with m even, m = 1 on
// [0,1/2] and supported in (-1,1).  On (1/2,1) the slope is a smooth step
// down to zero plus a compensating bump chosen so that phi(1) = 1 exactly.
class PhiProfile {
  public:
    PhiProfile() {
        const Bump& b = bump();
        // S0 = area of the bare step 1 - F(1 + 2(s - 1/2)) over s in [1/2,1]
        const double S0 = 0.5 * (1.0 - b.int_F());
        comp_ = 1.0 - 2.0 * S0;  // > 0
    }

    // slope m(s), even in s
    double slope(double s) const {
        const double a = std::abs(s);
        if (a <= 0.5) return 1.0;
        if (a >= 1.0) return 0.0;
        const Bump& b = bump();
        const double u = 1.0 + 2.0 * (a - 0.5);  // in (1,2)
        // clamp: quadrature rounding can push 1 - F below zero by ~1e-16
        return std::max(0.0, (1.0 - b.F(u)) + comp_ * b.f(u));
    }

    double operator()(double r) const {
        const double a = std::abs(r);
        double val;
        if (a <= 0.5) {
            val = a;
        } else if (a >= 1.0) {
            val = 1.0;
        } else {
            val = 0.5 + detail::integrate([this](double s) { return slope(s); }, 0.5, a);
        }
        return r >= 0.0 ? val : -val;
    }

    // phi'(r) = m(r)
    double derivative(double r) const { return slope(r); }

  private:
    double comp_ = 0.0;
};

inline const PhiProfile& phi_profile() {
    static const PhiProfile p;
    return p;
}

}  // namespace lightcone
