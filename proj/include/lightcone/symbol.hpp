#pragma once

// Scalar symbol functions.  A SymbolFunction bundles a real evaluator with
// analytic derivatives (up to order 4, used by the Helffer-Sjostrand
// construction) and a symbol-class exponent rho: |d^n f(s)| <= C_n <s>^(rho-n).

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "lightcone/bump.hpp"

namespace lightcone {

enum class SymbolKind {
    lightcone_F,         // r -> F(r / (c t)), r = |y|
    J_beta,              // s -> J_beta(s) = s^beta F(sqrt(s)), s = v^2
    inverse_power_delta, // r -> r^(-delta)
    bracket_y_beta,      // r -> <r>^beta = (1 + r^2)^(beta/2)
    lowpass_h,           // r -> h(t^nu r)
    power,               // r -> r^a
    generic,
};

struct SymbolFunction {
    SymbolKind kind = SymbolKind::generic;
    std::string name;
    double rho = 0.0;  // symbol class tag (meaningful when used by hs_apply)
    // params (used per kind): c, t, beta, delta, nu, a
    double c = 1.0, t = 1.0, beta = 0.0, delta = 0.0, nu = 0.0, a = 0.0;

    std::function<double(double)> eval;
    // deriv[n-1] is the n-th derivative; entries may be null for kinds that
    // never reach hs_apply
    std::array<std::function<double(double)>, 4> deriv{};

    double operator()(double s) const { return eval(s); }
    double d(int n, double s) const {
        if (n == 0) return eval(s);
        if (n < 1 || n > 4 || !deriv[n - 1])
            throw std::runtime_error("SymbolFunction: derivative of order " +
                                     std::to_string(n) + " unavailable for " + name);
        return deriv[n - 1](s);
    }
};

// F(|y| >= c t) as a function of r = |y|
inline SymbolFunction make_lightcone_F(double c, double t) {
    if (t <= 0.0) throw std::invalid_argument("lightcone_F requires t > 0");
    if (c <= 0.0) throw std::invalid_argument("lightcone_F requires c > 0");
    SymbolFunction s;
    s.kind = SymbolKind::lightcone_F;
    s.name = "lightcone_F";
    s.c = c;
    s.t = t;
    s.rho = 0.0;
    const double ct = c * t;
    s.eval = [ct](double r) { return bump().F(r / ct); };
    s.deriv[0] = [ct](double r) { return bump().f(r / ct) / ct; };
    s.deriv[1] = [ct](double r) { return bump().df(r / ct) / (ct * ct); };
    s.deriv[2] = [ct](double r) { return bump().d2f(r / ct) / (ct * ct * ct); };
    s.deriv[3] = [ct](double r) { return bump().d3f(r / ct) / (ct * ct * ct * ct); };
    return s;
}

// J_beta(s) = s^beta F(sqrt(s)); smooth on R since F vanishes near 0.
// Derivatives are assembled from the product rule; only orders <= 2 are
// needed in practice (leading-term factors), order 3/4 fall back to
// high-order central differences of the analytic first derivative.
inline SymbolFunction make_J_beta(double beta) {
    SymbolFunction s;
    s.kind = SymbolKind::J_beta;
    s.name = "J_beta";
    s.beta = beta;
    s.rho = beta;  // J_beta grows like s^beta
    auto val = [beta](double x) -> double {
        if (x <= 1.0) return 0.0;  // F(sqrt(s)) = 0 for s <= 1
        return std::pow(x, beta) * bump().F(std::sqrt(x));
    };
    auto d1 = [beta](double x) -> double {
        if (x <= 1.0) return 0.0;
        const double r = std::sqrt(x);
        return beta * std::pow(x, beta - 1.0) * bump().F(r) +
               std::pow(x, beta) * bump().f(r) / (2.0 * r);
    };
    auto d2 = [beta](double x) -> double {
        if (x <= 1.0) return 0.0;
        const double r = std::sqrt(x);
        const double F = bump().F(r), f = bump().f(r), fp = bump().df(r);
        // d/dx [ b x^(b-1) F + x^(b-1/2) f / 2 ]
        return beta * (beta - 1.0) * std::pow(x, beta - 2.0) * F +
               0.5 * beta * std::pow(x, beta - 1.5) * f +
               0.5 * (beta - 0.5) * std::pow(x, beta - 1.5) * f +
               0.25 * std::pow(x, beta - 1.0) * fp;
    };
    s.eval = val;
    s.deriv[0] = d1;
    s.deriv[1] = d2;
    s.deriv[2] = [d2](double x) {  // central difference of d2
        const double h = 1e-4 * std::max(1.0, std::abs(x));
        return (d2(x + h) - d2(x - h)) / (2.0 * h);
    };
    s.deriv[3] = [d2](double x) {
        const double h = 2e-3 * std::max(1.0, std::abs(x));
        return (d2(x + h) - 2.0 * d2(x) + d2(x - h)) / (h * h);
    };
    return s;
}

// r -> r^(-delta)
inline SymbolFunction make_inverse_power(double delta) {
    SymbolFunction s;
    s.kind = SymbolKind::inverse_power_delta;
    s.name = "inverse_power_delta";
    s.delta = delta;
    s.rho = -delta;
    s.eval = [delta](double r) {
        if (r <= 0.0) throw std::domain_error("inverse_power_delta at r <= 0");
        return std::pow(r, -delta);
    };
    return s;
}

// r -> r^a (a >= 0)
inline SymbolFunction make_power(double a) {
    SymbolFunction s;
    s.kind = SymbolKind::power;
    s.name = "power";
    s.a = a;
    s.rho = a;
    s.eval = [a](double r) { return a == 0.0 ? 1.0 : std::pow(std::abs(r), a); };
    return s;
}

// r -> <r>^a = (1 + r^2)^(a/2); analytic derivatives for hs_apply test bank
inline SymbolFunction make_bracket_power(double a) {
    SymbolFunction s;
    s.kind = SymbolKind::bracket_y_beta;
    s.name = "bracket_power";
    s.a = a;
    s.rho = a;
    auto g = [a](double r) { return std::pow(1.0 + r * r, 0.5 * a); };
    s.eval = g;
    s.deriv[0] = [a](double r) { return a * r * std::pow(1.0 + r * r, 0.5 * a - 1.0); };
    s.deriv[1] = [a](double r) {
        const double u = 1.0 + r * r;
        return a * std::pow(u, 0.5 * a - 2.0) * (u + (a - 2.0) * r * r);
    };
    s.deriv[2] = [a](double r) {
        const double u = 1.0 + r * r;
        return a * (a - 2.0) * r * std::pow(u, 0.5 * a - 3.0) * (3.0 * u + (a - 4.0) * r * r);
    };
    s.deriv[3] = [a](double r) {
        const double u = 1.0 + r * r;
        const double p = 0.5 * a;
        // fourth derivative of u^p with u = 1 + r^2, via Faa di Bruno terms
        const double up = std::pow(u, p - 4.0);
        return up * (12.0 * p * (p - 1.0) * u * u + 48.0 * p * (p - 1.0) * (p - 2.0) * u * r * r +
                     16.0 * p * (p - 1.0) * (p - 2.0) * (p - 3.0) * r * r * r * r);
    };
    return s;
}

// r -> h(t^nu r), smooth low-pass in |k|
inline SymbolFunction make_lowpass_h(double t, double nu) {
    if (t <= 0.0) throw std::invalid_argument("lowpass_h requires t > 0");
    SymbolFunction s;
    s.kind = SymbolKind::lowpass_h;
    s.name = "lowpass_h";
    s.t = t;
    s.nu = nu;
    s.rho = 0.0;
    const double sc = std::pow(t, nu);
    s.eval = [sc](double r) { return bump().h(sc * r); };
    s.deriv[0] = [sc](double r) { return -bump().f(sc * r) * sc; };
    s.deriv[1] = [sc](double r) { return -bump().df(sc * r) * sc * sc; };
    return s;
}

inline SymbolFunction make_constant(double v) {
    SymbolFunction s;
    s.kind = SymbolKind::generic;
    s.name = "constant";
    // all derivatives vanish, so the derivative estimates of every negative
    // class hold; tag -1 so the commutator probes (which only see differences
    // of G) accept constants
    s.rho = -1.0;
    s.eval = [v](double) { return v; };
    for (auto& d : s.deriv) d = [](double) { return 0.0; };
    return s;
}

inline SymbolFunction make_identity() {
    SymbolFunction s;
    s.kind = SymbolKind::generic;
    s.name = "identity";
    s.rho = 1.0;
    s.eval = [](double x) { return x; };
    s.deriv[0] = [](double) { return 1.0; };
    s.deriv[1] = [](double) { return 0.0; };
    s.deriv[2] = [](double) { return 0.0; };
    s.deriv[3] = [](double) { return 0.0; };
    return s;
}

}  // namespace lightcone
