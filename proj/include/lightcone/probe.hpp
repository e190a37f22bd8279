#pragma once

// Propagation observables and estimate-verification logic: cone cutoffs,
// the weighted photon-number observable, decay/growth fits, the Heisenberg
// inequality audit, and weighted interaction-decay norms.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lightcone/fock.hpp"
#include "lightcone/grid.hpp"
#include "lightcone/model.hpp"
#include "lightcone/symbol.hpp"

namespace lightcone {

struct ProbeSpec {
    double c = 1.5;      // test speed, > 1
    double beta = 0.4;   // cone-weight exponent
    double gamma = 0.05; // decay exponent
    double delta = 0.9;  // momentum-weight exponent
    double epsilon = 0.0;  // remainder exponent; 0 selects the mid-range default
    double nu = 0.4;     // low-pass exponent

    double eps() const { return epsilon > 0.0 ? epsilon : (0.5 - 2.0 * gamma) / 2.0; }
    double theta() const { return 2.0 * ((1.0 - 1.0 / c) * beta - gamma); }

    void validate() const {
        if (c <= 1.0) throw std::invalid_argument("ProbeSpec: c must be > 1");
        if (!(0.0 <= beta && beta < delta && delta < 1.0))
            throw std::invalid_argument("ProbeSpec: need 0 <= beta < delta < 1");
        const double cap = std::min((1.0 - 1.0 / c) * beta, (3.0 * delta - 2.0) / 10.0);
        if (!(0.0 <= gamma && gamma < cap))
            throw std::invalid_argument("ProbeSpec: gamma outside the admissible cone region");
        if (!(gamma < std::min(0.5 * (1.0 - 1.0 / c), 0.1)))
            throw std::invalid_argument("ProbeSpec: gamma outside the decay region");
        if (!(theta() > 0.0)) throw std::invalid_argument("ProbeSpec: theta must be > 0");
        const double e = eps();
        if (!(e > 0.0 && e < 0.5 - 2.0 * gamma))
            throw std::invalid_argument("ProbeSpec: epsilon outside (0, 1/2 - 2 gamma)");
    }
};

// largest safe fit time: the cone stays inside the position box with a
// factor-2 margin
inline double fit_window_tmax(const PhotonGrid& grid, double c) {
    double ymax = 0.0;
    for (int m = 0; m < grid.sites(); ++m) ymax = std::max(ymax, grid.y_radius(m));
    return ymax / (2.0 * c);
}

struct ConeMass {
    double smooth = 0.0;  // <dGamma(F(|y|/(ct)))>
    double sharp = 0.0;   // <dGamma(1_{|y| >= ct})>
    bool cone_inside_box = true;
};

namespace probe_detail {

inline SymbolFunction sharp_indicator(double ct) {
    SymbolFunction s;
    s.kind = SymbolKind::generic;
    s.name = "sharp_cone_indicator";
    s.eval = [ct](double r) { return r >= ct ? 1.0 : 0.0; };
    return s;
}

}  // namespace probe_detail

// photon mass outside the cone |y| >= ct for a Fock-space state
inline ConeMass outside_cone_mass(const PhotonGrid& grid, const FockBasis& fock,
                                  const Vector& psi, double c, double t) {
    if (t <= 0.0 || c <= 0.0)
        throw std::invalid_argument("outside_cone_mass: need c > 0 and t > 0");
    ConeMass out;
    double ymax = 0.0;
    for (int m = 0; m < grid.sites(); ++m) ymax = std::max(ymax, grid.y_radius(m));
    out.cone_inside_box = c * t <= ymax;
    const auto Fs = second_quantize(
        fock, operator_function(grid, BasisRep::position, make_lightcone_F(c, t)));
    const auto Sh = second_quantize(
        fock, operator_function(grid, BasisRep::position, probe_detail::sharp_indicator(c * t)));
    out.smooth = psi.dot(Fs.matrix() * psi).real();
    out.sharp = psi.dot(Sh.matrix() * psi).real();
    return out;
}

// full-space variant: particle-site-major layout, Fock minor
inline ConeMass outside_cone_mass_full(const PhotonGrid& grid, const FockBasis& fock,
                                       const Vector& psi_full, double c, double t) {
    const std::size_t F = fock.dim();
    if (psi_full.size() % static_cast<Eigen::Index>(F) != 0)
        throw std::invalid_argument("outside_cone_mass_full: size mismatch");
    const int S = static_cast<int>(psi_full.size() / static_cast<Eigen::Index>(F));
    ConeMass acc;
    const auto Fs = second_quantize(
        fock, operator_function(grid, BasisRep::position, make_lightcone_F(c, t)));
    const auto Sh = second_quantize(
        fock, operator_function(grid, BasisRep::position, probe_detail::sharp_indicator(c * t)));
    double ymax = 0.0;
    for (int m = 0; m < grid.sites(); ++m) ymax = std::max(ymax, grid.y_radius(m));
    acc.cone_inside_box = c * t <= ymax;
    for (int x = 0; x < S; ++x) {
        const Vector blk = psi_full.segment(x * F, F);
        acc.smooth += blk.dot(Fs.matrix() * blk).real();
        acc.sharp += blk.dot(Sh.matrix() * blk).real();
    }
    return acc;
}

// t^{2 gamma} dGamma(J_beta(v^2)) with v = y/(ct)
inline HermitianOperator propagation_observable(const PhotonGrid& grid, const FockBasis& fock,
                                                const ProbeSpec& spec, double t) {
    spec.validate();
    if (t < 1.0) throw std::invalid_argument("propagation_observable: t must be >= 1");
    const SymbolFunction J = make_J_beta(spec.beta);
    const double ct = spec.c * t;
    const double pre = std::pow(t, 2.0 * spec.gamma);
    SymbolFunction s;
    s.kind = SymbolKind::generic;
    s.name = "propagation_weight";
    s.eval = [J, ct, pre](double r) {
        const double v = r / ct;
        return pre * J.eval(v * v);
    };
    return second_quantize(fock, operator_function(grid, BasisRep::position, s));
}

// ---- fitting helpers -------------------------------------------------------

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("least_squares_slope: need >= 2 samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// robust slope: median of pairwise slopes
inline double theil_sen_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("theil_sen_slope: need >= 2 samples");
    std::vector<double> slopes;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            if (x[j] != x[i]) slopes.push_back((y[j] - y[i]) / (x[j] - x[i]));
    if (slopes.empty()) throw std::invalid_argument("theil_sen_slope: degenerate abscissae");
    std::nth_element(slopes.begin(), slopes.begin() + slopes.size() / 2, slopes.end());
    double hi = slopes[slopes.size() / 2];
    if (slopes.size() % 2 == 0) {
        std::nth_element(slopes.begin(), slopes.begin() + slopes.size() / 2 - 1, slopes.end());
        hi = 0.5 * (hi + slopes[slopes.size() / 2 - 1]);
    }
    return hi;
}

struct DecayFit {
    double ls_slope = 0.0;       // d log(mass) / d log(t), trailing half
    double gamma_hat = 0.0;      // -ls_slope / 2
    double scaled_trend = 0.0;   // Theil-Sen slope of t^{2 gamma} mass vs log t
    bool bounded_verdict = false;
    std::size_t window_begin = 0;
};

// decay fit of an outside-cone mass series; gamma is the exponent used for
// the boundedness verdict of t^{2 gamma} * mass
inline DecayFit lightcone_decay_fit(const std::vector<double>& times,
                                    const std::vector<double>& mass, double gamma,
                                    double trend_tol = 0.02) {
    if (times.size() != mass.size())
        throw std::invalid_argument("lightcone_decay_fit: size mismatch");
    if (times.size() < 8) throw std::invalid_argument("lightcone_decay_fit: window too short");
    const std::size_t b = times.size() / 2;  // trailing half
    std::vector<double> lx, ly, sx, sy;
    for (std::size_t i = b; i < times.size(); ++i) {
        if (times[i] <= 0.0 || mass[i] <= 0.0)
            throw std::invalid_argument("lightcone_decay_fit: nonpositive sample in window");
        lx.push_back(std::log(times[i]));
        ly.push_back(std::log(mass[i]));
        sx.push_back(std::log(times[i]));
        sy.push_back(std::pow(times[i], 2.0 * gamma) * mass[i]);
    }
    DecayFit fit;
    fit.window_begin = b;
    fit.ls_slope = least_squares_slope(lx, ly);
    fit.gamma_hat = -0.5 * fit.ls_slope;
    fit.scaled_trend = theil_sen_slope(sx, sy);
    fit.bounded_verdict = fit.scaled_trend <= trend_tol;
    return fit;
}

struct GrowthFit {
    double slope = 0.0;
    double bound = 0.0;  // 2 (1 + delta) / 5
    bool pass = false;
};

// growth fit of <dGamma(|k|^{-delta})> along a trajectory
inline GrowthFit small_momentum_growth(const std::vector<double>& times,
                                       const std::vector<double>& series, double delta,
                                       double slack = 0.1) {
    if (!(delta > -1.0 && delta < 1.5))
        throw std::invalid_argument("small_momentum_growth: delta outside (-1, 3/2)");
    if (times.size() != series.size())
        throw std::invalid_argument("small_momentum_growth: size mismatch");
    if (times.size() < 8) throw std::invalid_argument("small_momentum_growth: window too short");
    const std::size_t b = times.size() / 2;
    std::vector<double> lx, ly;
    for (std::size_t i = b; i < times.size(); ++i) {
        if (times[i] <= 0.0 || series[i] <= 0.0)
            throw std::invalid_argument("small_momentum_growth: nonpositive sample in window");
        lx.push_back(std::log(times[i]));
        ly.push_back(std::log(series[i]));
    }
    GrowthFit fit;
    fit.slope = least_squares_slope(lx, ly);
    fit.bound = 2.0 * (1.0 + delta) / 5.0;
    fit.pass = fit.slope <= fit.bound + slack;
    return fit;
}

struct HeisenbergAudit {
    double c1 = 0.0, c2 = 0.0;      // fitted envelope constants
    double theta = 0.0;
    std::vector<double> l_series;   // L(t) over the post-fit window
    double pass_fraction = 0.0;     // fraction of later L(t) <= slack
};

// audit of the differential inequality: L(t) := <DPhi_t> + (theta/t)<Phi_t>
// - C1 t^{-1-delta+2gamma} <dGamma(|k|^{-delta})> - C2 t^{-1-eps}, with C1, C2
// fitted once on the first quartile of the window.  Report-only: the
// constants are existential, so no hard assertion is made.
inline HeisenbergAudit heisenberg_inequality_audit(
    const std::vector<double>& times, const std::vector<double>& dphi,
    const std::vector<double>& phi, const std::vector<double>& dgamma, const ProbeSpec& spec,
    double slack = 1e-9) {
    spec.validate();
    const std::size_t N = times.size();
    if (dphi.size() != N || phi.size() != N || dgamma.size() != N)
        throw std::invalid_argument("heisenberg_inequality_audit: size mismatch");
    if (N < 8) throw std::invalid_argument("heisenberg_inequality_audit: window too short");

    HeisenbergAudit rep;
    rep.theta = spec.theta();
    auto basis_a = [&](std::size_t i) {
        return std::pow(times[i], -1.0 - spec.delta + 2.0 * spec.gamma) * dgamma[i];
    };
    auto basis_b = [&](std::size_t i) { return std::pow(times[i], -1.0 - spec.eps()); };
    auto lhs = [&](std::size_t i) { return dphi[i] + (rep.theta / times[i]) * phi[i]; };

    // least squares for (C1, C2) on the first quartile, clamped nonnegative
    const std::size_t q = std::max<std::size_t>(2, N / 4);
    double aa = 0, ab = 0, bb = 0, ar = 0, br = 0;
    for (std::size_t i = 0; i < q; ++i) {
        const double a = basis_a(i), b2 = basis_b(i), r = lhs(i);
        aa += a * a;
        ab += a * b2;
        bb += b2 * b2;
        ar += a * r;
        br += b2 * r;
    }
    const double det = aa * bb - ab * ab;
    if (std::abs(det) > 1e-30) {
        rep.c1 = (bb * ar - ab * br) / det;
        rep.c2 = (aa * br - ab * ar) / det;
    }
    if (rep.c1 < 0.0) {
        rep.c1 = 0.0;
        rep.c2 = bb > 0.0 ? std::max(0.0, br / bb) : 0.0;
    } else if (rep.c2 < 0.0) {
        rep.c2 = 0.0;
        rep.c1 = aa > 0.0 ? std::max(0.0, ar / aa) : 0.0;
    }

    std::size_t ok = 0;
    for (std::size_t i = q; i < N; ++i) {
        const double L = lhs(i) - rep.c1 * basis_a(i) - rep.c2 * basis_b(i);
        rep.l_series.push_back(L);
        if (L <= slack) ++ok;
    }
    rep.pass_fraction =
        rep.l_series.empty() ? 0.0 : static_cast<double>(ok) / rep.l_series.size();
    return rep;
}

// ---- weighted interaction decay --------------------------------------------

enum class CouplingVariant { q, gtilde, e };

struct WeightedDecaySeries {
    std::vector<double> times;
    std::vector<double> norms;
    double slope = 0.0;     // log-log fit over the positive samples
    bool zero_tail = false; // cutoff support and cone became disjoint
};

// exact norm ladder of Phi(i F(|v|) w_x) <x>^{-tau1} (H_f + 1)^{-1/2} with
// tau1 = 3/2 + d, for the selected coupling family w
inline WeightedDecaySeries weighted_interaction_decay(const Model& m, CouplingVariant variant,
                                                      double d, double beta, double c,
                                                      const std::vector<double>& times) {
    if (c <= 0.0) throw std::invalid_argument("weighted_interaction_decay: c must be > 0");
    if (variant == CouplingVariant::q) {
        if (!(d >= 0.0 && d < 0.5))
            throw std::invalid_argument("weighted_interaction_decay: q variant needs d < 1/2");
    } else {
        if (!(d >= 0.0 && d < 1.5 - 2.0 * beta))
            throw std::invalid_argument(
                "weighted_interaction_decay: variant needs d < 3/2 - 2 beta");
    }
    const double tau1 = 1.5 + d;
    const std::size_t F = m.fock.dim();
    const int S = m.particle.sites();
    const std::size_t D = m.dim();

    // (H_f + 1)^{-1/2} is diagonal on the Fock basis
    Eigen::VectorXd hf = free_field_hamiltonian(m.fock).matrix().diagonal().real();
    Eigen::VectorXd reg(F);
    for (std::size_t f = 0; f < F; ++f) reg[f] = 1.0 / std::sqrt(hf[f] + 1.0);

    WeightedDecaySeries out;
    out.times = times;
    for (double t : times) {
        if (t < 1.0) throw std::invalid_argument("weighted_interaction_decay: t must be >= 1");
        const Matrix Fv =
            operator_function(m.photon, BasisRep::position, make_lightcone_F(c, t)).matrix();
        Matrix B = Matrix::Zero(D, D);
        for (int x = 0; x < S; ++x) {
            const Vector& w = variant == CouplingVariant::q
                                  ? m.couplings.q[x]
                                  : (variant == CouplingVariant::e ? m.couplings.e[x]
                                                                   : m.couplings.gtilde[x][0]);
            const Vector fw = cplx(0.0, 1.0) * (Fv * w);
            const double xw = std::pow(1.0 + std::pow(m.particle.x_radius(x), 2.0), -0.5 * tau1);
            Matrix blk = field_operator(m.fock, fw).matrix() * xw;
            for (std::size_t col = 0; col < F; ++col) blk.col(col) *= reg[col];
            B.block(x * F, x * F, F, F) = blk;
        }
        out.norms.push_back(spectral_norm(B));
    }

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (out.norms[i] > 1e-14) {
            lx.push_back(std::log(times[i]));
            ly.push_back(std::log(out.norms[i]));
        } else {
            out.zero_tail = true;
        }
    }
    if (lx.size() >= 2) out.slope = least_squares_slope(lx, ly);
    return out;
}

}  // namespace lightcone
