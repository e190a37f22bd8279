#pragma once

// Functional calculus via the Helffer-Sjostrand formula,
//   G(A) = (1/pi) int dbar(Gtilde)(z) (A - z)^-1 d Re z d Im z ,
// with a Taylor almost-analytic extension of order 3 cut off in the region
// |Im z| <= C <Re z>, and quadrature on a dyadic rectangle subdivision.
// Also the commutator decompositions of [G(v^2), i|k|] used by the
// propagation-observable estimates.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "lightcone/grid.hpp"
#include "lightcone/operators.hpp"
#include "lightcone/symbol.hpp"

namespace lightcone {

namespace hs_detail {

// dbar of the order-3 almost-analytic extension at z = x + iy, y != 0
inline cplx dbar_extension(const SymbolFunction& G, double x, double y, double width) {
    const double bx = std::sqrt(1.0 + x * x);  // <x>
    const double u = y / (width * bx);
    const double au = std::abs(u);
    if (au >= 2.0) return 0.0;
    const double chi = bump().h(au);
    const double chi_p = -bump().f(au) * (u >= 0.0 ? 1.0 : -1.0);

    const cplx iy(0.0, y);
    cplx taylor = 0.0, pw = 1.0;
    double fact = 1.0;
    for (int n = 0; n <= 3; ++n) {
        const double gn = (n == 0) ? G.eval(x) : G.d(n, x);
        taylor += gn * pw / fact;
        pw *= iy;
        fact *= (n + 1);
    }
    // remainder term: chi * G''''(x) (iy)^3 / 3!
    const cplx rem = chi * G.d(4, x) * iy * iy * iy / 6.0;
    // cutoff term: (du/dx + i du/dy) chi'(u) * taylor
    const double dudx = -y * x / (width * bx * bx * bx);
    const double dudy = 1.0 / (width * bx);
    const cplx cut = cplx(dudx, dudy) * chi_p * taylor;
    return 0.5 * (rem + cut);
}

struct Panel {
    double x0, x1;
};

}  // namespace hs_detail

// Quadrature approximation of G(A) for a Hermitian A and a symbol G of class
// rho < 0.  Accuracy improves with quadrature_depth (both the subdivision of
// the spectral core and the extent of the dyadic tail grow with it).
inline HermitianOperator hs_apply(const HermitianOperator& A, const SymbolFunction& G,
                                  int quadrature_depth) {
    if (G.rho >= 0.0)
        throw std::invalid_argument("hs_apply: symbol class rho must be negative");
    if (quadrature_depth < 1) throw std::invalid_argument("hs_apply: depth must be >= 1");
    const int n = static_cast<int>(A.dim());
    const Matrix& M = A.matrix();

    Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();

    const double width = 1.0;  // support |Im z| <= 2 <Re z> after the chi cutoff

    // x panels: uniform subdivision of the spectral core plus dyadic tails
    std::vector<hs_detail::Panel> panels;
    const double a = lo - 2.0, b = hi + 2.0;
    const int ncore = 1 << quadrature_depth;
    for (int i = 0; i < ncore; ++i)
        panels.push_back({a + (b - a) * i / ncore, a + (b - a) * (i + 1) / ncore});
    // tails must reach far out for slowly decaying symbols: the omitted region
    // beyond X contributes ~ X^rho, so push X to ~2^(depth + 24)
    double step = 2.0;
    for (int j = 0; j < quadrature_depth + 24; ++j) {
        panels.push_back({b + step, b + 2.0 * step});
        panels.push_back({a - 2.0 * step, a - step});
        // fill the gap panels [b, b+2] and [a-2, a] once
        if (j == 0) {
            panels.push_back({b, b + 2.0});
            panels.push_back({a - 2.0, a});
        }
        step *= 2.0;
    }

    const auto& gl = detail::gl64();
    const int gl_n = 16;  // use a 16-point subset stride of the 64-node rule
    // 16-point Gauss-Legendre nodes, generated from the same recurrence
    static const auto gl16 = [] {
        std::array<std::array<double, 16>, 2> nw{};
        const int m = 16;
        for (int i = 0; i < m; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (m + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int j = 2; j <= m; ++j) {
                    double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m * (t * p1 - p0) / (t * t - 1.0);
                double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            nw[0][i] = t;
            nw[1][i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
        return nw;
    }();
    (void)gl;

    Matrix acc = Matrix::Zero(n, n);
    const Matrix I = Matrix::Identity(n, n);

    for (const auto& p : panels) {
        const double xm = 0.5 * (p.x0 + p.x1), xh = 0.5 * (p.x1 - p.x0);
        for (int ix = 0; ix < gl_n; ++ix) {
            const double x = xm + xh * gl16[0][ix];
            const double wx = xh * gl16[1][ix];
            const double ymax = 2.0 * width * std::sqrt(1.0 + x * x);
            // geometric y panels from ymax down; integrand vanishes like y^2 at 0
            double ytop = ymax;
            for (int iy = 0; iy <= quadrature_depth + 4; ++iy) {
                const double ybot = (iy == quadrature_depth + 4) ? 0.0 : 0.5 * ytop;
                const double ym = 0.5 * (ytop + ybot), yh = 0.5 * (ytop - ybot);
                for (int jy = 0; jy < gl_n; ++jy) {
                    const double y = ym + yh * gl16[0][jy];
                    const double wy = yh * gl16[1][jy];
                    const cplx db = hs_detail::dbar_extension(G, x, y, width);
                    if (db == cplx(0.0, 0.0)) continue;
                    const Matrix R = (M - cplx(x, y) * I).partialPivLu().solve(I);
                    acc.noalias() += (wx * wy) * (db * R);
                }
                ytop = ybot;
                if (ytop == 0.0) break;
            }
        }
    }
    // y < 0 half-plane is the conjugate-transpose contribution
    Matrix total = (acc + acc.adjoint()) / M_PI;
    return HermitianOperator::from_hermitian(std::move(total), A.domain());
}

// ---------------------------------------------------------------------------
// One-photon kinematic factors on a grid at cone parameters (c, t)

struct ConeKinematics {
    Matrix v2;                    // (|y| / ct)^2, momentum basis
    std::vector<Matrix> v;        // components v_i = y_i / (ct)
    std::vector<Matrix> khat;     // components k_i / |k| (diagonal)
    Matrix abs_k;                 // |k| diagonal
    Matrix v_dot_khat_sym;        // v . khat + khat . v
};

inline ConeKinematics cone_kinematics(const PhotonGrid& grid, double c, double t) {
    const int n = grid.one_photon_dim();
    ConeKinematics K;
    const Matrix U = grid.dft_matrix();
    K.v.resize(grid.dim());
    K.khat.resize(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) {
        Eigen::VectorXd ydiag(n), kdiag(n);
        for (int m = 0; m < grid.sites(); ++m)
            for (int l = 0; l < grid.polarizations(); ++l) {
                ydiag[grid.index(m, l)] = grid.y_point(m)[a] / (c * t);
                kdiag[grid.index(m, l)] = grid.k_point(m)[a] / grid.omega(m);
            }
        K.v[a] = U.adjoint() * ydiag.cast<cplx>().asDiagonal() * U;
        K.khat[a] = kdiag.cast<cplx>().asDiagonal();
    }
    Eigen::VectorXd wdiag(n);
    for (int m = 0; m < grid.sites(); ++m)
        for (int l = 0; l < grid.polarizations(); ++l)
            wdiag[grid.index(m, l)] = grid.omega(m);
    K.abs_k = wdiag.cast<cplx>().asDiagonal();

    K.v2 = Matrix::Zero(n, n);
    K.v_dot_khat_sym = Matrix::Zero(n, n);
    for (int a = 0; a < grid.dim(); ++a) {
        K.v2 += K.v[a] * K.v[a];
        K.v_dot_khat_sym += K.v[a] * K.khat[a] + K.khat[a] * K.v[a];
    }
    return K;
}

// Diagonal (position-representation) realization of G(v^2) on the grid.
inline Matrix function_of_v2(const PhotonGrid& grid, const SymbolFunction& G, double c, double t) {
    SymbolFunction wrap;
    wrap.kind = SymbolKind::generic;
    wrap.name = G.name + "(v^2)";
    const double ct = c * t;
    auto inner = G.eval;
    wrap.eval = [inner, ct](double r) { return inner((r / ct) * (r / ct)); };
    return operator_function(grid, BasisRep::position, wrap).matrix();
}

struct CommutatorDecomposition {
    HermitianOperator leading;   // symmetrized (G')^(1/2) (v.khat + khat.v) (G')^(1/2) / (ct)
    double residual_norm;        // || |k|^(d/2) R |k|^(d/2) ||
};

// R := [G(v^2), i|k|] - (1/(ct)) G'(v^2)(v.khat + khat.v), exact on the
// truncated one-photon space.
inline CommutatorDecomposition commutator_decomposition_residual(const PhotonGrid& grid,
                                                                 const SymbolFunction& G,
                                                                 double t, double delta,
                                                                 double c) {
    if (t < 1.0) throw std::invalid_argument("commutator_decomposition: t must be >= 1");
    const double lower = std::max(1.0 + 2.0 * G.rho, 0.0);
    if (!(delta > lower && delta <= 1.0))
        throw std::invalid_argument("commutator_decomposition: delta outside lemma hypotheses");

    const auto K = cone_kinematics(grid, c, t);
    const Matrix Gv2 = function_of_v2(grid, G, c, t);

    SymbolFunction Gp;  // derivative of G as a symbol
    Gp.kind = SymbolKind::generic;
    Gp.name = G.name + "'";
    Gp.eval = [&G](double s) { return G.d(1, s); };
    const Matrix Gpv2 = function_of_v2(grid, Gp, c, t);

    const cplx iu(0.0, 1.0);
    const Matrix comm = Gv2 * (iu * K.abs_k) - (iu * K.abs_k) * Gv2;
    const Matrix lead = Gpv2 * K.v_dot_khat_sym / (c * t);
    const Matrix R = comm - lead;

    const int n = static_cast<int>(R.rows());
    Eigen::VectorXd w(n);
    for (int m = 0; m < grid.sites(); ++m)
        for (int l = 0; l < grid.polarizations(); ++l)
            w[grid.index(m, l)] = std::pow(grid.omega(m), 0.5 * delta);
    const Matrix weighted = w.cast<cplx>().asDiagonal() * R * w.cast<cplx>().asDiagonal();

    // symmetrized leading form (Lemma 2.2 variant); requires G' >= 0 on the
    // sampled diagonal, which holds for the J_beta family
    SymbolFunction Gps;
    Gps.kind = SymbolKind::generic;
    Gps.name = G.name + "'^(1/2)";
    Gps.eval = [&G](double s) { return std::sqrt(std::max(G.d(1, s), 0.0)); };
    const Matrix Gph = function_of_v2(grid, Gps, c, t);
    Matrix sym_lead = Gph * K.v_dot_khat_sym * Gph / (c * t);

    CommutatorDecomposition out;
    out.leading = HermitianOperator::from_hermitian(std::move(sym_lead), "one_photon");
    out.residual_norm = spectral_norm(weighted);
    return out;
}

// || |k|^(d/2) [G(v^2), y.khat + khat.y] |k|^(d/2) ||  (Lemma 5.1 quantity)
inline double commutator_51_norm(const PhotonGrid& grid, const SymbolFunction& G, double t,
                                 double delta, double c) {
    const double lower = std::max(1.0 + 2.0 * G.rho, 0.0);
    if (!(delta > lower && delta <= 1.0))
        throw std::invalid_argument("commutator_51_norm: delta outside lemma hypotheses");
    const auto K = cone_kinematics(grid, c, t);
    const Matrix Gv2 = function_of_v2(grid, G, c, t);
    // y.khat + khat.y = ct (v.khat + khat.v)
    const Matrix y_sym = (c * t) * K.v_dot_khat_sym;
    const Matrix comm = Gv2 * y_sym - y_sym * Gv2;
    const int n = static_cast<int>(comm.rows());
    Eigen::VectorXd w(n);
    for (int m = 0; m < grid.sites(); ++m)
        for (int l = 0; l < grid.polarizations(); ++l)
            w[grid.index(m, l)] = std::pow(grid.omega(m), 0.5 * delta);
    const Matrix weighted = w.cast<cplx>().asDiagonal() * comm * w.cast<cplx>().asDiagonal();
    return spectral_norm(weighted);
}

}  // namespace lightcone
