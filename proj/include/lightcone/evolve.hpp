#pragma once

// Time evolution e^{-itH} via an adaptive Lanczos (Krylov) propagator, plus
// expectation values and Heisenberg derivatives along trajectories.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lightcone/operators.hpp"

namespace lightcone {

struct PropagatorStats {
    int max_krylov_dim = 0;
    int step_halvings = 0;
    int invariant_breakdowns = 0;  // Krylov subspace closed early (exact step)
    long matvecs = 0;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<Vector> states;  // one per time (optionally thinned by caller)
    std::map<std::string, std::vector<double>> observables;
    std::vector<double> energy_series;
    std::vector<double> norm_series;
    PropagatorStats stats;
};

namespace evolve_detail {

// one Lanczos step of e^{-i dt H} v with error control; halves dt recursively
// when the cap-40 Krylov space cannot meet tol
inline Vector lanczos_step(const Matrix& H, const Vector& v, double dt, double tol,
                           PropagatorStats& stats, int depth = 0) {
    if (depth > 30) throw std::runtime_error("propagate: step-size underflow");
    const int cap = 40;
    const Eigen::Index n = v.size();
    const int m_max = static_cast<int>(std::min<Eigen::Index>(cap, n));

    std::vector<Vector> V;
    std::vector<double> alpha, beta;  // T diagonal / off-diagonal
    V.push_back(v / v.norm());

    auto small_exp = [&](int m) -> Vector {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        Vector phases(m);
        for (int i = 0; i < m; ++i)
            phases[i] = std::exp(cplx(0.0, -dt * es.eigenvalues()[i]));
        Eigen::VectorXd e1 = Eigen::VectorXd::Zero(m);
        e1[0] = 1.0;
        return es.eigenvectors().cast<cplx>() *
               (phases.array() * (es.eigenvectors().transpose() * e1).cast<cplx>().array())
                   .matrix();
    };

    for (int j = 0; j < m_max; ++j) {
        Vector w = H * V[j];
        ++stats.matvecs;
        alpha.push_back((V[j].dot(w)).real());
        w -= alpha[j] * V[j];
        if (j > 0) w -= beta[j - 1] * V[j - 1];
        // full reorthogonalization (dims are small, robustness first)
        for (const auto& u : V) w -= u.dot(w) * u;
        const double b = w.norm();
        const int m = j + 1;
        Vector y = small_exp(m);
        // standard Lanczos exponential residual estimate
        const double err = b * std::abs(y[m - 1]) * std::abs(dt);
        if (b < 1e-14) {
            // invariant subspace: the small problem is exact
            ++stats.invariant_breakdowns;
            stats.max_krylov_dim = std::max(stats.max_krylov_dim, m);
            Vector out = Vector::Zero(n);
            for (int i = 0; i < m; ++i) out += y[i] * V[i];
            return out * v.norm();
        }
        if (err < tol || m == m_max) {
            if (err < tol) {
                stats.max_krylov_dim = std::max(stats.max_krylov_dim, m);
                Vector out = Vector::Zero(n);
                for (int i = 0; i < m; ++i) out += y[i] * V[i];
                return out * v.norm();
            }
            break;  // cap reached without meeting tol -> halve the step
        }
        beta.push_back(b);
        V.push_back(w / b);
    }
    ++stats.step_halvings;
    Vector half = lanczos_step(H, v, dt / 2.0, tol / 2.0, stats, depth + 1);
    return lanczos_step(H, half, dt / 2.0, tol / 2.0, stats, depth + 1);
}

}  // namespace evolve_detail

// e^{-itH} v with per-application error estimate below tol
inline Vector expm_apply(const HermitianOperator& H, const Vector& v, double t, double tol,
                         PropagatorStats* stats = nullptr) {
    if (v.size() != static_cast<Eigen::Index>(H.dim()))
        throw std::invalid_argument("expm_apply: dimension mismatch");
    if (t == 0.0) return v;
    PropagatorStats local;
    PropagatorStats& st = stats ? *stats : local;
    return evolve_detail::lanczos_step(H.matrix(), v, t, tol, st);
}

// real expectation value with a guard on the imaginary residual
inline double expectation(const HermitianOperator& op, const Vector& psi) {
    if (psi.size() != static_cast<Eigen::Index>(op.dim()))
        throw std::invalid_argument("expectation: basis mismatch");
    const cplx val = psi.dot(op.matrix() * psi);
    const double scale = std::max(1.0, std::abs(val));
    if (std::abs(val.imag()) > 1e-12 * scale)
        throw std::runtime_error("expectation: imaginary residual above tolerance");
    return val.real();
}

// named observables evaluated along the trajectory
using ObservableMap = std::map<std::string, const HermitianOperator*>;

inline TrajectoryRecord propagate(const HermitianOperator& H, const Vector& psi0,
                                  const std::vector<double>& times, double tol,
                                  const ObservableMap& observables = {}) {
    if (times.empty()) throw std::invalid_argument("propagate: empty time grid");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw std::invalid_argument("propagate: times must be strictly increasing");
    if (std::abs(psi0.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("propagate: initial state must be normalized");

    TrajectoryRecord rec;
    rec.times = times;
    Vector psi = psi0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0) psi = expm_apply(H, psi, times[i] - times[i - 1], tol, &rec.stats);
        rec.states.push_back(psi);
        rec.norm_series.push_back(psi.norm());
        rec.energy_series.push_back(expectation(H, psi));
        for (const auto& [name, op] : observables)
            rec.observables[name].push_back(expectation(*op, psi));
    }
    return rec;
}

// time-dependent observable family t -> Phi_t
using OperatorFamily = std::function<HermitianOperator(double)>;

struct HeisenbergDerivative {
    double commutator_form = 0.0;  // <psi, (dPhi/dt - i[Phi, H]) psi>
    double difference_form = 0.0;  // centered difference of <psi_t, Phi_t psi_t>
};

inline HeisenbergDerivative heisenberg_derivative(const OperatorFamily& family,
                                                  const HermitianOperator& H, const Vector& psi_t,
                                                  double t, double dt, double tol = 1e-10) {
    if (dt <= 0.0) throw std::invalid_argument("heisenberg_derivative: dt must be > 0");
    HeisenbergDerivative out;
    const Matrix Phi = family(t).matrix();
    const Matrix dPhi = (family(t + dt).matrix() - family(t - dt).matrix()) / (2.0 * dt);
    const Matrix comm = Phi * H.matrix() - H.matrix() * Phi;
    const cplx val = psi_t.dot(dPhi * psi_t) - cplx(0.0, 1.0) * psi_t.dot(comm * psi_t);
    out.commutator_form = val.real();

    const Vector plus = expm_apply(H, psi_t, dt, tol);
    const Vector minus = expm_apply(H, psi_t, -dt, tol);
    const double ep = plus.dot(family(t + dt).matrix() * plus).real();
    const double em = minus.dot(family(t - dt).matrix() * minus).real();
    out.difference_form = (ep - em) / (2.0 * dt);
    return out;
}

}  // namespace lightcone
