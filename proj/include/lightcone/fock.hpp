#pragma once

// Truncated bosonic Fock space over the photon grid: occupation-number basis
// with total photon number <= n_max, creation/annihilation operators smeared
// with one-photon vectors, second quantization and field operators.
// The one-photon space is l^2 over (mode, polarization); continuum quadrature
// weights are absorbed into the smearing vectors by the model layer.

#include <Eigen/Dense>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <utility>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "lightcone/grid.hpp"
#include "lightcone/operators.hpp"

namespace lightcone {

using Occupation = std::vector<std::uint8_t>;

class FockBasis {
  public:
    FockBasis(const PhotonGrid& grid, int n_max, std::size_t budget_mb = default_budget_mb())
        : grid_(&grid), n_max_(n_max) {
        if (n_max < 1) throw std::invalid_argument("FockBasis: n_max must be >= 1");
        const int modes = grid.one_photon_dim();

        // stars-and-bars dimension check against the memory budget before
        // enumerating anything
        std::size_t dim = 0;
        for (int n = 0; n <= n_max; ++n) dim += compositions_count(modes, n);
        const std::size_t bytes = dim * dim * sizeof(cplx);
        if (bytes > budget_mb * std::size_t{1024} * 1024)
            throw std::runtime_error("FockBasis: dimension " + std::to_string(dim) +
                                     " exceeds memory budget (" + std::to_string(budget_mb) +
                                     " MB for a dense operator)");

        states_.reserve(dim);
        sector_offsets_.resize(n_max + 2, 0);
        for (int n = 0; n <= n_max; ++n) {
            sector_offsets_[n] = states_.size();
            enumerate_sector(modes, n);
        }
        sector_offsets_[n_max + 1] = states_.size();
        for (std::size_t i = 0; i < states_.size(); ++i) index_[states_[i]] = i;
    }

    static std::size_t default_budget_mb() {
        if (const char* e = std::getenv("LIGHTCONE_BUDGET_MB")) return std::stoul(e);
        return 4096;
    }

    const PhotonGrid& grid() const { return *grid_; }
    int n_max() const { return n_max_; }
    std::size_t dim() const { return states_.size(); }
    const Occupation& occupation(std::size_t i) const { return states_[i]; }
    std::size_t sector_offset(int n) const { return sector_offsets_[n]; }
    std::size_t sector_dim(int n) const { return sector_offsets_[n + 1] - sector_offsets_[n]; }

    std::size_t index_of(const Occupation& occ) const {
        auto it = index_.find(occ);
        if (it == index_.end()) throw std::invalid_argument("FockBasis: unknown occupation");
        return it->second;
    }

    int total_number(std::size_t i) const {
        return std::accumulate(states_[i].begin(), states_[i].end(), 0);
    }

    // projector onto sectors with total number <= n (as a 0/1 diagonal)
    Eigen::VectorXd sector_projector_diag(int n) const {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(dim());
        for (std::size_t i = 0; i < sector_offsets_[std::min(n, n_max_) + 1]; ++i) d[i] = 1.0;
        return d;
    }

    const Occupation& vacuum() const { return states_[0]; }

  private:
    const PhotonGrid* grid_;
    int n_max_;
    std::vector<Occupation> states_;
    std::map<Occupation, std::size_t> index_;
    std::vector<std::size_t> sector_offsets_;

    static std::size_t compositions_count(int modes, int n) {
        // C(modes + n - 1, n)
        long double r = 1.0L;
        for (int i = 1; i <= n; ++i) r = r * (modes + n - i) / i;
        return static_cast<std::size_t>(r + 0.5L);
    }

    // lexicographic enumeration of weak compositions of n into `modes` parts
    void enumerate_sector(int modes, int n) {
        Occupation occ(modes, 0);
        enumerate_rec(occ, 0, n);
    }
    void enumerate_rec(Occupation& occ, int pos, int rem) {
        if (pos == static_cast<int>(occ.size()) - 1) {
            occ[pos] = static_cast<std::uint8_t>(rem);
            states_.push_back(occ);
            occ[pos] = 0;
            return;
        }
        for (int c = 0; c <= rem; ++c) {
            occ[pos] = static_cast<std::uint8_t>(c);
            enumerate_rec(occ, pos + 1, rem - c);
        }
        occ[pos] = 0;
    }
};

inline FockBasis build_fock_basis(const PhotonGrid& grid, int n_max) {
    return FockBasis(grid, n_max);
}

// a(f) = sum_j conj(f_j) a_j : sector n+1 -> n
inline Matrix annihilator_matrix(const FockBasis& basis, const Vector& f) {
    if (f.size() != basis.grid().one_photon_dim())
        throw std::invalid_argument("annihilator: smearing vector size mismatch");
    const std::size_t d = basis.dim();
    Matrix A = Matrix::Zero(d, d);
    Occupation tmp;
    for (std::size_t i = 0; i < d; ++i) {
        const Occupation& occ = basis.occupation(i);
        for (int j = 0; j < f.size(); ++j) {
            if (occ[j] == 0) continue;
            if (f[j] == cplx(0.0, 0.0)) continue;
            tmp = occ;
            tmp[j] -= 1;
            const std::size_t target = basis.index_of(tmp);
            A(target, i) += std::conj(f[j]) * std::sqrt(static_cast<double>(occ[j]));
        }
    }
    return A;
}

// a*(f) = adjoint of a(f) within the truncation (sector n_max maps to zero)
inline Matrix creator_matrix(const FockBasis& basis, const Vector& f) {
    return annihilator_matrix(basis, f).adjoint();
}

// dGamma(t): sector-diagonal lift of a Hermitian one-photon operator
inline HermitianOperator second_quantize(const FockBasis& basis, const HermitianOperator& t) {
    const Matrix& T = t.matrix();
    if (T.rows() != basis.grid().one_photon_dim())
        throw std::invalid_argument("second_quantize: one-photon dimension mismatch");
    if (t.hermiticity_residual() != 0.0)
        throw std::invalid_argument("second_quantize: one-photon operator must be Hermitian");
    const std::size_t d = basis.dim();
    Matrix out = Matrix::Zero(d, d);
    Occupation tmp;
    // dGamma(t) = sum_ij T_ij adag_i a_j
    for (std::size_t col = 0; col < d; ++col) {
        const Occupation& occ = basis.occupation(col);
        for (int j = 0; j < T.cols(); ++j) {
            if (occ[j] == 0) continue;
            const double sj = std::sqrt(static_cast<double>(occ[j]));
            for (int i = 0; i < T.rows(); ++i) {
                const cplx tij = T(i, j);
                if (tij == cplx(0.0, 0.0)) continue;
                if (i == j) {
                    out(col, col) += tij * static_cast<double>(occ[j]);
                } else {
                    tmp = occ;
                    tmp[j] -= 1;
                    tmp[i] += 1;
                    const std::size_t row = basis.index_of(tmp);
                    out(row, col) += tij * sj * std::sqrt(static_cast<double>(occ[i] + 1));
                }
            }
        }
    }
    return HermitianOperator::from_hermitian(std::move(out), "fock", 0);
}

// Phi(h) = (a*(h) + a(h)) / sqrt(2)
inline HermitianOperator field_operator(const FockBasis& basis, const Vector& h) {
    const Matrix A = annihilator_matrix(basis, h);
    Matrix out = (A + A.adjoint()) / std::sqrt(2.0);
    auto op = HermitianOperator::from_hermitian(std::move(out), "fock", 1);
    return op;
}

inline HermitianOperator number_operator(const FockBasis& basis) {
    Eigen::VectorXd d(basis.dim());
    for (std::size_t i = 0; i < basis.dim(); ++i) d[i] = basis.total_number(i);
    auto op = HermitianOperator::diagonal(d, "fock");
    return op;
}

inline HermitianOperator free_field_hamiltonian(const FockBasis& basis) {
    const PhotonGrid& g = basis.grid();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(basis.dim());
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        const Occupation& occ = basis.occupation(i);
        for (int j = 0; j < static_cast<int>(occ.size()); ++j)
            if (occ[j]) d[i] += occ[j] * g.omega(g.site_of(j));
    }
    return HermitianOperator::diagonal(d, "fock");
}

// max over a probe set in sectors <= n_max - 1 of
// ||([a(f), a*(g)] - <f,g>) psi|| / ||psi||
inline double ccr_residual(const FockBasis& basis, const Vector& f, const Vector& g,
                           bool include_top_sector = false) {
    const Matrix A = annihilator_matrix(basis, f);
    const Matrix B = creator_matrix(basis, g);
    const cplx fg = f.dot(g);  // Eigen dot conjugates the left argument
    const std::size_t d = basis.dim();
    const Matrix comm = A * B - B * A - fg * Matrix::Identity(d, d);
    const int top = include_top_sector ? basis.n_max() : basis.n_max() - 1;
    const std::size_t sub = basis.sector_offset(top + 1);

    double worst = 0.0;
    // deterministic probe set: basis vectors of the allowed sectors
    for (std::size_t i = 0; i < sub; ++i) {
        const double r = comm.col(i).norm();  // ||comm e_i|| / ||e_i||
        worst = std::max(worst, r);
    }
    return worst;
}

struct BoundCheckReport {
    double measured = 0.0;
    double bound = 0.0;
    bool holds = false;
};

// Relative norm bounds on the truncated space:
//   ||a(f)(N+1)^(-1/2)|| <= ||f||,  ||a*(f)(N+1)^(-1/2)|| <= sqrt(2)||f||
inline std::pair<BoundCheckReport, BoundCheckReport> bound_check_numbers(const FockBasis& basis,
                                                                         const Vector& f) {
    const Matrix A = annihilator_matrix(basis, f);
    Eigen::VectorXd nh(basis.dim());
    for (std::size_t i = 0; i < basis.dim(); ++i)
        nh[i] = 1.0 / std::sqrt(1.0 + basis.total_number(i));
    const Matrix W = nh.cast<cplx>().asDiagonal();
    BoundCheckReport ra{spectral_norm(A * W), f.norm(), false};
    ra.holds = ra.measured <= ra.bound + 1e-12;
    BoundCheckReport rc{spectral_norm(A.adjoint() * W), std::sqrt(2.0) * f.norm(), false};
    rc.holds = rc.measured <= rc.bound + 1e-12;
    return {ra, rc};
}

//   ||a(f)(H_f+1)^(-1/2)|| <= |||k|^(-1/2) f||
//   ||a*(f)(H_f+1)^(-1/2)|| <= |||k|^(-1/2) f|| + ||f||
inline std::pair<BoundCheckReport, BoundCheckReport> bound_check_field_energy(
    const FockBasis& basis, const Vector& f) {
    const PhotonGrid& g = basis.grid();
    const Matrix A = annihilator_matrix(basis, f);
    const Matrix Hf = free_field_hamiltonian(basis).matrix();
    Eigen::VectorXd hf(basis.dim());
    for (std::size_t i = 0; i < basis.dim(); ++i)
        hf[i] = 1.0 / std::sqrt(1.0 + Hf(i, i).real());
    const Matrix W = hf.cast<cplx>().asDiagonal();

    Vector kf = f;
    for (int j = 0; j < f.size(); ++j) kf[j] /= std::sqrt(g.omega(g.site_of(j)));
    BoundCheckReport ra{spectral_norm(A * W), kf.norm(), false};
    ra.holds = ra.measured <= ra.bound + 1e-12;
    BoundCheckReport rc{spectral_norm(A.adjoint() * W), kf.norm() + f.norm(), false};
    rc.holds = rc.measured <= rc.bound + 1e-12;
    return {ra, rc};
}

}  // namespace lightcone
