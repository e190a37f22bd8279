#pragma once

// Discretized one-photon space: half-offset momentum lattice, polarization
// frame, dispersion omega(k) = |k|, and the conjugate position lattice linked
// by the unitary discrete Fourier transform.  Functions of |k| and |y| become
// diagonal operators in the matching representation.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "lightcone/operators.hpp"
#include "lightcone/symbol.hpp"

namespace lightcone {

enum class GridMode { scalar1d, vector3d };

using Vec3 = std::array<double, 3>;

class PhotonGrid {
  public:
    PhotonGrid(int dim, int M, double dk, GridMode mode) : dim_(dim), M_(M), dk_(dk), mode_(mode) {
        if (dim != 1 && dim != 3) throw std::invalid_argument("PhotonGrid: dim must be 1 or 3");
        if (M < 2 || M % 2 != 0)
            throw std::invalid_argument("PhotonGrid: M must be even and >= 2 (half-offset lattice)");
        if (dk <= 0.0) throw std::invalid_argument("PhotonGrid: dk must be > 0");
        if ((mode == GridMode::scalar1d) != (dim == 1))
            throw std::invalid_argument("PhotonGrid: mode/dim mismatch");
        pol_ = (mode == GridMode::vector3d) ? 2 : 1;

        sites_ = 1;
        for (int a = 0; a < dim_; ++a) sites_ *= M_;

        dy_ = 2.0 * M_PI / (M_ * dk_);
        axis_k_.resize(M_);
        axis_y_.resize(M_);
        for (int j = 0; j < M_; ++j) {
            axis_k_[j] = (j + 0.5 - M_ / 2.0) * dk_;
            axis_y_[j] = (j + 0.5 - M_ / 2.0) * dy_;
        }

        k_points_.resize(sites_);
        omega_.resize(sites_);
        y_points_.resize(sites_);
        y_radius_.resize(sites_);
        for (int m = 0; m < sites_; ++m) {
            const auto idx = unflatten(m);
            Vec3 k{0, 0, 0}, y{0, 0, 0};
            for (int a = 0; a < dim_; ++a) {
                k[a] = axis_k_[idx[a]];
                y[a] = axis_y_[idx[a]];
            }
            k_points_[m] = k;
            y_points_[m] = y;
            omega_[m] = norm3(k);
            y_radius_[m] = norm3(y);
        }

        if (mode_ == GridMode::vector3d) build_polarizations();

        // per-axis unitary DFT: U(m, j) = exp(-i k_j y_m) / sqrt(M)
        axis_dft_.resize(M_, M_);
        const double s = 1.0 / std::sqrt(static_cast<double>(M_));
        for (int m = 0; m < M_; ++m)
            for (int j = 0; j < M_; ++j)
                axis_dft_(m, j) = s * std::exp(cplx(0.0, -axis_k_[j] * axis_y_[m]));
    }

    int dim() const { return dim_; }
    int modes_per_axis() const { return M_; }
    int sites() const { return sites_; }          // momentum lattice points
    int polarizations() const { return pol_; }
    int one_photon_dim() const { return sites_ * pol_; }
    double spacing_k() const { return dk_; }
    double spacing_y() const { return dy_; }
    double box_length() const { return M_ * dy_; }
    GridMode mode() const { return mode_; }

    const Vec3& k_point(int m) const { return k_points_[m]; }
    const Vec3& y_point(int m) const { return y_points_[m]; }
    double omega(int m) const { return omega_[m]; }
    double y_radius(int m) const { return y_radius_[m]; }
    const std::vector<double>& omega_all() const { return omega_; }

    // polarization vectors (vector3d mode)
    const Vec3& eps(int m, int lambda) const { return eps_[m * 2 + lambda]; }

    // flattened one-photon index
    int index(int site, int lambda) const { return site * pol_ + lambda; }
    int site_of(int idx) const { return idx / pol_; }
    int lambda_of(int idx) const { return idx % pol_; }

    // Apply the position-representation transform to a one-photon vector
    // (momentum amplitudes in, position amplitudes out), axis by axis.
    Vector to_position(const Vector& v) const { return transform(v, false); }
    Vector to_momentum(const Vector& v) const { return transform(v, true); }

    // Full DFT as a matrix on the one-photon space (tensor product over axes,
    // identity on polarization); used for tests and operator conjugation.
    Matrix dft_matrix() const {
        Matrix site_dft = axis_dft_;
        for (int a = 1; a < dim_; ++a) site_dft = kron(site_dft, axis_dft_).eval();
        if (pol_ == 1) return site_dft;
        return kron(site_dft, Matrix::Identity(pol_, pol_));
    }

    const Matrix& axis_dft() const { return axis_dft_; }

  private:
    int dim_, M_;
    double dk_, dy_ = 0.0;
    GridMode mode_;
    int pol_ = 1, sites_ = 0;
    std::vector<double> axis_k_, axis_y_;
    std::vector<Vec3> k_points_, y_points_;
    std::vector<double> omega_, y_radius_;
    std::vector<Vec3> eps_;
    Matrix axis_dft_;

    static double norm3(const Vec3& v) {
        return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    }

    std::array<int, 3> unflatten(int m) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int a = dim_ - 1; a >= 0; --a) {
            idx[a] = m % M_;
            m /= M_;
        }
        return idx;  // axis-major: idx[0] slowest
    }

    void build_polarizations() {
        eps_.resize(sites_ * 2);
        for (int m = 0; m < sites_; ++m) {
            const Vec3& k = k_points_[m];
            const double kn = omega_[m];
            Vec3 khat{k[0] / kn, k[1] / kn, k[2] / kn};
            // e_z x k
            Vec3 e1{-k[1], k[0], 0.0};
            const double n1 = norm3(e1);
            if (n1 > 1e-8) {
                e1 = {e1[0] / n1, e1[1] / n1, e1[2] / n1};
            } else {
                e1 = {1.0, 0.0, 0.0};  // k parallel to e_z
            }
            Vec3 e2{khat[1] * e1[2] - khat[2] * e1[1], khat[2] * e1[0] - khat[0] * e1[2],
                    khat[0] * e1[1] - khat[1] * e1[0]};
            eps_[m * 2] = e1;
            eps_[m * 2 + 1] = e2;
        }
    }

    Vector transform(const Vector& v, bool inverse) const {
        if (v.size() != one_photon_dim()) throw std::invalid_argument("transform: size mismatch");
        Vector w = v;
        // apply the per-axis DFT along each axis, polarization untouched
        for (int a = 0; a < dim_; ++a) {
            Vector out = Vector::Zero(w.size());
            const int stride_below = pol_ * ipow(M_, dim_ - 1 - a);
            const int blocks = sites_ * pol_ / (M_ * stride_below);
            for (int b = 0; b < blocks; ++b)
                for (int s = 0; s < stride_below; ++s) {
                    const int base = b * M_ * stride_below + s;
                    for (int m = 0; m < M_; ++m) {
                        cplx acc = 0.0;
                        for (int j = 0; j < M_; ++j) {
                            const cplx u = inverse ? std::conj(axis_dft_(j, m)) : axis_dft_(m, j);
                            acc += u * w[base + j * stride_below];
                        }
                        out[base + m * stride_below] = acc;
                    }
                }
            w = out;
        }
        return w;
    }

    static int ipow(int b, int e) {
        int r = 1;
        while (e-- > 0) r *= b;
        return r;
    }

    static Matrix kron(const Matrix& A, const Matrix& B) {
        Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            for (Eigen::Index j = 0; j < A.cols(); ++j)
                out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        return out;
    }
};

inline PhotonGrid build_photon_grid(int dim, int M, double dk, GridMode mode) {
    return PhotonGrid(dim, M, dk, mode);
}

enum class BasisRep { momentum, position };

// Operator diagonal in the requested representation, expressed in the
// momentum basis.  The symbol is applied to the radial coordinate (|k_j| or
// |y_m|) of the lattice point.
inline HermitianOperator operator_function(const PhotonGrid& grid, BasisRep rep,
                                           const SymbolFunction& sf) {
    const int n = grid.one_photon_dim();
    Eigen::VectorXd diag(n);
    for (int m = 0; m < grid.sites(); ++m) {
        const double r = (rep == BasisRep::momentum) ? grid.omega(m) : grid.y_radius(m);
        if (sf.kind == SymbolKind::inverse_power_delta && rep == BasisRep::momentum && r == 0.0)
            throw std::domain_error("operator_function: inverse power at omega = 0");
        const double val = sf.eval(r);
        for (int l = 0; l < grid.polarizations(); ++l) diag[grid.index(m, l)] = val;
    }
    if (rep == BasisRep::momentum) {
        auto op = HermitianOperator::diagonal(diag, "one_photon");
        return op;
    }
    const Matrix U = grid.dft_matrix();  // momentum -> position
    Matrix m = U.adjoint() * diag.cast<cplx>().asDiagonal() * U;
    return HermitianOperator::from_hermitian(std::move(m), "one_photon");
}

// ||k|^-s u|| / ||y|^s u||; the Hardy quotient on the discrete grid.
inline double hardy_ratio(const PhotonGrid& grid, double s, const Vector& u) {
    if (s < 0.0) throw std::invalid_argument("hardy_ratio: s must be >= 0");
    const double smax = grid.dim() == 3 ? 1.5 : 0.5;
    if (s >= smax) throw std::invalid_argument("hardy_ratio: s out of range for this dimension");
    const int n = grid.one_photon_dim();
    if (u.size() != n) throw std::invalid_argument("hardy_ratio: size mismatch");

    Vector num = u;
    for (int m = 0; m < grid.sites(); ++m) {
        const double w = std::pow(grid.omega(m), -s);
        for (int l = 0; l < grid.polarizations(); ++l) num[grid.index(m, l)] *= w;
    }
    Vector pos = grid.to_position(u);
    for (int m = 0; m < grid.sites(); ++m) {
        const double w = std::pow(grid.y_radius(m), s);
        for (int l = 0; l < grid.polarizations(); ++l) pos[grid.index(m, l)] *= w;
    }
    const double den = pos.norm();
    if (den == 0.0) throw std::domain_error("hardy_ratio: ||y|^s u|| = 0");
    return num.norm() / den;
}

}  // namespace lightcone
