#pragma once

// Hermitian operators on the truncated Hilbert spaces.  Storage is dense
// (desk-scale dimensions); export is sparse coordinate-list text.  Hermiticity
// is kept bit-exact by mirroring the upper triangle on construction.

#include <Eigen/Dense>
#include <complex>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace lightcone {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

class HermitianOperator {
  public:
    HermitianOperator() = default;

    // Takes ownership of a matrix that is Hermitian up to rounding; the upper
    // triangle is mirrored so that the stored matrix equals its adjoint
    // bitwise.  sector_coupling < 0 means "unknown / not sector structured".
    static HermitianOperator from_hermitian(Matrix m, std::string domain = {},
                                            int sector_coupling = -1) {
        const Eigen::Index n = m.rows();
        if (n != m.cols()) throw std::invalid_argument("HermitianOperator: not square");
        for (Eigen::Index i = 0; i < n; ++i) {
            m(i, i) = cplx(m(i, i).real(), 0.0);
            for (Eigen::Index j = i + 1; j < n; ++j) m(j, i) = std::conj(m(i, j));
        }
        HermitianOperator op;
        op.mat_ = std::move(m);
        op.domain_ = std::move(domain);
        op.sector_coupling_ = sector_coupling;
        return op;
    }

    static HermitianOperator diagonal(const Eigen::VectorXd& d, std::string domain = {}) {
        HermitianOperator op;
        op.mat_ = d.cast<cplx>().asDiagonal();
        op.domain_ = std::move(domain);
        op.sector_coupling_ = 0;
        return op;
    }

    const Matrix& matrix() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }
    const std::string& domain() const { return domain_; }
    int sector_coupling() const { return sector_coupling_; }
    void set_sector_coupling(int s) { sector_coupling_ = s; }

    Vector apply(const Vector& v) const { return mat_ * v; }

    // exact by construction; kept as a cheap structural assert
    double hermiticity_residual() const { return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff(); }

    double operator_norm() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }

    Eigen::VectorXd eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }

    // coordinate-list text export: row col re im, 17 significant digits
    void export_coo(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path);
        char buf[128];
        for (Eigen::Index i = 0; i < mat_.rows(); ++i)
            for (Eigen::Index j = 0; j < mat_.cols(); ++j) {
                const cplx v = mat_(i, j);
                if (v == cplx(0.0, 0.0)) continue;
                std::snprintf(buf, sizeof buf, "%lld %lld %.17g %.17g\n",
                              static_cast<long long>(i), static_cast<long long>(j), v.real(),
                              v.imag());
                out << buf;
            }
    }

  private:
    Matrix mat_;
    std::string domain_;
    int sector_coupling_ = -1;
};

// operator norm of a general (non-Hermitian) matrix, largest singular value
inline double spectral_norm(const Matrix& m) {
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

}  // namespace lightcone
