#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace cuntzlab {

using Complex = std::complex<double>;

/// Dense square complex matrix, row-major.  Sizes stay small (n <= 16 in
/// practice): every positive element of a discretised M_n(C(X)) is a field
/// of these, and all spectral work happens block by block.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int n) : n_(n), data_(static_cast<size_t>(n) * n) {}

    static Matrix identity(int n);
    static Matrix zero(int n) { return Matrix(n); }
    static Matrix diagonal(const std::vector<double>& entries);

    int size() const { return n_; }

    Complex& operator()(int row, int col) { return data_[static_cast<size_t>(row) * n_ + col]; }
    const Complex& operator()(int row, int col) const {
        return data_[static_cast<size_t>(row) * n_ + col];
    }

    Matrix adjoint() const;
    Matrix operator+(const Matrix& other) const;
    Matrix operator-(const Matrix& other) const;
    Matrix operator*(const Matrix& other) const;
    Matrix operator*(double scalar) const;
    Matrix operator*(const Complex& scalar) const;

    /// Largest |entry|; the cheap norm used by the Hermitian/PSD validators.
    double max_abs() const;
    double frobenius_norm() const;

    /// (M + M*)/2.  Spectral reconstructions call this to shed the
    /// ~1e-16 asymmetry left by floating-point products.
    Matrix hermitized() const;

    bool is_hermitian(double tol) const;

private:
    int n_ = 0;
    std::vector<Complex> data_;
};

/// Hermitian eigendecomposition A = V diag(values) V*, eigenvalues ascending,
/// columns of V orthonormal.
struct EigenSystem {
    std::vector<double> values;
    Matrix vectors;
};

/// Cyclic Jacobi sweeps (fixed pivot order, so results are reproducible
/// run to run).  The input is symmetrised before iterating.
EigenSystem hermitian_eig(const Matrix& a);

/// Functional calculus: V diag(fn(lambda)) V*.  Throws NumericalFailure if
/// fn produces a non-finite value on the sampled spectrum.
Matrix apply_spectral(const Matrix& a, const std::function<double(double)>& fn);

/// sqrt applied spectrally with negative roundoff clamped to zero.
Matrix sqrt_psd(const Matrix& a);

/// Spectral norm.  Hermitian inputs use their own eigenvalues; general
/// inputs go through A*A.
double operator_norm(const Matrix& a);

double min_eigenvalue(const Matrix& hermitian);

/// Unitary factor of the polar decomposition M = U P.  Rank-deficient
/// directions are completed deterministically from the standard basis.
Matrix unitary_polar_factor(const Matrix& m);

Matrix direct_sum(const Matrix& a, const Matrix& b);

/// Embeds a as the upper-left corner of an n x n matrix (zero elsewhere).
Matrix embed_upper_left(const Matrix& a, int n);

} // namespace cuntzlab
