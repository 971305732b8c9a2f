#include "cuntzlab/matrix.hpp"

#include "cuntzlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cuntzlab {

Matrix Matrix::identity(int n) {
    Matrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const std::vector<double>& entries) {
    Matrix m(static_cast<int>(entries.size()));
    for (int i = 0; i < m.size(); ++i) m(i, i) = entries[static_cast<size_t>(i)];
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix out(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

Matrix Matrix::operator+(const Matrix& other) const {
    Matrix out(n_);
    for (size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] + other.data_[k];
    return out;
}

Matrix Matrix::operator-(const Matrix& other) const {
    Matrix out(n_);
    for (size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] - other.data_[k];
    return out;
}

Matrix Matrix::operator*(const Matrix& other) const {
    Matrix out(n_);
    for (int i = 0; i < n_; ++i) {
        for (int k = 0; k < n_; ++k) {
            const Complex aik = (*this)(i, k);
            if (aik == Complex(0.0, 0.0)) continue;
            for (int j = 0; j < n_; ++j) out(i, j) += aik * other(k, j);
        }
    }
    return out;
}

Matrix Matrix::operator*(double scalar) const { return (*this) * Complex(scalar, 0.0); }

Matrix Matrix::operator*(const Complex& scalar) const {
    Matrix out(n_);
    for (size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] * scalar;
    return out;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (const Complex& z : data_) m = std::max(m, std::abs(z));
    return m;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (const Complex& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

Matrix Matrix::hermitized() const {
    Matrix out(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            out(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    return out;
}

bool Matrix::is_hermitian(double tol) const {
    return ((*this) - adjoint()).max_abs() <= tol;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

} // namespace

EigenSystem hermitian_eig(const Matrix& input) {
    const int n = input.size();
    Matrix a = input.hermitized();
    Matrix v = Matrix::identity(n);

    if (n == 0) return {{}, v};
    if (n == 1) return {{a(0, 0).real()}, v};

    const double scale = a.frobenius_norm();
    const double stop = 1e-14 * (1.0 + scale);
    constexpr int kMaxSweeps = 64;

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) <= stop) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= 1e-300) continue;
                // Phase removal turns the 2x2 pivot block real symmetric,
                // then the classical Givens angle annihilates it.
                const Complex w = apq / mag;
                const double alpha = a(p, p).real();
                const double gamma = a(q, q).real();
                const double theta = (gamma - alpha) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // U differs from the identity only at (p,p)=c, (p,q)=s,
                // (q,p)=-s*conj(w), (q,q)=c*conj(w).  A <- U* A U, V <- V U.
                const Complex uqp = -s * std::conj(w);
                const Complex uqq = c * std::conj(w);
                for (int j = 0; j < n; ++j) {
                    const Complex apj = a(p, j);
                    const Complex aqj = a(q, j);
                    a(p, j) = c * apj + std::conj(uqp) * aqj;
                    a(q, j) = s * apj + std::conj(uqq) * aqj;
                }
                for (int i = 0; i < n; ++i) {
                    const Complex aip = a(i, p);
                    const Complex aiq = a(i, q);
                    a(i, p) = aip * c + aiq * uqp;
                    a(i, q) = aip * s + aiq * uqq;
                    const Complex vip = v(i, p);
                    const Complex viq = v(i, q);
                    v(i, p) = vip * c + viq * uqp;
                    v(i, q) = vip * s + viq * uqq;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

    EigenSystem out;
    out.values.resize(static_cast<size_t>(n));
    out.vectors = Matrix(n);
    for (int j = 0; j < n; ++j) {
        out.values[static_cast<size_t>(j)] = a(order[static_cast<size_t>(j)], order[static_cast<size_t>(j)]).real();
        for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[static_cast<size_t>(j)]);
    }
    return out;
}

Matrix apply_spectral(const Matrix& a, const std::function<double(double)>& fn) {
    const EigenSystem eig = hermitian_eig(a);
    const int n = a.size();
    Matrix out(n);
    for (int k = 0; k < n; ++k) {
        const double fv = fn(eig.values[static_cast<size_t>(k)]);
        if (!std::isfinite(fv)) {
            throw NumericalFailure("scalar function produced a non-finite value at spectral point " +
                                   std::to_string(eig.values[static_cast<size_t>(k)]));
        }
        if (fv == 0.0) continue;
        for (int i = 0; i < n; ++i) {
            const Complex vik = eig.vectors(i, k);
            if (vik == Complex(0.0, 0.0)) continue;
            for (int j = 0; j < n; ++j)
                out(i, j) += fv * vik * std::conj(eig.vectors(j, k));
        }
    }
    return out.hermitized();
}

Matrix sqrt_psd(const Matrix& a) {
    return apply_spectral(a, [](double t) { return std::sqrt(std::max(0.0, t)); });
}

double operator_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    if (a.is_hermitian(1e-12)) {
        const EigenSystem eig = hermitian_eig(a);
        double m = 0.0;
        for (double v : eig.values) m = std::max(m, std::abs(v));
        return m;
    }
    const EigenSystem eig = hermitian_eig(a.adjoint() * a);
    return std::sqrt(std::max(0.0, eig.values.back()));
}

double min_eigenvalue(const Matrix& hermitian) {
    if (hermitian.size() == 0) return 0.0;
    return hermitian_eig(hermitian).values.front();
}

Matrix unitary_polar_factor(const Matrix& m) {
    const int n = m.size();
    const EigenSystem eig = hermitian_eig(m.adjoint() * m);
    const double sigma_max = std::sqrt(std::max(0.0, eig.values.back()));
    const double cutoff = std::max(1e-12, 1e-12 * sigma_max);

    // Columns of u: m v_k / sigma_k where sigma_k is meaningful, then a
    // deterministic Gram-Schmidt completion from the standard basis.
    Matrix u(n);
    std::vector<int> filled;
    for (int k = n - 1; k >= 0; --k) {
        const double sigma = std::sqrt(std::max(0.0, eig.values[static_cast<size_t>(k)]));
        if (sigma <= cutoff) continue;
        for (int i = 0; i < n; ++i) {
            Complex acc(0.0, 0.0);
            for (int j = 0; j < n; ++j) acc += m(i, j) * eig.vectors(j, k);
            u(i, k) = acc / sigma;
        }
        filled.push_back(k);
    }
    std::vector<bool> done(static_cast<size_t>(n), false);
    for (int k : filled) done[static_cast<size_t>(k)] = true;
    for (int k = 0; k < n; ++k) {
        if (done[static_cast<size_t>(k)]) continue;
        // Orthogonalise every standard basis vector against the filled
        // columns and keep the one with the largest residual (ties go to the
        // smaller index).
        std::vector<Complex> best;
        double best_norm = -1.0;
        for (int basis = 0; basis < n; ++basis) {
            std::vector<Complex> col(static_cast<size_t>(n), Complex(0.0, 0.0));
            col[static_cast<size_t>(basis)] = 1.0;
            for (int other = 0; other < n; ++other) {
                if (!done[static_cast<size_t>(other)]) continue;
                Complex proj(0.0, 0.0);
                for (int i = 0; i < n; ++i) proj += std::conj(u(i, other)) * col[static_cast<size_t>(i)];
                for (int i = 0; i < n; ++i) col[static_cast<size_t>(i)] -= proj * u(i, other);
            }
            double nrm = 0.0;
            for (const Complex& z : col) nrm += std::norm(z);
            nrm = std::sqrt(nrm);
            if (nrm > best_norm + 1e-12) {
                best_norm = nrm;
                best = std::move(col);
            }
        }
        if (best_norm < 1e-6) throw NumericalFailure("polar factor completion failed");
        for (int i = 0; i < n; ++i) u(i, k) = best[static_cast<size_t>(i)] / best_norm;
        done[static_cast<size_t>(k)] = true;
    }
    return u * eig.vectors.adjoint();
}

Matrix direct_sum(const Matrix& a, const Matrix& b) {
    Matrix out(a.size() + b.size());
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) out(i, j) = a(i, j);
    for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j) out(a.size() + i, a.size() + j) = b(i, j);
    return out;
}

Matrix embed_upper_left(const Matrix& a, int n) {
    if (a.size() > n) throw PreconditionError("embedding target smaller than source");
    Matrix out(n);
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) out(i, j) = a(i, j);
    return out;
}

} // namespace cuntzlab
