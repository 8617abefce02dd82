// Dense complex matrices for small qubit registers.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "qcm/errors.hpp"

namespace qcm {

using cplx = std::complex<double>;

// Row-major square complex matrix. Everything in this simulator lives on
// registers of at most a dozen qubits, so none of this is tuned for size.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t dim) : dim_(dim), a_(dim * dim) {}

    static Matrix identity(std::size_t dim) {
        Matrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1.0;
        return m;
    }

    std::size_t dim() const { return dim_; }

    cplx& at(std::size_t r, std::size_t c) { return a_[r * dim_ + c]; }
    const cplx& at(std::size_t r, std::size_t c) const { return a_[r * dim_ + c]; }

    friend bool operator==(const Matrix& a, const Matrix& b) = default;

private:
    std::size_t dim_ = 0;
    std::vector<cplx> a_;
};

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.dim() != b.dim()) throw InvalidArgument("matrix dimension mismatch");
    const std::size_t n = a.dim();
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const cplx aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c.at(i, j) += aik * b.at(k, j);
        }
    }
    return c;
}

inline Matrix adjoint(const Matrix& a) {
    const std::size_t n = a.dim();
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c.at(i, j) = std::conj(a.at(j, i));
    return c;
}

// Kronecker product; the left factor supplies the high-order index bits.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    const std::size_t na = a.dim(), nb = b.dim();
    Matrix c(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) {
            const cplx aij = a.at(i, j);
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l)
                    c.at(i * nb + k, j * nb + l) = aij * b.at(k, l);
        }
    return c;
}

inline cplx trace(const Matrix& a) {
    cplx t = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) t += a.at(i, i);
    return t;
}

inline double max_abs(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a.at(i, j)));
    return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.dim() != b.dim()) throw InvalidArgument("matrix dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            m = std::max(m, std::abs(a.at(i, j) - b.at(i, j)));
    return m;
}

inline bool all_finite(const Matrix& a) {
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            if (!std::isfinite(a.at(i, j).real()) || !std::isfinite(a.at(i, j).imag()))
                return false;
    return true;
}

namespace detail {

// Eigenvalues of a real symmetric matrix (row-major, n x n) by cyclic
// Jacobi sweeps. Plenty for the register sizes handled here.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> m, std::size_t n) {
    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += m[p * n + q] * m[p * n + q];
        return std::sqrt(2.0 * s);
    };
    double scale = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) scale = std::max(scale, std::abs(m[i]));
    const double stop = 1e-15 * std::max(scale, 1.0);

    for (int sweep = 0; sweep < 60 && off_norm() > stop; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m[p * n + q];
                if (std::abs(apq) <= stop / (double)(n * n)) continue;
                const double app = m[p * n + p];
                const double aqq = m[q * n + q];
                const double phi = 0.5 * std::atan2(2.0 * apq, app - aqq);
                const double c = std::cos(phi), s = std::sin(phi);
                for (std::size_t k = 0; k < n; ++k) {  // right-multiply by the rotation
                    const double akp = m[k * n + p], akq = m[k * n + q];
                    m[k * n + p] = c * akp + s * akq;
                    m[k * n + q] = -s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // left-multiply by its transpose
                    const double apk = m[p * n + k], aqk = m[q * n + k];
                    m[p * n + k] = c * apk + s * aqk;
                    m[q * n + k] = -s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = m[i * n + i];
    return eig;
}

}  // namespace detail

// Eigenvalues of a Hermitian matrix, via the real symmetric embedding
// [[Re, -Im], [Im, Re]] whose spectrum is the original one doubled.
inline std::vector<double> hermitian_eigenvalues(const Matrix& h) {
    const std::size_t n = h.dim();
    std::vector<double> b(4 * n * n, 0.0);
    const std::size_t m = 2 * n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double re = h.at(i, j).real(), im = h.at(i, j).imag();
            b[i * m + j] = re;
            b[(i + n) * m + (j + n)] = re;
            b[i * m + (j + n)] = -im;
            b[(i + n) * m + j] = im;
        }
    }
    auto eig = detail::symmetric_eigenvalues(std::move(b), m);
    std::sort(eig.begin(), eig.end());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = eig[2 * i];  // each value appears twice
    return out;
}

inline double min_eigenvalue_hermitian(const Matrix& h) {
    auto eig = hermitian_eigenvalues(h);
    return eig.empty() ? 0.0 : eig.front();
}

}  // namespace qcm
