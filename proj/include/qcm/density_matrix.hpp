// Density matrices over small qubit registers: tensor products, partial
// traces, unitary conjugation, and structural predicates.
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qcm/gates.hpp"
#include "qcm/matrix.hpp"

namespace qcm {

// Ordered list of distinct qubit positions within a register.
using RegisterIndex = std::vector<std::size_t>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdSlack = 1e-10;
inline constexpr std::size_t kQubitCap = 12;

namespace detail {

// Position 0 is the most significant bit of a basis index.
inline std::size_t bit_at(std::size_t index, std::size_t pos, std::size_t n_qubits) {
    return (index >> (n_qubits - 1 - pos)) & 1u;
}

inline void check_positions(const RegisterIndex& positions, std::size_t n_qubits) {
    std::vector<bool> seen(n_qubits, false);
    for (std::size_t p : positions) {
        if (p >= n_qubits) throw InvalidArgument("register position out of range");
        if (seen[p]) throw InvalidArgument("register positions must be distinct");
        seen[p] = true;
    }
}

}  // namespace detail

// Immutable positive Hermitian trace-one matrix on an n-qubit register.
// Every operation returns a fresh value.
class DensityMatrix {
public:
    // Projector onto the classical basis state given by `bits`.
    static DensityMatrix classical_state(const std::vector<int>& bits) {
        for (int b : bits)
            if (b != 0 && b != 1) throw InvalidArgument("classical state bits must be 0 or 1");
        if (bits.size() > kQubitCap) throw RegisterOverflow("register exceeds the qubit cap");
        const std::size_t n = bits.size();
        std::size_t index = 0;
        for (int b : bits) index = (index << 1) | static_cast<std::size_t>(b);
        Matrix m(std::size_t{1} << n);
        m.at(index, index) = 1.0;
        return DensityMatrix(n, std::move(m));
    }

    // Validating constructor for externally supplied matrices.
    static DensityMatrix from_matrix(std::size_t n_qubits, Matrix m) {
        if (m.dim() != (std::size_t{1} << n_qubits))
            throw InvalidArgument("matrix size does not match qubit count");
        DensityMatrix s(n_qubits, std::move(m));
        s.validate();
        return s;
    }

    // Single-qubit state from a Bloch vector with |r| <= 1; positive by
    // construction, which makes it the sampler of choice for tests.
    static DensityMatrix from_bloch(double rx, double ry, double rz) {
        if (rx * rx + ry * ry + rz * rz > 1.0 + 1e-12)
            throw InvalidArgument("Bloch vector lies outside the unit ball");
        Matrix m(2);
        m.at(0, 0) = 0.5 * (1.0 + rz);
        m.at(1, 1) = 0.5 * (1.0 - rz);
        m.at(0, 1) = 0.5 * cplx(rx, -ry);
        m.at(1, 0) = 0.5 * cplx(rx, ry);
        return DensityMatrix(1, std::move(m));
    }

    std::size_t n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return m_.dim(); }
    const Matrix& matrix() const { return m_; }
    cplx entry(std::size_t r, std::size_t c) const { return m_.at(r, c); }

    // Probability of observing basis state k.
    double diagonal(std::size_t k) const { return m_.at(k, k).real(); }

    // Throws InvalidState if the stored matrix is not a density operator.
    // The eigenvalue check is the expensive part and is opt-in.
    void validate(bool check_psd = false) const {
        if (!all_finite(m_)) throw InvalidState("density matrix has non-finite entries");
        for (std::size_t i = 0; i < m_.dim(); ++i)
            for (std::size_t j = i; j < m_.dim(); ++j)
                if (std::abs(m_.at(i, j) - std::conj(m_.at(j, i))) > kHermitianTol)
                    throw InvalidState("density matrix is not Hermitian");
        if (std::abs(trace(m_) - cplx(1.0)) > kTraceTol)
            throw InvalidState("density matrix trace differs from one");
        if (check_psd && min_eigenvalue_hermitian(m_) < -kPsdSlack)
            throw InvalidState("density matrix has a negative eigenvalue");
    }

    // {"n": qubits, "re": [[...]], "im": [[...]]}
    nlohmann::json to_json() const {
        nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
        for (std::size_t i = 0; i < dim(); ++i) {
            nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
            for (std::size_t j = 0; j < dim(); ++j) {
                rrow.push_back(m_.at(i, j).real());
                irow.push_back(m_.at(i, j).imag());
            }
            re.push_back(std::move(rrow));
            im.push_back(std::move(irow));
        }
        return {{"n", n_qubits_}, {"re", std::move(re)}, {"im", std::move(im)}};
    }

    friend DensityMatrix tensor(const DensityMatrix&, const DensityMatrix&, std::size_t);
    friend DensityMatrix partial_trace(const DensityMatrix&, const RegisterIndex&);
    friend DensityMatrix conjugate(const DensityMatrix&, const UnitaryGate&, const RegisterIndex&);

private:
    DensityMatrix(std::size_t n_qubits, Matrix m) : n_qubits_(n_qubits), m_(std::move(m)) {}

    std::size_t n_qubits_;
    Matrix m_;
};

// Joint state of two disjoint registers; the left factor's qubits come
// first (they are the high-order index bits).
inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b,
                            std::size_t qubit_cap = kQubitCap) {
    const std::size_t n = a.n_qubits() + b.n_qubits();
    if (n > qubit_cap) throw RegisterOverflow("tensor product exceeds the qubit cap");
    return DensityMatrix(n, kron(a.matrix(), b.matrix()));
}

// Restriction to the sub-register `keep` (marginal state); the output
// qubit order follows the order of `keep`.
inline DensityMatrix partial_trace(const DensityMatrix& s, const RegisterIndex& keep) {
    const std::size_t n = s.n_qubits();
    detail::check_positions(keep, n);
    const std::size_t k = keep.size();

    RegisterIndex traced;
    {
        std::vector<bool> kept(n, false);
        for (std::size_t p : keep) kept[p] = true;
        for (std::size_t p = 0; p < n; ++p)
            if (!kept[p]) traced.push_back(p);
    }

    auto scatter = [n](std::size_t value, const RegisterIndex& positions) {
        std::size_t full = 0;
        for (std::size_t m = 0; m < positions.size(); ++m) {
            const std::size_t bit = (value >> (positions.size() - 1 - m)) & 1u;
            full |= bit << (n - 1 - positions[m]);
        }
        return full;
    };

    Matrix out(std::size_t{1} << k);
    const std::size_t t_dim = std::size_t{1} << traced.size();
    for (std::size_t io = 0; io < out.dim(); ++io) {
        const std::size_t ibase = scatter(io, keep);
        for (std::size_t jo = 0; jo < out.dim(); ++jo) {
            const std::size_t jbase = scatter(jo, keep);
            cplx acc = 0.0;
            for (std::size_t t = 0; t < t_dim; ++t) {
                const std::size_t tfull = scatter(t, traced);
                acc += s.entry(ibase | tfull, jbase | tfull);
            }
            out.at(io, jo) = acc;
        }
    }
    return DensityMatrix(k, std::move(out));
}

// U S U^dagger with the gate embedded at the given positions (identity
// elsewhere); at[0] addresses the gate's own most significant qubit.
inline DensityMatrix conjugate(const DensityMatrix& s, const UnitaryGate& gate,
                               const RegisterIndex& at) {
    const std::size_t n = s.n_qubits();
    detail::check_positions(at, n);
    if (at.size() != gate.arity()) throw InvalidArgument("gate arity does not match positions");

    const std::size_t N = s.dim();
    const std::size_t g = gate.matrix().dim();
    const std::size_t k = at.size();

    std::vector<std::size_t> local(N), base(N);
    std::vector<std::size_t> place(g, 0);
    for (std::size_t l = 0; l < g; ++l)
        for (std::size_t m = 0; m < k; ++m)
            place[l] |= ((l >> (k - 1 - m)) & 1u) << (n - 1 - at[m]);
    for (std::size_t i = 0; i < N; ++i) {
        std::size_t l = 0;
        for (std::size_t m = 0; m < k; ++m) l = (l << 1) | detail::bit_at(i, at[m], n);
        local[i] = l;
        base[i] = i & ~place[g - 1];
    }

    const Matrix& u = gate.matrix();
    Matrix tmp(N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            cplx acc = 0.0;
            for (std::size_t l = 0; l < g; ++l) {
                const cplx uil = u.at(local[i], l);
                if (uil != 0.0) acc += uil * s.entry(base[i] | place[l], j);
            }
            tmp.at(i, j) = acc;
        }
    Matrix out(N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            cplx acc = 0.0;
            for (std::size_t l = 0; l < g; ++l) {
                const cplx ujl = u.at(local[j], l);
                if (ujl != 0.0) acc += tmp.at(i, base[j] | place[l]) * std::conj(ujl);
            }
            out.at(i, j) = acc;
        }
    return DensityMatrix(n, std::move(out));
}

inline DensityMatrix conjugate(const DensityMatrix& s, const ClassicalPermutationGate& gate,
                               const RegisterIndex& at) {
    return conjugate(s, gate.unitary(), at);
}

inline bool is_diagonal(const DensityMatrix& s, double tol) {
    for (std::size_t i = 0; i < s.dim(); ++i)
        for (std::size_t j = 0; j < s.dim(); ++j)
            if (i != j && std::abs(s.entry(i, j)) > tol) return false;
    return true;
}

struct DecomposeResult {
    bool decomposable = false;
    double max_deviation = 0.0;
    std::vector<DensityMatrix> factors;  // marginals per part, in part order

    explicit operator bool() const { return decomposable; }
};

// Tests whether `s` equals the tensor product of its marginals over the
// given partition of the register, entrywise within `tol`.
inline DecomposeResult is_decomposable(const DensityMatrix& s,
                                       const std::vector<RegisterIndex>& parts, double tol) {
    const std::size_t n = s.n_qubits();
    {
        std::vector<bool> seen(n, false);
        std::size_t total = 0;
        for (const auto& part : parts) {
            detail::check_positions(part, n);
            for (std::size_t p : part) {
                if (seen[p]) throw InvalidArgument("partition parts overlap");
                seen[p] = true;
            }
            total += part.size();
        }
        if (total != n) throw InvalidArgument("partition does not cover the register");
    }

    DecomposeResult res;
    for (const auto& part : parts) res.factors.push_back(partial_trace(s, part));

    auto sub_index = [n](std::size_t full, const RegisterIndex& part) {
        std::size_t v = 0;
        for (std::size_t p : part) v = (v << 1) | detail::bit_at(full, p, n);
        return v;
    };

    double dev = 0.0;
    for (std::size_t i = 0; i < s.dim(); ++i)
        for (std::size_t j = 0; j < s.dim(); ++j) {
            cplx prod = 1.0;
            for (std::size_t p = 0; p < parts.size(); ++p)
                prod *= res.factors[p].entry(sub_index(i, parts[p]), sub_index(j, parts[p]));
            dev = std::max(dev, std::abs(prod - s.entry(i, j)));
        }
    res.max_deviation = dev;
    res.decomposable = dev <= tol;
    return res;
}

}  // namespace qcm
