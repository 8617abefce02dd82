// Elementary one- and two-qubit gates.
//
// Register convention throughout the library: position 0 is the most
// significant bit of a computational-basis index, so a two-qubit basis
// state |x,y> has index 2x + y.
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qcm/matrix.hpp"

namespace qcm {

inline constexpr double kUnitaryTol = 1e-12;

class UnitaryGate {
public:
    UnitaryGate(std::size_t arity, Matrix matrix, std::string label)
        : arity_(arity), u_(std::move(matrix)), label_(std::move(label)) {
        if (arity_ < 1 || arity_ > 2) throw InvalidArgument("gate arity must be 1 or 2");
        if (u_.dim() != (std::size_t{1} << arity_))
            throw InvalidArgument("gate matrix size does not match arity");
        if (!all_finite(u_)) throw InvalidArgument("gate matrix has non-finite entries");
        const Matrix gram = multiply(adjoint(u_), u_);
        if (max_abs_diff(gram, Matrix::identity(u_.dim())) > kUnitaryTol)
            throw InvalidArgument("gate matrix is not unitary: " + label_);
    }

    std::size_t arity() const { return arity_; }
    const Matrix& matrix() const { return u_; }
    const std::string& label() const { return label_; }

private:
    std::size_t arity_;
    Matrix u_;
    std::string label_;
};

// A gate induced by a bijection of classical basis states. image()[i] is
// the basis index that |i> maps to; the matrix has exact 0/1 entries.
class ClassicalPermutationGate {
public:
    ClassicalPermutationGate(std::size_t arity, std::vector<std::size_t> image, std::string label)
        : arity_(arity), image_(std::move(image)), label_(std::move(label)) {
        const std::size_t dim = std::size_t{1} << arity_;
        if (image_.size() != dim) throw InvalidArgument("permutation size does not match arity");
        std::vector<bool> seen(dim, false);
        for (std::size_t v : image_) {
            if (v >= dim || seen[v]) throw InvalidArgument("permutation is not a bijection");
            seen[v] = true;
        }
    }

    std::size_t arity() const { return arity_; }
    const std::vector<std::size_t>& image() const { return image_; }
    const std::string& label() const { return label_; }

    UnitaryGate unitary() const {
        const std::size_t dim = image_.size();
        Matrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m.at(image_[i], i) = 1.0;
        return UnitaryGate(arity_, std::move(m), label_);
    }

private:
    std::size_t arity_;
    std::vector<std::size_t> image_;
    std::string label_;
};

// Negation: |0> <-> |1>.
inline ClassicalPermutationGate gate_not() {
    return ClassicalPermutationGate(1, {1, 0}, "NOT");
}

// Controlled NOT on (control, target): |x,y> -> |x, x xor y>.
inline ClassicalPermutationGate gate_cnot() {
    return ClassicalPermutationGate(2, {0, 1, 3, 2}, "CNOT");
}

// Equivalence permutation |x,y> -> |y, x xnor y>. On a diagonal product
// state with one-probabilities (x, y), the second output qubit carries
// 1 - (x + y) + 2xy, i.e. the probability that the two bits agree.
inline ClassicalPermutationGate gate_sigma2() {
    // |00>->|01>, |01>->|10>, |10>->|00>, |11>->|11>
    return ClassicalPermutationGate(2, {1, 2, 0, 3}, "XNOR");
}

// Rotation in the span of |01> and |10> by 45 degrees, fixing |00> and
// |11>. On a *diagonal* product state with one-probabilities (x, y), both
// output marginals carry (x + y) / 2.
inline UnitaryGate gate_mean_unitary() {
    const double lambda = 1.0 / std::sqrt(2.0);
    Matrix m(4);
    m.at(0, 0) = 1.0;
    m.at(3, 3) = 1.0;
    // |10> -> lambda (|10> + |01>), |01> -> lambda (|01> - |10>)
    m.at(2, 2) = lambda;
    m.at(1, 2) = lambda;
    m.at(1, 1) = lambda;
    m.at(2, 1) = -lambda;
    return UnitaryGate(2, std::move(m), "MEAN");
}

inline UnitaryGate gate_identity(std::size_t arity = 1) {
    return UnitaryGate(arity, Matrix::identity(std::size_t{1} << arity), "ID");
}

// |0> -> cos(theta/2)|0> + sin(theta/2)|1>; used to prepare a qubit whose
// one-probability is sin^2(theta/2).
inline UnitaryGate gate_rotation(double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    Matrix m(2);
    m.at(0, 0) = c;
    m.at(0, 1) = -s;
    m.at(1, 0) = s;
    m.at(1, 1) = c;
    return UnitaryGate(1, std::move(m), "ROT");
}

}  // namespace qcm
