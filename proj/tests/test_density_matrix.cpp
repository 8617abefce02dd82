#include <random>

#include <catch_amalgamated.hpp>

#include "qcm/density_matrix.hpp"
#include "qcm/selftest.hpp"

using namespace qcm;

namespace {

// Independent reference path for conjugation: build the embedded
// operator explicitly and multiply with the generic matrix routines.
DensityMatrix ref_conjugate_2q(const DensityMatrix& s, const Matrix& u) {
    Matrix m = multiply(multiply(u, s.matrix()), adjoint(u));
    return DensityMatrix::from_matrix(2, std::move(m));
}

std::mt19937_64 test_rng(std::uint64_t stream) { return std::mt19937_64(derive_seed(777, stream)); }

}  // namespace

TEST_CASE("classical_state builds basis projectors") {
    REQUIRE(DensityMatrix::classical_state({0}).diagonal(0) == 1.0);
    REQUIRE(DensityMatrix::classical_state({0}).diagonal(1) == 0.0);

    const DensityMatrix s11 = DensityMatrix::classical_state({1, 1});
    for (std::size_t k = 0; k < 4; ++k) REQUIRE(s11.diagonal(k) == (k == 3 ? 1.0 : 0.0));

    // big-endian: |1,0> sits at index 2
    const DensityMatrix s10 = DensityMatrix::classical_state({1, 0});
    for (std::size_t k = 0; k < 4; ++k) REQUIRE(s10.diagonal(k) == (k == 2 ? 1.0 : 0.0));

    REQUIRE_THROWS_AS(DensityMatrix::classical_state({0, 2}), InvalidArgument);
}

TEST_CASE("tensor of diagonal states") {
    Matrix a(2), b(2);
    a.at(0, 0) = 0.25;
    a.at(1, 1) = 0.75;
    b.at(0, 0) = 1.0;
    const DensityMatrix da = DensityMatrix::from_matrix(1, a);
    const DensityMatrix db = DensityMatrix::from_matrix(1, b);
    const DensityMatrix t = tensor(da, db);
    REQUIRE(t.diagonal(0) == Catch::Approx(0.25).margin(1e-15));
    REQUIRE(t.diagonal(1) == 0.0);
    REQUIRE(t.diagonal(2) == Catch::Approx(0.75).margin(1e-15));
    REQUIRE(t.diagonal(3) == 0.0);

    const DensityMatrix c = tensor(DensityMatrix::classical_state({0}),
                                   DensityMatrix::classical_state({1}));
    REQUIRE(max_abs_diff(c.matrix(), DensityMatrix::classical_state({0, 1}).matrix()) == 0.0);
}

TEST_CASE("tensor preserves unit trace for random states") {
    auto rng = test_rng(1);
    for (int i = 0; i < 50; ++i) {
        const DensityMatrix t = tensor(random_bloch_state(rng), random_bloch_state(rng));
        REQUIRE(std::abs(trace(t.matrix()) - cplx(1.0)) < 1e-12);
        t.validate(true);
    }
}

TEST_CASE("tensor respects the qubit cap") {
    DensityMatrix s = DensityMatrix::classical_state({0});
    DensityMatrix big = DensityMatrix::classical_state(std::vector<int>(12, 0));
    REQUIRE_THROWS_AS(tensor(big, s), RegisterOverflow);
}

TEST_CASE("partial_trace marginals") {
    SECTION("marginal of a diagonal product") {
        Matrix a(2), b(2);
        a.at(0, 0) = 0.25;
        a.at(1, 1) = 0.75;
        b.at(0, 0) = 0.5;
        b.at(1, 1) = 0.5;
        const DensityMatrix t =
            tensor(DensityMatrix::from_matrix(1, a), DensityMatrix::from_matrix(1, b));
        const DensityMatrix m = partial_trace(t, {0});
        REQUIRE(m.diagonal(0) == Catch::Approx(0.25).margin(1e-15));
        REQUIRE(m.diagonal(1) == Catch::Approx(0.75).margin(1e-15));
    }
    SECTION("each side of the maximally correlated projector is maximally mixed") {
        Matrix bell(4);
        bell.at(0, 0) = bell.at(3, 3) = bell.at(0, 3) = bell.at(3, 0) = 0.5;
        const DensityMatrix s = DensityMatrix::from_matrix(2, bell);
        const DensityMatrix m = partial_trace(s, {0});
        REQUIRE(m.diagonal(0) == Catch::Approx(0.5).margin(1e-15));
        REQUIRE(m.diagonal(1) == Catch::Approx(0.5).margin(1e-15));
        REQUIRE(std::abs(m.entry(0, 1)) < 1e-15);
    }
    SECTION("keeping every position is the identity") {
        auto rng = test_rng(2);
        const DensityMatrix t = tensor(random_bloch_state(rng), random_bloch_state(rng));
        REQUIRE(max_abs_diff(partial_trace(t, {0, 1}).matrix(), t.matrix()) < 1e-15);
    }
    SECTION("keep order permutes the output register") {
        auto rng = test_rng(3);
        const DensityMatrix a = random_bloch_state(rng);
        const DensityMatrix b = random_bloch_state(rng);
        const DensityMatrix t = tensor(a, b);
        const DensityMatrix swapped = partial_trace(t, {1, 0});
        REQUIRE(max_abs_diff(swapped.matrix(), tensor(b, a).matrix()) < 1e-12);
    }
    SECTION("partial trace of a product returns the exact factor") {
        auto rng = test_rng(4);
        for (int i = 0; i < 100; ++i) {
            const DensityMatrix a = random_bloch_state(rng);
            const DensityMatrix b = random_bloch_state(rng);
            REQUIRE(max_abs_diff(partial_trace(tensor(a, b), {0}).matrix(), a.matrix()) < 1e-12);
            REQUIRE(max_abs_diff(partial_trace(tensor(a, b), {1}).matrix(), b.matrix()) < 1e-12);
        }
    }
    REQUIRE_THROWS_AS(partial_trace(DensityMatrix::classical_state({0, 0}), {2}),
                      InvalidArgument);
}

TEST_CASE("conjugate applies embedded gates") {
    SECTION("NOT permutes the diagonal") {
        Matrix a(2);
        a.at(0, 0) = 0.25;
        a.at(1, 1) = 0.75;
        const DensityMatrix s = DensityMatrix::from_matrix(1, a);
        const DensityMatrix out = conjugate(s, gate_not(), {0});
        REQUIRE(out.diagonal(0) == Catch::Approx(0.75).margin(1e-15));
        REQUIRE(out.diagonal(1) == Catch::Approx(0.25).margin(1e-15));
    }
    SECTION("CNOT on classical state |1,0> gives |1,1>") {
        const DensityMatrix s = DensityMatrix::classical_state({1, 0});
        const DensityMatrix out = conjugate(s, gate_cnot(), {0, 1});
        REQUIRE(max_abs_diff(out.matrix(), DensityMatrix::classical_state({1, 1}).matrix()) ==
                0.0);
    }
    SECTION("identity leaves the state unchanged") {
        auto rng = test_rng(5);
        const DensityMatrix t = tensor(random_bloch_state(rng), random_bloch_state(rng));
        REQUIRE(max_abs_diff(conjugate(t, gate_identity(2), {0, 1}).matrix(), t.matrix()) <
                1e-15);
    }
    SECTION("agrees with the reference path for random gates and states") {
        auto rng = test_rng(6);
        for (int i = 0; i < 50; ++i) {
            const DensityMatrix t = tensor(random_bloch_state(rng), random_bloch_state(rng));
            for (const UnitaryGate& g :
                 {gate_cnot().unitary(), gate_sigma2().unitary(), gate_mean_unitary()}) {
                const DensityMatrix fast = conjugate(t, g, {0, 1});
                const DensityMatrix ref = ref_conjugate_2q(t, g.matrix());
                REQUIRE(max_abs_diff(fast.matrix(), ref.matrix()) < 1e-13);
            }
        }
    }
    SECTION("embedding at the second position acts on the right factor") {
        Matrix a(2);
        a.at(0, 0) = 1.0;
        const DensityMatrix zero = DensityMatrix::from_matrix(1, a);
        const DensityMatrix joint = tensor(zero, zero);
        const DensityMatrix out = conjugate(joint, gate_not(), {1});
        REQUIRE(max_abs_diff(out.matrix(), DensityMatrix::classical_state({0, 1}).matrix()) <
                1e-15);
    }
    SECTION("trace and Hermiticity preserved") {
        auto rng = test_rng(7);
        for (int i = 0; i < 50; ++i) {
            const DensityMatrix t = tensor(random_bloch_state(rng), random_bloch_state(rng));
            const DensityMatrix out = conjugate(t, gate_mean_unitary(), {0, 1});
            out.validate(true);
        }
    }
    REQUIRE_THROWS_AS(conjugate(DensityMatrix::classical_state({0}), gate_cnot(), {0}),
                      InvalidArgument);
}

TEST_CASE("builtin gate permutations") {
    REQUIRE(gate_not().image() == std::vector<std::size_t>{1, 0});
    REQUIRE(gate_cnot().image() == std::vector<std::size_t>{0, 1, 3, 2});

    // |1,0> -> |0,0> and |0,0> -> |0,1>
    REQUIRE(gate_sigma2().image()[2] == 0);
    REQUIRE(gate_sigma2().image()[0] == 1);

    SECTION("composition order: the agreement permutation has order three") {
        const auto img = gate_sigma2().image();
        auto compose = [&img](std::vector<std::size_t> p) {
            std::vector<std::size_t> out(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) out[i] = img[p[i]];
            return out;
        };
        std::vector<std::size_t> p = {0, 1, 2, 3};
        p = compose(p);                                       // ^1
        p = compose(p);                                       // ^2
        p = compose(p);                                       // ^3
        REQUIRE(p == std::vector<std::size_t>{0, 1, 2, 3});
        p = compose(p);                                       // ^4 equals ^1 again
        REQUIRE(p == gate_sigma2().image());
    }

    SECTION("CNOT is an involution") {
        const auto img = gate_cnot().image();
        for (std::size_t i = 0; i < 4; ++i) REQUIRE(img[img[i]] == i);
    }
}

TEST_CASE("mean unitary fixes |11> and is unitary") {
    const UnitaryGate u = gate_mean_unitary();
    REQUIRE(u.matrix().at(3, 3) == cplx(1.0));
    for (std::size_t k = 0; k < 3; ++k) REQUIRE(u.matrix().at(k, 3) == cplx(0.0));
    const Matrix gram = multiply(adjoint(u.matrix()), u.matrix());
    REQUIRE(max_abs_diff(gram, Matrix::identity(4)) < 1e-12);
}

TEST_CASE("is_diagonal") {
    Matrix d(2);
    d.at(0, 0) = 0.3;
    d.at(1, 1) = 0.7;
    REQUIRE(is_diagonal(DensityMatrix::from_matrix(1, d), 1e-12));

    Matrix c(2);
    c.at(0, 0) = c.at(0, 1) = c.at(1, 0) = c.at(1, 1) = 0.5;
    REQUIRE_FALSE(is_diagonal(DensityMatrix::from_matrix(1, c), 1e-12));

    REQUIRE(is_diagonal(DensityMatrix::classical_state({1, 0, 1}), 0.0));
}

TEST_CASE("is_decomposable") {
    auto rng = test_rng(8);
    SECTION("products decompose and reassemble") {
        for (int i = 0; i < 100; ++i) {
            const DensityMatrix a = random_bloch_state(rng);
            const DensityMatrix b = random_bloch_state(rng);
            const DensityMatrix t = tensor(a, b);
            const DecomposeResult res = is_decomposable(t, {{0}, {1}}, 1e-12);
            REQUIRE(res.decomposable);
            REQUIRE(res.factors.size() == 2);
            REQUIRE(max_abs_diff(tensor(res.factors[0], res.factors[1]).matrix(), t.matrix()) <=
                    1e-12);
        }
    }
    SECTION("the maximally correlated projector is not a product") {
        Matrix bell(4);
        bell.at(0, 0) = bell.at(3, 3) = bell.at(0, 3) = bell.at(3, 0) = 0.5;
        const DensityMatrix s = DensityMatrix::from_matrix(2, bell);
        const DecomposeResult res = is_decomposable(s, {{0}, {1}}, 1e-3);
        REQUIRE_FALSE(res.decomposable);
        REQUIRE(res.max_deviation == Catch::Approx(0.5).margin(1e-12));
    }
    SECTION("single-part partition always decomposes") {
        const DensityMatrix t = tensor(random_bloch_state(rng), random_bloch_state(rng));
        REQUIRE(is_decomposable(t, {{0, 1}}, 0.0).decomposable);
    }
    SECTION("bad partitions are rejected") {
        const DensityMatrix t = tensor(random_bloch_state(rng), random_bloch_state(rng));
        REQUIRE_THROWS_AS(is_decomposable(t, {{0}}, 1e-12), InvalidArgument);
        REQUIRE_THROWS_AS(is_decomposable(t, {{0, 1}, {1}}, 1e-12), InvalidArgument);
    }
}

TEST_CASE("validation rejects broken matrices") {
    Matrix bad_trace(2);
    bad_trace.at(0, 0) = 0.7;
    bad_trace.at(1, 1) = 0.7;
    REQUIRE_THROWS_AS(DensityMatrix::from_matrix(1, bad_trace), InvalidState);

    Matrix non_herm(2);
    non_herm.at(0, 0) = 0.5;
    non_herm.at(1, 1) = 0.5;
    non_herm.at(0, 1) = 0.3;
    REQUIRE_THROWS_AS(DensityMatrix::from_matrix(1, non_herm), InvalidState);

    Matrix not_psd(2);
    not_psd.at(0, 0) = 1.2;
    not_psd.at(1, 1) = -0.2;
    const DensityMatrix s = DensityMatrix::from_matrix(1, not_psd);  // trace and symmetry pass
    REQUIRE_THROWS_AS(s.validate(true), InvalidState);

    REQUIRE_THROWS_AS(DensityMatrix::from_bloch(1.0, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("matrix JSON serialization") {
    const DensityMatrix s = DensityMatrix::classical_state({1});
    const nlohmann::json j = s.to_json();
    REQUIRE(j["n"] == 1);
    REQUIRE(j["re"][1][1] == 1.0);
    REQUIRE(j["re"][0][0] == 0.0);
    REQUIRE(j["im"].size() == 2);
}

TEST_CASE("Bloch sampling stays inside the ball and validates") {
    auto rng = test_rng(9);
    for (int i = 0; i < 200; ++i) random_bloch_state(rng).validate(true);
}
