#include <catch_amalgamated.hpp>

#include "qcm/matrix.hpp"

using namespace qcm;

TEST_CASE("identity and multiply") {
    const Matrix id = Matrix::identity(4);
    Matrix a(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) a.at(i, j) = cplx(double(i), double(j));
    REQUIRE(max_abs_diff(multiply(id, a), a) == 0.0);
    REQUIRE(max_abs_diff(multiply(a, id), a) == 0.0);
}

TEST_CASE("adjoint conjugates and transposes") {
    Matrix a(2);
    a.at(0, 1) = cplx(1.0, 2.0);
    const Matrix ad = adjoint(a);
    REQUIRE(ad.at(1, 0) == cplx(1.0, -2.0));
    REQUIRE(ad.at(0, 1) == cplx(0.0, 0.0));
}

TEST_CASE("kron places left factor on high-order bits") {
    Matrix a(2), b(2);
    a.at(0, 0) = 1.0;  // |0><0|
    b.at(1, 1) = 1.0;  // |1><1|
    const Matrix k = kron(a, b);
    REQUIRE(k.dim() == 4);
    REQUIRE(k.at(1, 1) == cplx(1.0));  // basis index 01
    REQUIRE(k.at(0, 0) == cplx(0.0));
}

TEST_CASE("hermitian eigenvalues") {
    SECTION("diagonal") {
        Matrix m(2);
        m.at(0, 0) = 0.25;
        m.at(1, 1) = 0.75;
        auto eig = hermitian_eigenvalues(m);
        REQUIRE(eig[0] == Catch::Approx(0.25).margin(1e-12));
        REQUIRE(eig[1] == Catch::Approx(0.75).margin(1e-12));
    }
    SECTION("single-qubit state with coherences") {
        // eigenvalues of (I + r.sigma)/2 are (1 +/- |r|)/2
        const double rx = 0.3, ry = -0.4, rz = 0.2;
        const double rlen = std::sqrt(rx * rx + ry * ry + rz * rz);
        Matrix m(2);
        m.at(0, 0) = 0.5 * (1.0 + rz);
        m.at(1, 1) = 0.5 * (1.0 - rz);
        m.at(0, 1) = 0.5 * cplx(rx, -ry);
        m.at(1, 0) = 0.5 * cplx(rx, ry);
        auto eig = hermitian_eigenvalues(m);
        REQUIRE(eig[0] == Catch::Approx(0.5 * (1.0 - rlen)).margin(1e-12));
        REQUIRE(eig[1] == Catch::Approx(0.5 * (1.0 + rlen)).margin(1e-12));
    }
    SECTION("rank-one projector") {
        // (|00> + |11>)/sqrt(2): eigenvalues {1, 0, 0, 0}
        Matrix m(4);
        m.at(0, 0) = m.at(3, 3) = m.at(0, 3) = m.at(3, 0) = 0.5;
        auto eig = hermitian_eigenvalues(m);
        REQUIRE(eig.front() == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(eig.back() == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("dimension mismatch is rejected") {
    REQUIRE_THROWS_AS(multiply(Matrix(2), Matrix(4)), InvalidArgument);
}
