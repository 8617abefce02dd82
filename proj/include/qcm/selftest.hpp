// Built-in acceptance suite. Each check pins the tolerances the library
// promises; the CLI `selftest` command and the acceptance test binary
// both run this list.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qcm/expr.hpp"

namespace qcm {

inline constexpr std::uint64_t kAcceptanceSeed = 12345;

struct CriterionResult {
    int index = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

// Single-qubit state drawn uniformly from the Bloch ball; positive
// semidefinite by construction.
inline DensityMatrix random_bloch_state(std::mt19937_64& rng) {
    while (true) {
        const double x = 2.0 * detail::uniform53(rng) - 1.0;
        const double y = 2.0 * detail::uniform53(rng) - 1.0;
        const double z = 2.0 * detail::uniform53(rng) - 1.0;
        if (x * x + y * y + z * z <= 1.0) return DensityMatrix::from_bloch(x, y, z);
    }
}

namespace acceptance {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

inline CriterionResult gate_algebra(std::uint64_t) {
    double worst = 0.0;
    auto check_unitary = [&](const UnitaryGate& g) {
        const Matrix gram = multiply(adjoint(g.matrix()), g.matrix());
        worst = std::max(worst, max_abs_diff(gram, Matrix::identity(g.matrix().dim())));
    };
    check_unitary(gate_not().unitary());
    check_unitary(gate_cnot().unitary());
    check_unitary(gate_sigma2().unitary());
    check_unitary(gate_mean_unitary());
    check_unitary(gate_identity(1));
    check_unitary(gate_identity(2));
    for (double theta : {0.1, 0.7, 1.3, 2.9}) check_unitary(gate_rotation(theta));

    bool exact = true;
    for (const ClassicalPermutationGate& g : {gate_not(), gate_cnot(), gate_sigma2()}) {
        const Matrix m = g.unitary().matrix();
        for (std::size_t i = 0; i < m.dim(); ++i)
            for (std::size_t j = 0; j < m.dim(); ++j)
                if (m.at(i, j) != cplx(0.0) && m.at(i, j) != cplx(1.0)) exact = false;
    }
    return {1, "gate unitarity and exact classical permutations", worst <= 1e-12 && exact,
            "max |U*U - I| = " + fmt(worst) + (exact ? ", permutations exact 0/1" : ", INEXACT")};
}

inline CriterionResult diagonalization(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const DensityMatrix zero = DensityMatrix::classical_state({0});
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const DensityMatrix s = random_bloch_state(rng);
        const DensityMatrix joint = conjugate(tensor(s, zero), gate_cnot(), {0, 1});
        for (const RegisterIndex& keep : {RegisterIndex{0}, RegisterIndex{1}}) {
            const DensityMatrix m = partial_trace(joint, keep);
            worst = std::max(worst, std::abs(m.diagonal(0) - s.diagonal(0)));
            worst = std::max(worst, std::abs(m.diagonal(1) - s.diagonal(1)));
            worst = std::max(worst, std::abs(m.entry(0, 1)));
        }
    }
    return {2, "diagonalization preserves both output diagonals", worst <= 1e-12,
            "1000 Bloch-ball states, max deviation " + fmt(worst) + " (tol 1e-12)"};
}

inline CriterionResult real1_closed_forms(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = detail::uniform53(rng), y = detail::uniform53(rng);
        EnsembleStore store;
        Real1 a = prepare_real1(store, x), b = prepare_real1(store, y);
        worst = std::max(worst, std::abs(r1(store, sigma1(store, a, b)) - (x + y) / 2.0));
        a = prepare_real1(store, x);
        b = prepare_real1(store, y);
        worst = std::max(worst,
                         std::abs(r1(store, sigma2(store, a, b)) - (1.0 - (x + y) + 2.0 * x * y)));
        a = prepare_real1(store, x);
        b = prepare_real1(store, y);
        worst = std::max(worst, std::abs(r1(store, mu1(store, a, b)) - (x * y / 2.0 + 0.25)));
    }
    return {3, "real1 circuits match closed forms", worst <= 1e-12,
            "1000 random pairs, max |circuit - formula| = " + fmt(worst) + " (tol 1e-12)"};
}

inline CriterionResult real2_operations(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = 2.0 * detail::uniform53(rng) - 1.0;
        const double y = 2.0 * detail::uniform53(rng) - 1.0;
        EnsembleStore store;
        Real2 a = encode_real2(store, x), b = encode_real2(store, y);
        worst = std::max(worst, std::abs(r2(store, sigma_r2(store, a, b)) - (x + y) / 2.0));
        a = encode_real2(store, x);
        b = encode_real2(store, y);
        worst = std::max(worst, std::abs(r2(store, mu2(store, a, b)) - x * y / 4.0));
    }
    return {4, "real2 mean and quasimultiplication", worst <= 1e-12,
            "1000 random pairs, max |circuit - formula| = " + fmt(worst) + " (tol 1e-12)"};
}

inline CriterionResult real4_field_ops(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto draw = [&rng] { return 20.0 * detail::uniform53(rng) - 10.0; };
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double a = draw();
        double b = draw();
        const double add = a + b, sub = a - b, mul = a * b;
        {
            EnsembleStore store;
            Real4 x = encode_real4(store, a), y = encode_real4(store, b);
            worst = std::max(worst, std::abs(r4(store, add_r4(store, x, y)) - add) /
                                        std::max(1.0, std::abs(add)));
            x = encode_real4(store, a);
            y = encode_real4(store, b);
            worst = std::max(worst, std::abs(r4(store, sub_r4(store, x, y)) - sub) /
                                        std::max(1.0, std::abs(sub)));
            x = encode_real4(store, a);
            y = encode_real4(store, b);
            worst = std::max(worst, std::abs(r4(store, mul_r4(store, x, y)) - mul) /
                                        std::max(1.0, std::abs(mul)));
        }
        while (std::abs(b) < 1e-3) b = draw();
        {
            EnsembleStore store;
            Real4 x = encode_real4(store, a), y = encode_real4(store, b);
            const double div = a / b;
            worst = std::max(worst, std::abs(r4(store, div_r4(store, x, y)) - div) /
                                        std::max(1.0, std::abs(div)));
        }
    }
    return {5, "real4 field operations match the floating oracle", worst <= 1e-9,
            "1000 random pairs in [-10,10], divisors >= 1e-3; max rel err " + fmt(worst) +
                " (tol 1e-9)"};
}

inline CriterionResult fixed_circuits(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    struct Counts {
        std::int64_t gates, physical, clones, allocs;
        bool operator==(const Counts&) const = default;
    };
    auto counts_of = [](const EnsembleStore& store) {
        return Counts{store.gate_count(), store.count_events({std::nullopt, true}),
                      store.count_events({std::string(event_label::clone), {}}),
                      store.count_events({std::string(event_label::alloc), {}})};
    };

    bool all_fixed = true;
    std::string failed_op;
    for (int op = 0; op < 8 && all_fixed; ++op) {
        Counts first{};
        for (int run = 0; run < 100; ++run) {
            const double x = detail::uniform53(rng), y = detail::uniform53(rng);
            const double vx = 2.0 * x - 1.0, vy = 2.0 * y - 1.0;
            const double wx = 20.0 * x - 10.0, wy = 20.0 * y - 10.0;
            EnsembleStore store;
            switch (op) {
                case 0: sigma1(store, prepare_real1(store, x), prepare_real1(store, y)); break;
                case 1: sigma2(store, prepare_real1(store, x), prepare_real1(store, y)); break;
                case 2: mu1(store, prepare_real1(store, x), prepare_real1(store, y)); break;
                case 3: sigma_r2(store, encode_real2(store, vx), encode_real2(store, vy)); break;
                case 4: mu2(store, encode_real2(store, vx), encode_real2(store, vy)); break;
                case 5: mul_r4(store, encode_real4(store, wx), encode_real4(store, wy)); break;
                case 6: mean_r4(store, encode_real4(store, wx), encode_real4(store, wy)); break;
                case 7: add_r4(store, encode_real4(store, wx), encode_real4(store, wy)); break;
            }
            const Counts c = counts_of(store);
            if (run == 0) {
                first = c;
            } else if (!(c == first)) {
                all_fixed = false;
                static const char* names[] = {"sigma1", "sigma2",  "mu1",     "sigma_r2",
                                              "mu2",    "mul_r4", "mean_r4", "add_r4"};
                failed_op = names[op];
                break;
            }
        }
    }
    return {6, "gate counts independent of operand values", all_fixed,
            all_fixed ? "8 operations x 100 random operand sets, counts exactly equal"
                      : "counts varied for " + failed_op};
}

inline CriterionResult powering(std::uint64_t) {
    EnsembleStore store;
    Real4 x = encode_real4(store, 1.1);
    Real4 y = pow_r4(store, x, 1024, /*renorm=*/true);
    const std::int64_t muls = store.op_count(op_name::mul_r4);
    const double got = r4(store, y);
    const double want = std::pow(1.1, 1024.0);
    const double rel = std::abs(got - want) / std::abs(want);
    return {7, "powering by repeated squaring", muls <= 11 && rel <= 1e-6,
            std::to_string(muls) + " multiplications (cap 11), rel err " + fmt(rel) +
                " (tol 1e-6)"};
}

inline CriterionResult negative_control(std::uint64_t) {
    EnsembleStore store;
    const EnsembleId a = store.prepare(0.5);
    const EnsembleId b = store.prepare(0.5);
    // deliberately skip diagonalization before the averaging unitary
    auto [out, twin] = store.apply2(gate_mean_unitary(), a, b);
    (void)twin;
    const double dev = std::abs(store.r1(out) - 0.5);
    return {8, "averaging unitary needs diagonal inputs (negative control)", dev > 1e-6,
            "coherent p=0.5 inputs give mean deviation " + fmt(dev) + " (> 1e-6 required)"};
}

inline CriterionResult statistical_readout(std::uint64_t seed) {
    EnsembleStore store;
    const EnsembleId ens = store.prepare(0.3);
    int covered = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        const SampleResult s = sample(store, ens, 1000, derive_seed(seed, 1000 + i));
        const EstimateReport rep = estimate_real1(s);
        if (rep.ci_low <= 0.3 && 0.3 <= rep.ci_high) ++covered;
    }
    const double rate = static_cast<double>(covered) / trials;
    const bool coverage_ok = rate >= 0.935 && rate <= 0.965;

    EnsembleStore store2;
    Real4 two = encode_real4(store2, 2.0);
    const EstimateReport rep = estimate_real4(store2, two, 1000000, derive_seed(seed, 77));
    const double z = normal_quantile((1.0 + rep.level) / 2.0);
    const double se = (rep.ci_high - rep.ci_low) / (2.0 * z);
    const bool point_ok = std::abs(rep.point - 2.0) <= 3.0 * se;

    std::ostringstream os;
    os << "Wilson coverage " << rate * 100.0 << "% (bounds 93.5-96.5), ratio point "
       << rep.point << " within " << fmt(std::abs(rep.point - 2.0)) << " of 2 (3 SE = "
       << fmt(3.0 * se) << ")";
    return {9, "statistical readout: coverage and ratio estimate", coverage_ok && point_ok,
            os.str()};
}

inline CriterionResult decomposability(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    bool products_ok = true;
    for (int i = 0; i < 100; ++i) {
        const DensityMatrix s = tensor(random_bloch_state(rng), random_bloch_state(rng));
        if (!is_decomposable(s, {{0}, {1}}, 1e-12).decomposable) products_ok = false;
    }
    const DensityMatrix plus = conjugate(DensityMatrix::classical_state({0}),
                                         gate_rotation(std::numbers::pi / 2.0), {0});
    const DensityMatrix bell =
        conjugate(tensor(plus, DensityMatrix::classical_state({0})), gate_cnot(), {0, 1});
    const DecomposeResult bell_res = is_decomposable(bell, {{0}, {1}}, 1e-3);
    return {10, "decomposability detection", products_ok && !bell_res.decomposable,
            std::string("100 product states pass at 1e-12; entangled projector deviates by ") +
                fmt(bell_res.max_deviation) + " (fails at 1e-3)"};
}

inline CriterionResult shrinkage(std::uint64_t) {
    const ExprPtr ast = parse("1.1*0.9*1.1*0.9*1.1*0.9*1.1*0.9*1.1");
    EnsembleStore store;
    EvalOptions opts;
    opts.renorm = false;
    const EvalReport rep = evaluate(store, ast, opts);
    const double bound = std::pow(0.25, 8);  // initial component magnitudes are <= 1
    const bool shrunk =
        std::abs(rep.num_component) < bound && std::abs(rep.den_component) < bound;
    const bool accurate = rep.rel_err <= 1e-6;
    std::ostringstream os;
    os << "depth-8 chain, renorm off: components " << fmt(rep.num_component) << " / "
       << fmt(rep.den_component) << " (bound " << fmt(bound) << "), rel err "
       << fmt(rep.rel_err);
    return {11, "component shrinkage without renormalization", shrunk && accurate && rep.renorms == 0,
            os.str()};
}

}  // namespace acceptance

inline std::vector<CriterionResult> run_acceptance(std::uint64_t base_seed = kAcceptanceSeed) {
    using namespace acceptance;
    std::vector<CriterionResult> out;
    out.push_back(gate_algebra(derive_seed(base_seed, 1)));
    out.push_back(diagonalization(derive_seed(base_seed, 2)));
    out.push_back(real1_closed_forms(derive_seed(base_seed, 3)));
    out.push_back(real2_operations(derive_seed(base_seed, 4)));
    out.push_back(real4_field_ops(derive_seed(base_seed, 5)));
    out.push_back(fixed_circuits(derive_seed(base_seed, 6)));
    out.push_back(powering(derive_seed(base_seed, 7)));
    out.push_back(negative_control(derive_seed(base_seed, 8)));
    out.push_back(statistical_readout(derive_seed(base_seed, 9)));
    out.push_back(decomposability(derive_seed(base_seed, 10)));
    out.push_back(shrinkage(derive_seed(base_seed, 11)));
    return out;
}

}  // namespace qcm
