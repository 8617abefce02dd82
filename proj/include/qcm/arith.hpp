// Nondigital real-number arithmetic on qubit ensembles.
//
// Three encodings, all read off density-matrix diagonals:
//   - a single ensemble encodes a value in [0,1] as its one-probability;
//   - a (plus, minus) pair encodes a value in [-1,1] as the difference of
//     the two one-probabilities;
//   - a (numerator, denominator) pair of such pairs encodes any real as
//     the ratio of the two differences.
//
// The circuits below compute on these encodings with a fixed gate
// sequence per operation: gate counts never depend on operand values.
// Every multiplication shrinks both ratio components by a factor of 4;
// the ratio itself is unchanged, and renormalize() (a simulation-only
// step) restores component magnitude when chains get deep.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "qcm/store.hpp"

namespace qcm {

inline constexpr double kDenFloor = 1e-9;

namespace op_name {
inline const std::string mul_r4 = "mul_r4";
}

// Value in [0,1]: the ensemble's one-probability.
struct Real1 {
    EnsembleId ens;
};

// Value in [-1,1]: r1(plus) - r1(minus).
struct Real2 {
    Real1 plus;
    Real1 minus;
};

// Any real: r2(num) / r2(den).
struct Real4 {
    Real2 num;
    Real2 den;
};

// --- real1 ----------------------------------------------------------------

inline Real1 fresh_zero1(EnsembleStore& store) { return {store.fresh_zero()}; }

inline Real1 prepare_real1(EnsembleStore& store, double p) { return {store.prepare(p)}; }

inline double r1(const EnsembleStore& store, Real1 x) { return store.r1(x.ens); }

inline Real1 clone(EnsembleStore& store, Real1 x) { return {store.clone(x.ens)}; }

// (x + y) / 2. Both operands are first diagonalized (the averaging
// unitary only acts correctly on diagonal states); the first output
// marginal is kept, the second is equal and discarded.
inline Real1 sigma1(EnsembleStore& store, Real1 x, Real1 y) {
    if (x.ens == y.ens) throw SameOperand("sigma1 needs distinct ensembles; clone first");
    EnsembleId dx = store.diagonalize(x.ens);
    EnsembleId dy = store.diagonalize(y.ens);
    auto [out, twin] = store.apply2(gate_mean_unitary(), dx, dy);
    (void)twin;
    return {out};
}

// 1 - (x + y) + 2xy, the probability that the two encoded bits agree.
// A classical permutation acts on diagonals exactly, so no
// diagonalization is needed; the result sits on the second output qubit.
inline Real1 sigma2(EnsembleStore& store, Real1 x, Real1 y) {
    if (x.ens == y.ens) throw SameOperand("sigma2 needs distinct ensembles; clone first");
    auto [first, second] = store.apply2(gate_sigma2(), x.ens, y.ens);
    (void)first;
    return {second};
}

// Displaced multiplication xy/2 + 1/4, composed as
// sigma1(sigma1(sigma2(x, y), 0), sigma1(x, y)).
inline Real1 mu1(EnsembleStore& store, Real1 x, Real1 y) {
    if (x.ens == y.ens) throw SameOperand("mu1 needs distinct ensembles; clone first");
    Real1 xc = clone(store, x);
    Real1 yc = clone(store, y);
    Real1 agree = sigma2(store, x, y);
    Real1 zero = fresh_zero1(store);
    Real1 halved = sigma1(store, agree, zero);
    Real1 mean = sigma1(store, xc, yc);
    return sigma1(store, halved, mean);
}

// --- real2 ----------------------------------------------------------------

// Balanced encoding: plus = (1+v)/2, minus = (1-v)/2. Keeps both
// components away from the probability boundaries.
inline Real2 encode_real2(EnsembleStore& store, double v) {
    if (!(v >= -1.0 && v <= 1.0)) throw InvalidArgument("real2 value out of [-1,1]");
    Real1 plus = prepare_real1(store, (1.0 + v) / 2.0);
    Real1 minus = prepare_real1(store, (1.0 - v) / 2.0);
    return {plus, minus};
}

inline double r2(const EnsembleStore& store, Real2 x) {
    return r1(store, x.plus) - r1(store, x.minus);
}

inline Real2 clone(EnsembleStore& store, Real2 x) {
    return {clone(store, x.plus), clone(store, x.minus)};
}

// Componentwise arithmetic mean: (x + y) / 2.
inline Real2 sigma_r2(EnsembleStore& store, Real2 x, Real2 y) {
    return {sigma1(store, x.plus, y.plus), sigma1(store, x.minus, y.minus)};
}

// Quasimultiplication xy/4:
//   plus  = sigma1(mu1(x+, y+), mu1(x-, y-))
//   minus = sigma1(mu1(x+, y-), mu1(x-, y+))
// Each component feeds two displaced multiplications, hence the clones.
inline Real2 mu2(EnsembleStore& store, Real2 x, Real2 y) {
    Real1 xpc = clone(store, x.plus);
    Real1 xmc = clone(store, x.minus);
    Real1 ypc = clone(store, y.plus);
    Real1 ymc = clone(store, y.minus);
    // steps are named to pin the event order in the trace
    Real1 pp = mu1(store, x.plus, y.plus);
    Real1 mm = mu1(store, x.minus, y.minus);
    Real1 plus = sigma1(store, pp, mm);
    Real1 pm = mu1(store, xpc, ymc);
    Real1 mp = mu1(store, xmc, ypc);
    Real1 minus = sigma1(store, pm, mp);
    return {plus, minus};
}

// --- real4 ----------------------------------------------------------------

// In-range values keep denominator 1; larger values store their sign in
// the numerator and 1/|r| in the denominator. All four one-probabilities
// stay in [0,1] for any finite r.
inline Real4 encode_real4(EnsembleStore& store, double r) {
    if (!std::isfinite(r)) throw InvalidArgument("real4 value must be finite");
    if (std::abs(r) <= 1.0) return {encode_real2(store, r), encode_real2(store, 1.0)};
    const double sign = r > 0.0 ? 1.0 : -1.0;
    return {encode_real2(store, sign), encode_real2(store, 1.0 / std::abs(r))};
}

inline double r4(const EnsembleStore& store, Real4 x, double den_floor = kDenFloor) {
    const double num = r2(store, x.num);
    const double den = r2(store, x.den);
    if (std::abs(den) < den_floor) throw DenominatorNearZero("ratio denominator below floor");
    return num / den;
}

inline Real4 clone(EnsembleStore& store, Real4 x) {
    return {clone(store, x.num), clone(store, x.den)};
}

// Product: both components multiply componentwise (and shrink by 1/4).
inline Real4 mul_r4(EnsembleStore& store, Real4 x, Real4 y) {
    store.note_op(op_name::mul_r4);
    Real2 num = mu2(store, x.num, y.num);
    Real2 den = mu2(store, x.den, y.den);
    return {num, den};
}

// Arithmetic mean (x + y) / 2:
//   num = sigma_r2(mu2(x.num, y.den), mu2(x.den, y.num))
//   den = mu2(x.den, y.den)
inline Real4 mean_r4(EnsembleStore& store, Real4 x, Real4 y) {
    Real2 xdc = clone(store, x.den);
    Real2 ydc = clone(store, y.den);
    Real2 cross_a = mu2(store, x.num, y.den);
    Real2 cross_b = mu2(store, x.den, y.num);
    Real2 num = sigma_r2(store, cross_a, cross_b);
    Real2 den = mu2(store, xdc, ydc);
    return {num, den};
}

// Negation swaps the numerator pair; no gates involved.
inline Real4 neg_r4(Real4 x) { return {{x.num.minus, x.num.plus}, x.den}; }

// Inversion swaps numerator and denominator; the old numerator must be
// usable as a denominator, so it is checked against the floor.
inline Real4 inv_r4(const EnsembleStore& store, Real4 x, double den_floor = kDenFloor) {
    if (std::abs(r2(store, x.num)) < den_floor)
        throw DivisorNearZero("inverse of a value too close to zero");
    return {x.den, x.num};
}

// Sum: the mean, scaled back up by a freshly encoded constant 2.
inline Real4 add_r4(EnsembleStore& store, Real4 x, Real4 y) {
    Real4 half_sum = mean_r4(store, x, y);
    Real4 two = encode_real4(store, 2.0);
    return mul_r4(store, half_sum, two);
}

inline Real4 sub_r4(EnsembleStore& store, Real4 x, Real4 y) {
    return add_r4(store, x, neg_r4(y));
}

inline Real4 div_r4(EnsembleStore& store, Real4 x, Real4 y, double den_floor = kDenFloor) {
    Real4 inverse = inv_r4(store, y, den_floor);
    return mul_r4(store, x, inverse);
}

// Simulation-only rescaling: decode the exact ratio and re-encode it.
// Logged as one non-physical event; the replaced ensembles are consumed.
inline Real4 renormalize(EnsembleStore& store, Real4 x, double den_floor = kDenFloor) {
    const double value = r4(store, x, den_floor);
    const std::vector<std::uint64_t> old{x.num.plus.ens.value, x.num.minus.ens.value,
                                         x.den.plus.ens.value, x.den.minus.ens.value};
    for (std::uint64_t id : old) store.consume(EnsembleId{id});

    auto encode_raw = [&store](double v) {
        Real1 plus{store.adopt(DensityMatrix::classical_state({0}))};
        Real1 minus{store.adopt(DensityMatrix::classical_state({0}))};
        // same preparation rotation as encode_real2, without per-qubit events
        auto rotate = [&store](EnsembleId id, double p) {
            const double theta = 2.0 * std::asin(std::sqrt(p));
            DensityMatrix next =
                conjugate(store.state(id), gate_rotation(theta), RegisterIndex{0});
            store.consume(id);
            return store.adopt(std::move(next));
        };
        plus.ens = rotate(plus.ens, (1.0 + v) / 2.0);
        minus.ens = rotate(minus.ens, (1.0 - v) / 2.0);
        return Real2{plus, minus};
    };

    Real4 fresh;
    if (std::abs(value) <= 1.0) {
        fresh = {encode_raw(value), encode_raw(1.0)};
    } else {
        fresh = {encode_raw(value > 0.0 ? 1.0 : -1.0), encode_raw(1.0 / std::abs(value))};
    }
    store.record_event(std::string(event_label::renorm), old,
                       {fresh.num.plus.ens.value, fresh.num.minus.ens.value,
                        fresh.den.plus.ens.value, fresh.den.minus.ens.value},
                       false);
    return fresh;
}

// x^n by square-and-multiply; at most 2*floor(log2 n) multiplications.
// The base is cloned for every use and stays readable. With renorm on,
// components are rescaled after every multiplication, which keeps deep
// powers representable; without it they shrink by 4 per step and
// eventually underflow.
inline Real4 pow_r4(EnsembleStore& store, Real4 x, std::uint64_t n, bool renorm = true,
                    double den_floor = kDenFloor) {
    if (n == 0) return encode_real4(store, 1.0);

    int highest = 63;
    while (((n >> highest) & 1u) == 0) --highest;

    Real4 acc = clone(store, x);
    for (int bit = highest - 1; bit >= 0; --bit) {
        Real4 sq = mul_r4(store, acc, clone(store, acc));
        acc = renorm ? renormalize(store, sq, den_floor) : sq;
        if ((n >> bit) & 1u) {
            Real4 stepped = mul_r4(store, acc, clone(store, x));
            acc = renorm ? renormalize(store, stepped, den_floor) : stepped;
        }
    }
    return acc;
}

}  // namespace qcm
