// Digital readout: finite-shot measurement sampling and statistical
// estimation of encoded values.
//
// Reproducibility contract: all sampling uses std::mt19937_64 (a fully
// specified, portable generator) with uniforms formed from the top 53
// bits; parallel streams derive their seeds with derive_seed(), a
// SplitMix64-style mixing of (base seed, stream index). Identical
// (state, shots, seed) triples give identical samples on any platform.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include <json.hpp>

#include "qcm/arith.hpp"
#include "qcm/store.hpp"

namespace qcm {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline double uniform53(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Deterministic per-stream seed for parallel or repeated trials.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return detail::mix64(base ^ (stream + 1) * 0x9E3779B97F4A7C15ull);
}

struct SampleResult {
    std::uint64_t shots = 0;
    std::uint64_t ones = 0;
    std::uint64_t seed = 0;
};

struct EstimateReport {
    double point = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double level = 0.95;
    std::string method;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const {
        return {{"point", point}, {"ci", {ci_low, ci_high}}, {"level", level},
                {"shots", shots}, {"seed", seed},            {"method", method}};
    }
};

// Measures `shots` qubits drawn from the ensemble; the count of |1>
// outcomes is binomial with the state's one-probability.
inline SampleResult sample(const EnsembleStore& store, EnsembleId a, std::uint64_t shots,
                           std::uint64_t seed) {
    if (shots < 1) throw InvalidArgument("sampling needs at least one shot");
    double p = store.r1(a);
    p = std::min(1.0, std::max(0.0, p));
    std::mt19937_64 rng(seed);
    std::uint64_t ones = 0;
    for (std::uint64_t i = 0; i < shots; ++i)
        if (detail::uniform53(rng) < p) ++ones;
    return {shots, ones, seed};
}

// Two-sided normal quantile. Rational approximation with one Halley
// refinement against erfc; accurate to near machine precision.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile argument must be in (0,1)");
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

// Wilson score interval for a binomial proportion; the point estimate is
// the raw frequency k/N. Behaves sensibly at k = 0 and k = N, where the
// classical states live.
inline EstimateReport estimate_real1(const SampleResult& s, double level = 0.95) {
    const double z = normal_quantile((1.0 + level) / 2.0);
    const double n = static_cast<double>(s.shots);
    const double phat = static_cast<double>(s.ones) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    EstimateReport rep;
    rep.point = phat;
    rep.ci_low = std::max(0.0, center - half);
    rep.ci_high = std::min(1.0, center + half);
    rep.level = level;
    rep.method = "wilson";
    rep.shots = s.shots;
    rep.seed = s.seed;
    return rep;
}

// Plug-in ratio estimate of a (num, den)-encoded value: each of the four
// qubit ensembles is sampled independently (streams 0..3 of `seed`), the
// point is (p1-p2)/(p3-p4), and the interval comes from first-order
// error propagation through the ratio.
inline EstimateReport estimate_real4(const EnsembleStore& store, Real4 x,
                                     std::uint64_t shots_per_qubit, std::uint64_t seed,
                                     double level = 0.95) {
    const double z = normal_quantile((1.0 + level) / 2.0);
    const EnsembleId qubits[4] = {x.num.plus.ens, x.num.minus.ens, x.den.plus.ens,
                                  x.den.minus.ens};
    double phat[4], var[4];
    const double n = static_cast<double>(shots_per_qubit);
    for (int i = 0; i < 4; ++i) {
        SampleResult s = sample(store, qubits[i], shots_per_qubit, derive_seed(seed, i));
        phat[i] = static_cast<double>(s.ones) / n;
        var[i] = phat[i] * (1.0 - phat[i]) / n;
    }
    const double dnum = phat[0] - phat[1];
    const double dden = phat[2] - phat[3];
    const double se_den = std::sqrt(var[2] + var[3]);
    if (std::abs(dden) <= z * se_den)
        throw DenominatorIndistinguishableFromZero(
            "sampled denominator is not distinguishable from zero; increase shots");
    const double point = dnum / dden;
    const double variance = (var[0] + var[1]) / (dden * dden) +
                            dnum * dnum / (dden * dden * dden * dden) * (var[2] + var[3]);
    const double half = z * std::sqrt(variance);
    EstimateReport rep;
    rep.point = point;
    rep.ci_low = point - half;
    rep.ci_high = point + half;
    rep.level = level;
    rep.method = "delta";
    rep.shots = shots_per_qubit;
    rep.seed = seed;
    return rep;
}

}  // namespace qcm
