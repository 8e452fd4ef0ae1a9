#pragma once

#include <cmath>
#include <cstdint>

namespace wick {

/// Counter-based generator: every draw is a hash of (seed, stream,
/// counter), so substreams keyed by path index are independent of worker
/// scheduling and reproducible bit-for-bit.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) {
        key_ = mix(seed + 0x9E3779B97F4A7C15ull);
        key_ = mix(key_ ^ mix(stream + 0xBF58476D1CE4E5B9ull));
    }

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++counter_) * 0x9E3779B97F4A7C15ull;
        return mix(z);
    }

    /// Uniform on (0, 1), never returning an endpoint.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() { return inverse_normal_cdf(next_uniform()); }

    /// Normal quantile function, rational approximations per region with
    /// absolute error around 1e-15; self-contained so every platform and
    /// thread count draws identical variates.
    static double inverse_normal_cdf(double p) {
        const double q = p - 0.5;
        if (std::abs(q) <= 0.425) {
            const double r = 0.180625 - q * q;
            const double num =
                q * (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                          67265.770927008700853) * r + 45921.953931549871457) * r +
                        13731.693765509461125) * r + 1971.5909503065514427) * r +
                      133.14166789178437745) * r + 3.387132872796366608);
            const double den =
                (((((((5226.495278852545703 * r + 28729.085735721942674) * r +
                      39307.89580009271061) * r + 21213.794301586595867) * r +
                    5394.1960214247511077) * r + 687.1870074920579083) * r +
                  42.313330701600911252) * r + 1.0;
            return num / den;
        }
        double r = q < 0.0 ? p : 1.0 - p;
        r = std::sqrt(-std::log(r));
        double value;
        if (r <= 5.0) {
            r -= 1.6;
            const double num =
                (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                      0.24178072517745061177) * r + 1.27045825245236838258) * r +
                    3.64784832476320460504) * r + 5.7694972214606914055) * r +
                  4.6303378461565452959) * r + 1.42343711074968357734);
            const double den =
                (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                      0.0151986665636164571966) * r + 0.14810397642748007459) * r +
                    0.68976733498510000455) * r + 1.6763848301838038494) * r +
                  2.05319162663775882187) * r + 1.0);
            value = num / den;
        } else {
            r -= 5.0;
            const double num =
                (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      0.0012426609473880784386) * r + 0.026532189526576123093) * r +
                    0.29656057182850489123) * r + 1.7848265399172913358) * r +
                  5.4637849111641143699) * r + 6.6579046435011037772);
            const double den =
                (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                      1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
                    0.0148753612908506148525) * r + 0.13692988092273580531) * r +
                  0.59983220655588793769) * r + 1.0);
            value = num / den;
        }
        return q < 0.0 ? -value : value;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace wick
