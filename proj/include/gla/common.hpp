#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gla {

using cplx = std::complex<double>;

// Coordinate/term magnitudes past this are treated as overflow. Chosen so that
// weights, low-degree observable values and their products stay representable
// in double precision.
inline constexpr double kOverflowGuard = 1e150;

// Incrementally maintained powers are recomputed from scratch every this many
// steps, which bounds multiplicative drift for n up to 1e8.
inline constexpr int kWeightRenormInterval = 64;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Overflow guards, weight overflow, divergence diagnostics. Carries the step
// index at which the condition was detected and the attained magnitude.
class NumericError : public Error {
public:
    NumericError(const std::string& what, std::size_t step, double magnitude)
        : Error(what + " (step " + std::to_string(step) + ", magnitude "
                + std::to_string(magnitude) + ")"),
          step_(step),
          magnitude_(magnitude) {}

    std::size_t step() const noexcept { return step_; }
    double magnitude() const noexcept { return magnitude_; }

private:
    std::size_t step_;
    double magnitude_;
};

// Point left the declared domain (unit polydisc, conjugacy box, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Config validation; collects every issue, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> issues)
        : Error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "config validation failed:";
        for (const auto& e : v) {
            s += "\n  - ";
            s += e;
        }
        return s;
    }
    std::vector<std::string> issues_;
};

// ---------------------------------------------------------------------------
// Compensated summation
// ---------------------------------------------------------------------------

// Kahan compensated accumulator, componentwise over re/im. Summation order is
// whatever the caller feeds; all library loops feed ascending index order so
// results are bitwise reproducible.
class KahanSum {
public:
    void add(cplx x) noexcept {
        addPart(x.real(), sumRe_, compRe_);
        addPart(x.imag(), sumIm_, compIm_);
    }
    cplx value() const noexcept { return {sumRe_, sumIm_}; }

private:
    static void addPart(double x, double& sum, double& comp) noexcept {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double sumRe_ = 0, sumIm_ = 0, compRe_ = 0, compIm_ = 0;
};

// ---------------------------------------------------------------------------
// Scaled complex arithmetic
// ---------------------------------------------------------------------------
//
// Powers like lambda^{-k} leave the double range long before the weighted
// terms lambda^{-k} f(Phi^k x0) do (the two decay/grow in lockstep on
// eigenfunction data), so weights are carried as mantissa * 2^exponent and
// only the final per-term product is materialized as a double.

struct ScaledCplx {
    cplx mantissa{1.0, 0.0};
    std::int64_t exp2 = 0;  // value = mantissa * 2^exp2

    // Keeps max(|re|,|im|) of the mantissa in [0.5, 1).
    void normalize() noexcept {
        const double m = std::max(std::abs(mantissa.real()), std::abs(mantissa.imag()));
        if (m == 0.0) {
            exp2 = 0;
            return;
        }
        int e = 0;
        (void)std::frexp(m, &e);
        mantissa = {std::ldexp(mantissa.real(), -e), std::ldexp(mantissa.imag(), -e)};
        exp2 += e;
    }

    ScaledCplx& operator*=(const ScaledCplx& o) noexcept {
        mantissa *= o.mantissa;
        exp2 += o.exp2;
        normalize();
        return *this;
    }

    ScaledCplx& operator*=(cplx z) noexcept {
        mantissa *= z;
        normalize();
        return *this;
    }

    // Exponent-aligned addition; contributions more than ~2^200 below the
    // larger operand vanish, exactly as they would after rounding.
    ScaledCplx& operator+=(const ScaledCplx& o) noexcept {
        if (o.mantissa == cplx(0.0, 0.0)) return *this;
        if (mantissa == cplx(0.0, 0.0)) {
            *this = o;
            return *this;
        }
        const std::int64_t shift = o.exp2 - exp2;
        if (shift > 200) {
            *this = o;
            return *this;
        }
        if (shift >= -200) {
            const int s = static_cast<int>(shift);
            mantissa += cplx(std::ldexp(o.mantissa.real(), s), std::ldexp(o.mantissa.imag(), s));
            normalize();
        }
        return *this;
    }

    // Materialize scaled * f as a double pair; components that underflow
    // flush to zero, overflow is reported through isfinite on the result.
    cplx times(cplx f) const noexcept {
        const cplx p = mantissa * f;
        const int e = static_cast<int>(std::clamp<std::int64_t>(exp2, -100000, 100000));
        return {std::ldexp(p.real(), e), std::ldexp(p.imag(), e)};
    }

    double abs() const noexcept {
        return std::ldexp(std::abs(mantissa),
                          static_cast<int>(std::clamp<std::int64_t>(exp2, -100000, 100000)));
    }
};

// base^k by binary exponentiation on the scaled representation. The base is
// the exactly-representable input, so the relative error is O(log2|k|) ulp
// instead of the O(|k|) ulp an incremental product accumulates.
inline ScaledCplx scaled_pow(cplx base, std::int64_t k) {
    ScaledCplx acc;  // 1
    ScaledCplx b;
    b.mantissa = base;
    b.normalize();
    std::uint64_t e = static_cast<std::uint64_t>(k < 0 ? -k : k);
    while (e != 0) {
        if (e & 1u) acc *= b;
        b *= b;
        e >>= 1;
    }
    if (k < 0) {
        // 1/(m*2^e) = (conj(m)/|m|^2) * 2^{-e}
        const double n2 = std::norm(acc.mantissa);
        acc.mantissa = std::conj(acc.mantissa) / n2;
        acc.exp2 = -acc.exp2;
        acc.normalize();
    }
    return acc;
}

inline bool finite(cplx z) noexcept {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Reduce an angle to [0, 2*pi).
inline double reduce_angle(double s) noexcept {
    constexpr double two_pi = 6.283185307179586476925286766559;
    double r = std::fmod(s, two_pi);
    if (r < 0) r += two_pi;
    if (r >= two_pi) r = 0;  // fmod can land exactly on two_pi after the add
    return r;
}

}  // namespace gla
