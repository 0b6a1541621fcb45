#include "gla/laplace.hpp"

#include <cmath>

namespace gla {

namespace {

// Drops components whose magnitude has fallen below the normal double range;
// what the bits say there is rounding noise, not the trajectory.
cplx flush_subnormal(cplx z) noexcept {
    constexpr double floor = std::numeric_limits<double>::min();
    double re = z.real(), im = z.imag();
    if (std::abs(re) < floor) re = 0.0;
    if (std::abs(im) < floor) im = 0.0;
    return {re, im};
}

template <typename SampleSpan, typename TermFn>
cplx weighted_mean(SampleSpan samples, cplx lambda, TermFn make_term) {
    const std::size_t n = samples.size();
    if (n < 1) throw std::invalid_argument("need at least one sample");
    if (lambda == cplx(0.0, 0.0)) throw std::invalid_argument("lambda must be nonzero");

    const cplx lambda_inv = cplx(1.0, 0.0) / lambda;
    ScaledCplx weight;  // lambda^{-k}
    KahanSum sum;
    for (std::size_t k = 0; k < n; ++k) {
        if (k != 0) {
            if (k % static_cast<std::size_t>(kWeightRenormInterval) == 0)
                weight = scaled_pow(lambda, -static_cast<std::int64_t>(k));
            else
                weight *= lambda_inv;
        }
        const cplx term = make_term(weight, samples[k]);
        const double mag = std::max(std::abs(term.real()), std::abs(term.imag()));
        if (!(mag <= kOverflowGuard))
            throw NumericError("weight overflow in Laplace average", k, mag);
        sum.add(term);
    }
    return sum.value() / static_cast<double>(n);
}

}  // namespace

cplx laplace_average(std::span<const cplx> samples, cplx lambda) {
    return weighted_mean(samples, lambda, [](const ScaledCplx& w, cplx s) {
        return w.times(flush_subnormal(s));
    });
}

cplx laplace_average(std::span<const ComplexSample> samples, cplx lambda) {
    return weighted_mean(samples, lambda, [](const ScaledCplx& w, const ComplexSample& s) {
        ScaledCplx t = w;
        t *= s;
        return t.times(cplx(1.0, 0.0));
    });
}

cplx continuous_laplace_average(std::span<const TimedSample> flow_samples,
                                cplx lambda_exponent) {
    const std::size_t m = flow_samples.size();
    if (m < 2) throw std::invalid_argument("need at least two samples");
    if (std::abs(flow_samples[0].t) > 1e-12)
        throw std::invalid_argument("time grid must start at t = 0");

    const double dt = flow_samples[1].t - flow_samples[0].t;
    if (!(dt > 0.0)) throw std::invalid_argument("time grid must be increasing");
    for (std::size_t j = 1; j < m; ++j) {
        const double step = flow_samples[j].t - flow_samples[j - 1].t;
        if (std::abs(step - dt) > 1e-9 * dt)
            throw std::invalid_argument("time grid must be uniform");
    }
    const double alpha = flow_samples.back().t;

    const double first_mag = std::abs(flow_samples[0].value);
    const double divergence_threshold = 1e6 * std::max(first_mag, 1e-300);

    KahanSum integral;  // trapezoid sum of e^{-t z} f(t), scaled by dt at the end
    double prev_avg = 0.0;
    int monotone_growth = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const double t = flow_samples[j].t;
        const cplx w = std::exp(-t * lambda_exponent);
        cplx term = w * flow_samples[j].value;
        if (j == 0 || j + 1 == m) term *= 0.5;
        if (!finite(term))
            throw NumericError("non-finite integrand in continuous average", j, std::abs(term));
        integral.add(term);

        if (t > 0.0) {
            const double avg = std::abs(integral.value()) * dt / t;
            monotone_growth = (avg > prev_avg) ? monotone_growth + 1 : 0;
            if (avg > divergence_threshold && monotone_growth >= 3)
                throw NumericError("target modulus below sample growth", j, avg);
            prev_avg = avg;
        }
    }
    return integral.value() * (dt / alpha);
}

}  // namespace gla
