#include "gla/project.hpp"

#include <algorithm>
#include <cmath>

namespace gla {

namespace {

// Terms rising above the leading term's level by more than this end the
// averaging window. On lattice-representable data the weighted filtered terms
// are constant, so the full schedule survives; growth only appears when
// amplified round-off (or off-lattice mass above the target circle) takes
// over, and admitting it would poison the mean. Decaying terms are kept --
// they are exactly what the Cesaro average suppresses.
constexpr double kWindowGrowthTol = 1e-10;

struct FilteredEstimate {
    cplx value{0.0, 0.0};
    std::size_t window = 0;
    double sup_coeff = 0.0;  // max |v_k| / |p| over the window
};

// Deterministic cascade order: largest-modulus roots first.
void sort_roots(std::vector<cplx>& roots) {
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        const double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma > mb;
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
}

// Laplace average at zeta of the sample sequence run through the annihilator
// prod_i (sigma - root_i), normalized by prod_i (zeta - root_i). A component
// c * root_i^k is removed exactly; the component c * zeta^k passes through as
// a constant weighted term equal to c * prod(zeta - root_i).
FilteredEstimate filtered_average(std::span<const cplx> samples, cplx zeta,
                                  std::vector<cplx> roots) {
    if (samples.size() <= roots.size())
        throw std::invalid_argument(
            "n too small for the peel schedule: need more samples than distinct eigenvalues");

    sort_roots(roots);
    std::vector<cplx> seq(samples.begin(), samples.end());
    // Below the normal double floor the stored bits no longer track the
    // trajectory; flushing makes the end of usable data an exact zero, which
    // the window rule treats as the end of the record.
    constexpr double subnormal = std::numeric_limits<double>::min();
    for (cplx& s : seq) {
        double re = s.real(), im = s.imag();
        if (std::abs(re) < subnormal) re = 0.0;
        if (std::abs(im) < subnormal) im = 0.0;
        s = {re, im};
    }
    std::size_t len = seq.size();
    cplx p(1.0, 0.0);
    for (cplx root : roots) {
        for (std::size_t k = 0; k + 1 < len; ++k) seq[k] = seq[k + 1] - root * seq[k];
        --len;
        p *= (zeta - root);
    }

    // Weighted terms v_k = zeta^{-k} seq_k; constant on representable data.
    const cplx zeta_inv = cplx(1.0, 0.0) / zeta;
    ScaledCplx weight;
    std::vector<cplx> v;
    v.reserve(len);
    for (std::size_t k = 0; k < len; ++k) {
        if (k != 0) {
            if (k % static_cast<std::size_t>(kWeightRenormInterval) == 0)
                weight = scaled_pow(zeta, -static_cast<std::int64_t>(k));
            else
                weight *= zeta_inv;
        }
        v.push_back(weight.times(seq[k]));
    }

    const cplx v0 = v[0];
    if (!finite(v0)) throw NumericError("non-finite leading term in GLA average", 0, std::abs(v0));
    const double level_cap = std::abs(v0) * (1.0 + kWindowGrowthTol) + 1e-280;

    FilteredEstimate est;
    KahanSum mean;
    const bool nonzero_lead = v0 != cplx(0.0, 0.0);
    for (std::size_t k = 0; k < len; ++k) {
        if (!finite(v[k]) || std::abs(v[k]) > level_cap) break;
        if (nonzero_lead && v[k] == cplx(0.0, 0.0)) break;  // samples left the double range
        mean.add(v[k]);
        est.sup_coeff = std::max(est.sup_coeff, std::abs(v[k]));
        ++est.window;
    }
    est.value = mean.value() / static_cast<double>(est.window) / p;
    est.sup_coeff /= std::abs(p);
    return est;
}

std::vector<cplx> circle_distinct_values(const Circle& circle) {
    std::vector<cplx> vals;
    for (const auto& m : circle.members) {
        bool seen = false;
        for (cplx v : vals)
            if (v == m.value) {
                seen = true;
                break;
            }
        if (!seen) vals.push_back(m.value);
    }
    return vals;
}

std::vector<cplx> roots_excluding(const std::vector<cplx>& all, cplx value) {
    std::vector<cplx> roots;
    roots.reserve(all.size());
    for (cplx v : all)
        if (v != value) roots.push_back(v);
    return roots;
}

// residual[k] -= coeff * mu^k, ascending k, scaled powers.
void subtract_component(std::vector<cplx>& residual, cplx mu, cplx coeff) {
    ScaledCplx power;
    for (std::size_t k = 0; k < residual.size(); ++k) {
        if (k != 0) {
            if (k % static_cast<std::size_t>(kWeightRenormInterval) == 0)
                power = scaled_pow(mu, static_cast<std::int64_t>(k));
            else
                power *= mu;
        }
        residual[k] -= power.times(coeff);
    }
}

// Subtract a whole circle's components in a canonical value order, so the
// arithmetic is identical under any permutation of the circle's member list
// (subtractions commute exactly, not just to round-off).
void subtract_circle(std::vector<cplx>& residual,
                     std::vector<std::pair<cplx, cplx>> estimates) {
    std::sort(estimates.begin(), estimates.end(),
              [](const std::pair<cplx, cplx>& a, const std::pair<cplx, cplx>& b) {
                  if (a.first.real() != b.first.real()) return a.first.real() > b.first.real();
                  return a.first.imag() > b.first.imag();
              });
    for (const auto& [mu, coeff] : estimates) subtract_component(residual, mu, coeff);
}

}  // namespace

std::vector<cplx> sample_observable(const DiscreteSystem& system, const Observable& f,
                                    const State& x0, std::size_t n) {
    if (n < 1) throw std::invalid_argument("sample count must be >= 1");
    std::vector<cplx> samples;
    samples.reserve(n);
    State x = x0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k != 0) x = system.step(x);
        const cplx fx = f(x);
        if (!finite(fx))
            throw NumericError("observable not finite along trajectory", k, std::abs(fx));
        samples.push_back(fx);
    }
    return samples;
}

GLAResult project_samples(std::span<const cplx> samples, cplx lambda,
                          const CircleDecomposition& decomposition) {
    if (decomposition.circles.empty()) throw std::invalid_argument("decomposition is empty");
    if (lambda == cplx(0.0, 0.0)) throw std::invalid_argument("lambda must be nonzero");

    const std::vector<cplx> all_values = decomposition.distinct_values();
    const double r_target = std::abs(lambda);
    const double tol = decomposition.grouping_tolerance;

    GLAResult result;
    std::vector<cplx> residual(samples.begin(), samples.end());

    // Peel every circle strictly above the target radius, descending. All
    // estimates for one circle are taken before any of its subtractions, so
    // within-circle order only permutes commuting subtractions.
    std::size_t c = 0;
    for (; c < decomposition.circles.size(); ++c) {
        const Circle& circle = decomposition.circles[c];
        if (circle.radius <= r_target * (1.0 + tol)) break;
        std::vector<std::pair<cplx, cplx>> estimates;
        for (cplx mu : circle_distinct_values(circle)) {
            const auto est = filtered_average(residual, mu, roots_excluding(all_values, mu));
            estimates.emplace_back(mu, est.value);
        }
        for (const auto& [mu, coeff] : estimates) result.peel_trace.emplace_back(mu, coeff);
        subtract_circle(residual, estimates);
    }

    const auto est = filtered_average(residual, lambda, roots_excluding(all_values, lambda));
    result.value = est.value;
    result.n = est.window;
    result.residual_sup = est.sup_coeff;

    // Next circle strictly below the target radius, if any.
    for (std::size_t j = c; j < decomposition.circles.size(); ++j) {
        const double r = decomposition.circles[j].radius;
        if (r < r_target * (1.0 - tol)) {
            result.cesaro_bound = (1.0 / static_cast<double>(result.n)) /
                                  (1.0 - r / r_target) * result.residual_sup;
            break;
        }
    }
    return result;
}

GLAResult gla_project_at(const DiscreteSystem& system, const Observable& f, const State& x0,
                         cplx lambda, const CircleDecomposition& decomposition, std::size_t n) {
    const auto samples = sample_observable(system, f, x0, n);
    return project_samples(samples, lambda, decomposition);
}

GLAResult gla_project(const DiscreteSystem& system, const Observable& f, const State& x0,
                      const MultiIndex& target, const CircleDecomposition& decomposition,
                      std::size_t n) {
    const LatticeEntry* entry = decomposition.find(target);
    if (entry == nullptr)
        throw std::invalid_argument("target index " + target.str() +
                                    " is not in the decomposition");
    return gla_project_at(system, f, x0, entry->value, decomposition, n);
}

SweepResult gla_sweep(const DiscreteSystem& system, const Observable& f, const State& x0,
                      const CircleDecomposition& decomposition, std::size_t n) {
    if (decomposition.circles.empty()) throw std::invalid_argument("decomposition is empty");
    const auto samples = sample_observable(system, f, x0, n);
    const std::vector<cplx> all_values = decomposition.distinct_values();

    SweepResult sweep;
    std::vector<cplx> residual = samples;
    std::vector<std::pair<cplx, cplx>> trace;
    for (const Circle& circle : decomposition.circles) {
        std::vector<std::pair<cplx, GLAResult>> circle_results;
        for (cplx mu : circle_distinct_values(circle)) {
            const auto est = filtered_average(residual, mu, roots_excluding(all_values, mu));
            GLAResult r;
            r.value = est.value;
            r.n = est.window;
            r.residual_sup = est.sup_coeff;
            r.peel_trace = trace;
            const double r_target = std::abs(mu);
            for (const Circle& lower : decomposition.circles)
                if (lower.radius < r_target * (1.0 - decomposition.grouping_tolerance)) {
                    r.cesaro_bound = (1.0 / static_cast<double>(r.n)) /
                                     (1.0 - lower.radius / r_target) * r.residual_sup;
                    break;
                }
            circle_results.emplace_back(mu, std::move(r));
        }
        std::vector<std::pair<cplx, cplx>> estimates;
        for (auto& [mu, r] : circle_results) {
            estimates.emplace_back(mu, r.value);
            trace.emplace_back(mu, r.value);
            sweep.projections.emplace_back(mu, std::move(r));
        }
        subtract_circle(residual, estimates);
    }

    // What remains of the samples after removing every projected component.
    std::vector<cplx> recon = samples;
    for (const auto& [mu, r] : sweep.projections) subtract_component(recon, mu, r.value);
    for (const cplx& v : recon)
        sweep.reconstruction_residual = std::max(sweep.reconstruction_residual, std::abs(v));
    return sweep;
}

GLAResult inverse_gla(const DiscreteLinearSystem& system, const Observable& f, const State& x0,
                      const MultiIndex& target, const CircleDecomposition& decomposition,
                      std::size_t n) {
    const LatticeEntry* entry = decomposition.find(target);
    if (entry == nullptr)
        throw std::invalid_argument("target index " + target.str() +
                                    " is not in the decomposition");
    if (n < 1) throw std::invalid_argument("sample count must be >= 1");
    const cplx lambda = entry->value;

    // Longest guard-safe prefix of the inverse orbit; iterates grow like
    // |lambda_min|^{-k} so the requested n is often unattainable in doubles.
    std::vector<cplx> samples;
    samples.reserve(std::min<std::size_t>(n, 4096));
    State x = x0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k != 0) {
            State next = system.inverse_step(x);
            bool guarded = false;
            for (Eigen::Index i = 0; i < next.size(); ++i)
                if (!(std::abs(next[i]) <= kOverflowGuard)) guarded = true;
            if (guarded) break;
            x = std::move(next);
        }
        const cplx fx = f(x);
        if (!finite(fx)) break;
        samples.push_back(fx);
    }

    const std::vector<cplx> all_values = decomposition.distinct_values();
    if (samples.size() <= all_values.size())
        throw NumericError("insufficient inverse samples under the overflow guard",
                           samples.size(), kOverflowGuard);

    // Components of f(A^{-k}x0) are gamma^{-k}: work with zeta = 1/lambda and
    // roots 1/gamma, so the usual forward machinery applies (weights
    // zeta^{-k} = lambda^{k}).
    const cplx zeta = cplx(1.0, 0.0) / lambda;
    std::vector<cplx> inv_roots;
    for (cplx v : all_values)
        if (v != lambda) inv_roots.push_back(cplx(1.0, 0.0) / v);

    GLAResult result;
    const auto est = filtered_average(samples, zeta, inv_roots);
    result.value = est.value;
    result.n = est.window;
    result.residual_sup = est.sup_coeff;

    // Trace: smaller-modulus circles, ascending. The annihilator removes them
    // from the target average algebraically, so their estimates are reported
    // without materializing a residual of exponentially large terms.
    const double r_target = std::abs(lambda);
    const double tol = decomposition.grouping_tolerance;
    for (auto it = decomposition.circles.rbegin(); it != decomposition.circles.rend(); ++it) {
        if (it->radius >= r_target * (1.0 - tol)) continue;
        for (cplx mu : circle_distinct_values(*it)) {
            std::vector<cplx> mu_roots;
            for (cplx v : all_values)
                if (v != mu) mu_roots.push_back(cplx(1.0, 0.0) / v);
            const auto mu_est = filtered_average(samples, cplx(1.0, 0.0) / mu, mu_roots);
            result.peel_trace.emplace_back(mu, mu_est.value);
        }
    }

    // Contamination decays with ratio r_target / r_next_above.
    const Circle* above = nullptr;
    for (const Circle& circle : decomposition.circles) {
        if (circle.radius > r_target * (1.0 + tol)) above = &circle;
    }
    if (above != nullptr)
        result.cesaro_bound = (1.0 / static_cast<double>(result.n)) /
                              (1.0 - r_target / above->radius) * result.residual_sup;
    return result;
}

}  // namespace gla
