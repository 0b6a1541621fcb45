#include "gla/dynsys.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

namespace gla {

bool state_finite(const State& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!finite(x[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// DiscreteLinearSystem
// ---------------------------------------------------------------------------

DiscreteLinearSystem::DiscreteLinearSystem(Eigen::VectorXcd eigenvalues,
                                           Eigen::MatrixXcd eigenvectors)
    : eigenvalues_(std::move(eigenvalues)), V_(std::move(eigenvectors)) {
    const Eigen::Index d = eigenvalues_.size();
    if (d < 1) throw std::invalid_argument("system dimension must be >= 1");
    if (V_.rows() != d || V_.cols() != d)
        throw std::invalid_argument("eigenvector matrix must be d x d");
    for (Eigen::Index j = 0; j < d; ++j) {
        if (eigenvalues_[j] == cplx(0.0, 0.0))
            throw std::invalid_argument("eigenvalue " + std::to_string(j + 1) + " is zero");
        if (!finite(eigenvalues_[j]))
            throw std::invalid_argument("eigenvalue " + std::to_string(j + 1) + " is not finite");
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(V_);
    if (!(lu.rcond() >= 1e-12))
        throw std::invalid_argument("eigenvector matrix is numerically singular");
    Vinv_ = lu.solve(Eigen::MatrixXcd::Identity(d, d));
}

DiscreteLinearSystem DiscreteLinearSystem::diagonal(Eigen::VectorXcd eigenvalues) {
    const Eigen::Index d = eigenvalues.size();
    return DiscreteLinearSystem(std::move(eigenvalues), Eigen::MatrixXcd::Identity(d, d));
}

State DiscreteLinearSystem::step(const State& x) const {
    if (x.size() != dim()) throw std::invalid_argument("state dimension mismatch");
    State y = V_ * eigenvalues_.cwiseProduct(Vinv_ * x).eval();
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (!finite(y[i]))
            throw NumericError("non-finite state after step, coordinate " + std::to_string(i + 1),
                               0, std::abs(y[i]));
    return y;
}

State DiscreteLinearSystem::inverse_step(const State& x) const {
    if (x.size() != dim()) throw std::invalid_argument("state dimension mismatch");
    return V_ * eigenvalues_.cwiseInverse().cwiseProduct(Vinv_ * x).eval();
}

bool DiscreteLinearSystem::all_stable() const {
    for (Eigen::Index j = 0; j < eigenvalues_.size(); ++j)
        if (std::abs(eigenvalues_[j]) >= 1.0) return false;
    return true;
}

// ---------------------------------------------------------------------------
// ScalarMonotoneMap
// ---------------------------------------------------------------------------

double ScalarMonotoneMap::inverse(double target) const {
    double a = lo, b = hi;
    double fa = f(a) - target, fb = f(b) - target;
    if (fa > 0 || fb < 0)
        throw DomainError("inverse target " + std::to_string(target) +
                          " outside the image of [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "] under " + label);

    // Newton from the clamped target (charts are near-identity at 0), with
    // the bracket [a,b] as the safeguard. Runs until the residual stops
    // improving, which lands at machine-level relative accuracy; an absolute
    // cutoff would lose the small-|target| tail that peel-off cancellation
    // depends on.
    double y = std::clamp(target, a, b);
    double best = y;
    double best_res = std::abs(f(y) - target);
    const double tol = 1e-15 * std::max(1.0, std::abs(target));
    int stall = 0;
    for (int it = 0; it < 80 && best_res > 0.0; ++it) {
        const double fy = f(y) - target;
        if (fy > 0)
            b = y;
        else
            a = y;
        const double d = df(y);
        double next = (d != 0.0) ? y - fy / d : 0.5 * (a + b);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        y = next;
        const double res = std::abs(f(y) - target);
        if (res < best_res) {
            best_res = res;
            best = y;
            stall = 0;
        } else if (++stall >= 2 && best_res <= 1e-14 * std::max(1.0, std::abs(target))) {
            break;
        }
        if (best_res <= tol && stall >= 1) break;
    }
    return best;
}

ScalarMonotoneMap ScalarMonotoneMap::cubic(double a, double lo, double hi) {
    ScalarMonotoneMap m;
    m.label = "x+" + std::to_string(a) + "x^3";
    m.f = [a](double x) { return x + a * x * x * x; };
    m.df = [a](double x) { return 1.0 + 3.0 * a * x * x; };
    m.lo = lo;
    m.hi = hi;
    return m;
}

// ---------------------------------------------------------------------------
// ConjugateNonlinearSystem
// ---------------------------------------------------------------------------

ConjugateNonlinearSystem::ConjugateNonlinearSystem(DiscreteLinearSystem base,
                                                   std::vector<ScalarMonotoneMap> charts)
    : base_(std::move(base)), charts_(std::move(charts)) {
    if (static_cast<Eigen::Index>(charts_.size()) != base_.dim())
        throw std::invalid_argument("one chart map per coordinate required");
    scale_.resize(charts_.size());
    for (std::size_t i = 0; i < charts_.size(); ++i) {
        const auto& h = charts_[i];
        if (!(h.lo < 0.0 && h.hi > 0.0))
            throw std::invalid_argument("chart domain must contain the fixed point 0");
        if (!(h.f(h.lo) < h.f(h.hi)))
            throw std::invalid_argument("chart map must be increasing on its domain");
        if (std::abs(h.f(0.0)) > 1e-14)
            throw std::invalid_argument("chart map must fix 0");
        const double extent = std::max(std::abs(h.f(h.lo)), std::abs(h.f(h.hi)));
        scale_[i] = (1.0 - 1e-9) / extent;
    }
}

double ConjugateNonlinearSystem::chart_value(Eigen::Index i, const State& x) const {
    const cplx xi = x[i];
    if (std::abs(xi.imag()) > 1e-12 * (1.0 + std::abs(xi.real())))
        throw DomainError("conjugate system states must be real, coordinate " +
                          std::to_string(i + 1));
    const double r = xi.real();
    const auto& h = charts_[i];
    if (r < h.lo || r > h.hi)
        throw DomainError("coordinate " + std::to_string(i + 1) + " left the declared domain [" +
                          std::to_string(h.lo) + ", " + std::to_string(h.hi) + "]");
    return h.f(r);
}

State ConjugateNonlinearSystem::to_linear(const State& x) const {
    State y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = chart_value(i, x);
    return y;
}

State ConjugateNonlinearSystem::to_unit_cube(const State& x) const {
    State y = to_linear(x);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] *= scale_[i];
    return y;
}

State ConjugateNonlinearSystem::step(const State& x) const {
    if (x.size() != dim()) throw std::invalid_argument("state dimension mismatch");
    const State z = base_.step(to_linear(x));
    State out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::abs(z[i].imag()) > 1e-10 * (1.0 + std::abs(z[i].real())))
            throw NumericError("linear image not real, coordinate " + std::to_string(i + 1), 0,
                               std::abs(z[i].imag()));
        out[i] = cplx(charts_[i].inverse(z[i].real()), 0.0);
    }
    return out;
}

// ---------------------------------------------------------------------------
// LimitCycleFlow
// ---------------------------------------------------------------------------

LimitCycleFlow::LimitCycleFlow(double a0, std::vector<double> cos_coeffs,
                               std::vector<double> sin_coeffs)
    : a0_(a0), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
    if (!(a0_ < 0.0))
        throw std::invalid_argument("rho* (mean Fourier coefficient) must be negative");
}

double LimitCycleFlow::rho(double s) const {
    double r = a0_;
    for (std::size_t j = 0; j < cos_.size(); ++j) r += cos_[j] * std::cos((j + 1) * s);
    for (std::size_t j = 0; j < sin_.size(); ++j) r += sin_[j] * std::sin((j + 1) * s);
    return r;
}

double LimitCycleFlow::xi(double s) const {
    // a_j cos(js) integrates to (a_j/j) sin(js); b_j sin(js) to (b_j/j)(1-cos(js)).
    double v = 0.0;
    for (std::size_t j = 0; j < cos_.size(); ++j) {
        const double w = static_cast<double>(j + 1);
        v += cos_[j] / w * std::sin(w * s);
    }
    for (std::size_t j = 0; j < sin_.size(); ++j) {
        const double w = static_cast<double>(j + 1);
        v += sin_[j] / w * (1.0 - std::cos(w * s));
    }
    return v;
}

double LimitCycleFlow::integral_rho(double s0, double t) const {
    return a0_ * t + xi(s0 + t) - xi(s0);
}

std::pair<double, double> LimitCycleFlow::flow(double x0, double s0, double t) const {
    const double x = x0 * std::exp(integral_rho(s0, t));
    return {x, reduce_angle(s0 + t)};
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

State step(const DiscreteSystem& system, const State& x) {
    if (!state_finite(x)) throw std::invalid_argument("state is not finite");
    return system.step(x);
}

Trajectory trajectory(const DiscreteSystem& system, const State& x0, std::size_t n) {
    if (n < 1) throw std::invalid_argument("trajectory length n must be >= 1");
    Trajectory t;
    t.direction = TrajectoryDirection::forward;
    t.states.reserve(n + 1);
    t.states.push_back(x0);
    for (std::size_t k = 0; k < n; ++k) {
        try {
            t.states.push_back(system.step(t.states.back()));
        } catch (const NumericError& e) {
            throw NumericError(std::string("trajectory step failed: ") + e.what(), k + 1,
                               e.magnitude());
        }
    }
    return t;
}

Trajectory inverse_trajectory(const DiscreteLinearSystem& system, const State& x0,
                              std::size_t n) {
    if (n < 1) throw std::invalid_argument("trajectory length n must be >= 1");
    Trajectory t;
    t.direction = TrajectoryDirection::inverse;
    t.states.reserve(n + 1);
    t.states.push_back(x0);
    for (std::size_t k = 1; k <= n; ++k) {
        State next = system.inverse_step(t.states.back());
        for (Eigen::Index i = 0; i < next.size(); ++i) {
            const double m = std::abs(next[i]);
            if (!(m <= kOverflowGuard))
                throw NumericError("inverse iteration overflow guard", k, m);
        }
        t.states.push_back(std::move(next));
    }
    return t;
}

std::vector<State> flow_sample(const LimitCycleFlow& flow, double x0, double s0,
                               const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("time grid is empty");
    if (t_grid.front() < 0.0) throw std::invalid_argument("time grid must start at t >= 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] < t_grid[i - 1])
            throw std::invalid_argument("time grid must be nondecreasing");

    const double s_start = reduce_angle(s0);
    std::vector<State> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        const auto [x, s] = flow.flow(x0, s_start, t);
        State p(2);
        p[0] = cplx(x, 0.0);
        p[1] = cplx(s, 0.0);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace gla
