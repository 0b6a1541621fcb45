#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gla/common.hpp"

namespace gla {

// A point of the state space. For discrete systems these are the complex
// coordinates y in C^d; for the planar limit-cycle flow the two entries are
// (x, s) with s kept in [0, 2*pi).
using State = Eigen::VectorXcd;

bool state_finite(const State& x);

// ---------------------------------------------------------------------------
// Discrete systems
// ---------------------------------------------------------------------------

class DiscreteSystem {
public:
    virtual ~DiscreteSystem() = default;
    virtual Eigen::Index dim() const = 0;
    virtual State step(const State& x) const = 0;
};

// y_{k+1} = A y_k with A = V diag(lambda) V^{-1}; V^{-1} is prefactored once.
class DiscreteLinearSystem final : public DiscreteSystem {
public:
    DiscreteLinearSystem(Eigen::VectorXcd eigenvalues, Eigen::MatrixXcd eigenvectors);

    // A = diag(lambda): V = I.
    static DiscreteLinearSystem diagonal(Eigen::VectorXcd eigenvalues);

    Eigen::Index dim() const override { return eigenvalues_.size(); }
    State step(const State& x) const override;
    State inverse_step(const State& x) const;

    const Eigen::VectorXcd& eigenvalues() const { return eigenvalues_; }
    const Eigen::MatrixXcd& eigenvector_matrix() const { return V_; }
    bool all_stable() const;

private:
    Eigen::VectorXcd eigenvalues_;
    Eigen::MatrixXcd V_;
    Eigen::MatrixXcd Vinv_;
};

// A monotone scalar chart component with its derivative and declared domain.
// The inverse is a safeguarded Newton iteration with a bisection fallback on
// the bracket [lo, hi]; it iterates to relative residual at machine level.
struct ScalarMonotoneMap {
    std::string label;
    std::function<double(double)> f;
    std::function<double(double)> df;
    double lo = -1.0;
    double hi = 1.0;

    double operator()(double x) const { return f(x); }
    double inverse(double target) const;

    // h(x) = x + a x^3 on [lo, hi].
    static ScalarMonotoneMap cubic(double a, double lo, double hi);
};

// Phi := h^{-1} o A o h built from closed-form coordinatewise conjugacies, so
// the conjugacy identity h(Phi(x)) = A h(x) holds by construction. States are
// real points of the declared box, carried as complex with zero imaginary
// part. The scaling g maps h(box) into the open unit cube and is offset-free.
class ConjugateNonlinearSystem final : public DiscreteSystem {
public:
    ConjugateNonlinearSystem(DiscreteLinearSystem base, std::vector<ScalarMonotoneMap> charts);

    Eigen::Index dim() const override { return base_.dim(); }
    State step(const State& x) const override;

    State to_linear(const State& x) const;    // h(x)
    State to_unit_cube(const State& x) const; // g(h(x))

    const DiscreteLinearSystem& base() const { return base_; }
    const std::vector<ScalarMonotoneMap>& charts() const { return charts_; }
    const std::vector<double>& unit_scale() const { return scale_; }

private:
    double chart_value(Eigen::Index i, const State& x) const;

    DiscreteLinearSystem base_;
    std::vector<ScalarMonotoneMap> charts_;
    std::vector<double> scale_;
};

// ---------------------------------------------------------------------------
// Planar limit-cycle flow  x' = rho(s) x, s' = 1
// ---------------------------------------------------------------------------

// rho is a finite real Fourier series a0 + sum_j (a_j cos(js) + b_j sin(js));
// rho* = a0 is its mean and must be negative (asymptotically stable cycle).
class LimitCycleFlow {
public:
    LimitCycleFlow(double a0, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);

    double rho_star() const { return a0_; }
    double rho(double s) const;

    // xi(s) = int_0^s (rho - rho*), in closed form; 2*pi periodic, xi(0)=0.
    double xi(double s) const;

    // int_0^t rho(s0 + tau) dtau = a0 t + xi(s0+t) - xi(s0).
    double integral_rho(double s0, double t) const;

    // Exact flow map: (x0 e^{int rho}, (s0+t) mod 2*pi).
    std::pair<double, double> flow(double x0, double s0, double t) const;

    const std::vector<double>& cos_coeffs() const { return cos_; }
    const std::vector<double>& sin_coeffs() const { return sin_; }

private:
    double a0_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

enum class TrajectoryDirection { forward, inverse };

struct Trajectory {
    std::vector<State> states;  // length n+1
    TrajectoryDirection direction = TrajectoryDirection::forward;
};

State step(const DiscreteSystem& system, const State& x);

// states[k] = Phi^k(x0), k = 0..n.
Trajectory trajectory(const DiscreteSystem& system, const State& x0, std::size_t n);

// states[k] = A^{-k} x0, k = 0..n; aborts with NumericError once any
// coordinate modulus exceeds kOverflowGuard.
Trajectory inverse_trajectory(const DiscreteLinearSystem& system, const State& x0, std::size_t n);

// Closed-form flow samples on the grid; no ODE integration error.
std::vector<State> flow_sample(const LimitCycleFlow& flow, double x0, double s0,
                               const std::vector<double>& t_grid);

}  // namespace gla
