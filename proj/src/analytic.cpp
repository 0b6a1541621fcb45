#include "gla/analytic.hpp"

#include <Eigen/LU>
#include <cmath>

namespace gla {

AdjointBasis adjoint_basis(const Eigen::MatrixXcd& V) {
    if (V.rows() != V.cols() || V.rows() < 1)
        throw std::invalid_argument("V must be square and nonempty");
    const Eigen::Index d = V.rows();
    const Eigen::MatrixXcd Vh = V.adjoint();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Vh);
    if (!(lu.rcond() >= 1e-12)) throw std::invalid_argument("V is numerically singular");

    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd W = lu.solve(I);
    W += lu.solve(I - Vh * W);  // one refinement step
    return {std::move(W)};
}

Observable principal_eigenfunction(const AdjointBasis& basis, int j) {
    const Eigen::Index d = basis.W.cols();
    if (j < 1 || j > d) throw std::invalid_argument("eigenfunction index out of range");
    const Eigen::VectorXcd w = basis.W.col(j - 1);
    return {[w](const State& y) {
                if (y.size() != w.size()) throw std::invalid_argument("state dimension mismatch");
                KahanSum s;
                for (Eigen::Index i = 0; i < w.size(); ++i) s.add(y[i] * std::conj(w[i]));
                return s.value();
            },
            "phi_" + std::to_string(j)};
}

Observable product_eigenfunction(const AdjointBasis& basis, const std::vector<int>& m) {
    const Eigen::Index d = basis.W.cols();
    if (static_cast<Eigen::Index>(m.size()) != d)
        throw std::invalid_argument("multi-index dimension mismatch");
    for (int mi : m)
        if (mi < 0) throw std::invalid_argument("multi-index must be nonnegative");

    std::string label = "phi^";
    for (Eigen::Index j = 0; j < d; ++j)
        label += (j ? "," : "(") + std::to_string(m[static_cast<std::size_t>(j)]);
    label += ")";
    auto mcopy = m;
    const Eigen::MatrixXcd W = basis.W;
    return {[W, mcopy](const State& y) {
                cplx out(1.0, 0.0);
                for (Eigen::Index j = 0; j < W.cols(); ++j) {
                    const int power = mcopy[static_cast<std::size_t>(j)];
                    if (power == 0) continue;
                    KahanSum s;
                    for (Eigen::Index i = 0; i < W.rows(); ++i) s.add(y[i] * std::conj(W(i, j)));
                    const cplx phi = s.value();
                    for (int p = 0; p < power; ++p) out *= phi;
                }
                return out;
            },
            label};
}

Observable limit_cycle_eigenfunction(const LimitCycleFlow& flow, int m, int n) {
    if (m < 0) throw std::invalid_argument("m must be nonnegative");
    const LimitCycleFlow f = flow;
    return {[f, m, n](const State& p) {
                if (p.size() != 2) throw std::invalid_argument("limit-cycle state is (x, s)");
                const double x = p[0].real();
                const double s = p[1].real();
                double xm = 1.0;
                for (int i = 0; i < m; ++i) xm *= x;
                const double radial = xm * std::exp(-m * f.xi(s));
                return radial * cplx(std::cos(n * s), std::sin(n * s));
            },
            "g" + std::to_string(m) + "h" + std::to_string(n)};
}

Observable pullback(const Observable& obs, const std::vector<StateMap>& chain) {
    auto eval = obs.eval;
    auto maps = chain;
    std::string label = obs.label;
    for (const auto& m : maps) label += "o" + m.label;
    return {[eval, maps](const State& x) {
                State y = x;
                for (auto it = maps.rbegin(); it != maps.rend(); ++it) {
                    if (it->in_domain && !it->in_domain(y))
                        throw DomainError("pullback point left the domain of " + it->label);
                    y = it->apply(y);
                }
                return eval(y);
            },
            label};
}

std::vector<StateMap> conjugacy_chain(const ConjugateNonlinearSystem& system) {
    StateMap h;
    h.label = "h";
    {
        const ConjugateNonlinearSystem* sys = &system;
        h.apply = [sys](const State& x) { return sys->to_linear(x); };
        h.in_domain = [sys](const State& x) {
            if (x.size() != sys->dim()) return false;
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                const auto& c = sys->charts()[static_cast<std::size_t>(i)];
                const double r = x[i].real();
                if (!(r >= c.lo && r <= c.hi)) return false;
                if (std::abs(x[i].imag()) > 1e-12 * (1.0 + std::abs(r))) return false;
            }
            return true;
        };
    }
    StateMap g;
    g.label = "g";
    {
        const std::vector<double> scale = system.unit_scale();
        g.apply = [scale](const State& y) {
            State out = y;
            for (Eigen::Index i = 0; i < out.size(); ++i)
                out[i] *= scale[static_cast<std::size_t>(i)];
            return out;
        };
    }
    return {g, h};
}

}  // namespace gla
