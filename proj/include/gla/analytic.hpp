#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gla/observable.hpp"
#include "gla/spectra.hpp"

namespace gla {

// Adjoint basis {w_j} to the eigenvector columns {v_j}: <v_j, w_k> = delta_jk
// with the inner product conjugating its second argument, i.e. W = (V*)^{-1}.
struct AdjointBasis {
    Eigen::MatrixXcd W;  // columns w_j
};

// LU-based inverse of V* with one step of iterative refinement; throws on
// condition numbers past 1e12.
AdjointBasis adjoint_basis(const Eigen::MatrixXcd& V);

// phi_j(y) = <y, w_j>, the principal eigenfunction at lambda_j; j is 1-based.
Observable principal_eigenfunction(const AdjointBasis& basis, int j);

// prod_j phi_j^{m_j}, an eigenfunction at prod_j lambda_j^{m_j}.
Observable product_eigenfunction(const AdjointBasis& basis, const std::vector<int>& m);

// g_m h_n on the limit-cycle chart (x, s):
//   g_m(x,s) = x^m e^{-m xi(s)},  h_n(x,s) = e^{i n s},
// an eigenfunction of the Koopman semigroup at exponent m rho* + i n.
Observable limit_cycle_eigenfunction(const LimitCycleFlow& flow, int m, int n);

// obs composed with the chain applied innermost-last: pullback(obs, {g, h})
// evaluates obs(g(h(x))). Domain violations raise DomainError.
Observable pullback(const Observable& obs, const std::vector<StateMap>& chain);

// The chain maps of a synthetic conjugate system: {g, h} with h the
// coordinatewise charts and g the scaling onto the open unit cube.
std::vector<StateMap> conjugacy_chain(const ConjugateNonlinearSystem& system);

}  // namespace gla
