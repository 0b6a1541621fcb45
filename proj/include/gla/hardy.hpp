#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gla/dynsys.hpp"
#include "gla/spectra.hpp"

namespace gla {

// A finitely supported polynomial over the observable ring, stored as a
// sparse map from (multi-degree, Fourier index) to a complex coefficient.
//
// fixed_point kind: terms c_k * x^k against the monomial basis; coordinates
// are the principal-eigenfunction chart, so the Koopman action multiplies
// c_k by prod lambda_j^{k_j}.
//
// limit_cycle kind: terms a_{k,n} against the eigenfunction basis
// x^k e^{-k xi(s)} e^{i n s}; the Koopman time-1 action multiplies a_{k,n}
// by e^{k rho* + i n}. Evaluation therefore needs the flow (for xi).
//
// The l^2 polynomial norm is (sum |coeff|^2)^{1/2}; for the limit-cycle kind
// this is Parseval's sum over the Fourier coefficients of each ring element
// under the normalized Haar measure.
class RingPolynomial {
public:
    using TermMap = std::map<MultiIndex, cplx>;

    RingPolynomial() = default;
    explicit RingPolynomial(LatticeKind kind) : kind_(kind) {}

    LatticeKind kind() const { return kind_; }
    const TermMap& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    // Setting an exact zero removes the term (finite support stays minimal).
    void set(const MultiIndex& idx, cplx coeff);
    cplx coeff(const MultiIndex& idx) const;

    bool operator==(const RingPolynomial& o) const {
        return kind_ == o.kind_ && terms_ == o.terms_;
    }

    std::string to_json() const;
    static RingPolynomial from_json(const std::string& text);

private:
    LatticeKind kind_ = LatticeKind::fixed_point;
    TermMap terms_;
};

// (sum_k ||psi_k||^2)^{1/2}; zero iff the polynomial is zero.
double poly_norm(const RingPolynomial& p);

// Evaluate at a state. fixed_point: every coordinate must satisfy |x_i| < 1
// (the open unit polydisc; completions diverge on the boundary, which is
// reported as DomainError). limit_cycle: |x| < 1, s unrestricted, and the
// flow supplies xi.
cplx poly_eval(const RingPolynomial& p, const State& point,
               const LimitCycleFlow* flow = nullptr);

// U p: multiply each coefficient by its lattice eigenvalue. The support never
// grows (R_K is invariant). Every term of p must exist in the lattice.
RingPolynomial koopman_apply(const RingPolynomial& p, const EigenvalueLattice& lattice);

// A Borel set of the complex plane, restricted to the shapes the lattice
// projections need: a closed modulus interval with an optional closed
// argument interval (principal values), or an explicit index set. Endpoint
// ties are included.
struct BorelRegion {
    static BorelRegion everything();
    static BorelRegion modulus_interval(double lo, double hi);
    static BorelRegion modulus_argument(double rlo, double rhi, double alo, double ahi);
    static BorelRegion index_set(std::vector<MultiIndex> indices);
    static BorelRegion single_value(cplx value, double tol = 0.0);

    bool contains(const MultiIndex& idx, cplx value) const;
    BorelRegion intersect(const BorelRegion& other) const;

    std::optional<std::pair<double, double>> modulus;    // [r_lo, r_hi]
    std::optional<std::pair<double, double>> argument;   // [a_lo, a_hi] in (-pi, pi]
    std::optional<std::vector<MultiIndex>> indices;
    std::optional<std::pair<cplx, double>> value_ball;   // |z - value| <= tol
};

// E(D) p: keep exactly the coefficients whose lattice eigenvalue lies in the
// region, drop the rest. Idempotent, multiplicative over intersections, norm
// nonincreasing, and commutes with koopman_apply -- all exactly, because it
// is coefficient selection.
RingPolynomial spectral_projection(const RingPolynomial& p, const BorelRegion& region,
                                   const EigenvalueLattice& lattice);

}  // namespace gla
