#pragma once

#include <string>
#include <vector>

#include "gla/common.hpp"

namespace gla {

enum class LatticeKind { fixed_point, limit_cycle };

// Index of a lattice entry: the multi-degree k (one exponent per generator
// eigenvalue for fixed points, the single x-degree for limit cycles) and the
// Fourier index n (limit cycles only, 0 otherwise).
struct MultiIndex {
    std::vector<int> k;
    int n = 0;

    int degree() const {
        int d = 0;
        for (int v : k) d += v;
        return d;
    }
    bool operator==(const MultiIndex& o) const { return k == o.k && n == o.n; }
    bool operator<(const MultiIndex& o) const {
        if (k != o.k) return k < o.k;
        return n < o.n;
    }
    std::string str() const;
};

struct LatticeEntry {
    MultiIndex index;
    cplx value;
    double modulus = 0.0;  // ring radius; shared bitwise by a whole ring
};

// Finite truncation of the countable point spectrum: products of generator
// eigenvalues (fixed point) or e^{k rho* + i n} (limit cycle).
struct EigenvalueLattice {
    LatticeKind kind = LatticeKind::fixed_point;
    int K = 0;  // max multi-degree
    int N = 0;  // max |n|, limit cycle only
    std::vector<LatticeEntry> entries;

    const LatticeEntry* find(const MultiIndex& idx) const;
};

struct Circle {
    double radius = 0.0;
    std::vector<LatticeEntry> members;
};

// Circles of equal eigenvalue modulus, sorted by strictly decreasing radius.
// This is the peel-off schedule GLA consumes.
struct CircleDecomposition {
    std::vector<Circle> circles;
    double grouping_tolerance = 1e-9;

    // Index of the circle holding the given lattice index; -1 if absent.
    int circle_of(const MultiIndex& idx) const;
    const LatticeEntry* find(const MultiIndex& idx) const;

    // The decomposition that remains after removing the top `count` circles.
    CircleDecomposition without_top(std::size_t count) const;

    // Every distinct eigenvalue value, top circle first.
    std::vector<cplx> distinct_values() const;
};

inline constexpr double kDefaultGroupingTol = 1e-9;

// Entries { (k, prod lambda_j^{k_j}) : |k| <= K }; includes k = 0 -> 1.
EigenvalueLattice fixed_point_lattice(const std::vector<cplx>& eigenvalues, int K);

// Entries { ((k,n), e^{k rho*} e^{i n}) : 0 <= k <= K, |n| <= N }. The
// modulus e^{k rho*} is computed once per k so equal-k entries share it
// exactly.
EigenvalueLattice limit_cycle_lattice(double rho_star, int K, int N);

// Groups lattice entries into circles of equal modulus (relative tolerance).
// Throws Error when adjacent groups are not separated by more than the
// tolerance -- the numeric proxy for failure of the isolated-circle
// hypothesis.
CircleDecomposition decompose_circles(const EigenvalueLattice& lattice,
                                      double tol = kDefaultGroupingTol);

// The largest-radius circle.
const Circle& peripheral(const CircleDecomposition& decomposition);

}  // namespace gla
