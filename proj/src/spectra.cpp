#include "gla/spectra.hpp"

#include <algorithm>
#include <cmath>

namespace gla {

std::string MultiIndex::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(k[i]);
    }
    if (n != 0) {
        s += ";";
        s += std::to_string(n);
    }
    s += ")";
    return s;
}

const LatticeEntry* EigenvalueLattice::find(const MultiIndex& idx) const {
    for (const auto& e : entries)
        if (e.index == idx) return &e;
    return nullptr;
}

int CircleDecomposition::circle_of(const MultiIndex& idx) const {
    for (std::size_t c = 0; c < circles.size(); ++c)
        for (const auto& m : circles[c].members)
            if (m.index == idx) return static_cast<int>(c);
    return -1;
}

const LatticeEntry* CircleDecomposition::find(const MultiIndex& idx) const {
    for (const auto& circle : circles)
        for (const auto& m : circle.members)
            if (m.index == idx) return &m;
    return nullptr;
}

CircleDecomposition CircleDecomposition::without_top(std::size_t count) const {
    CircleDecomposition d;
    d.grouping_tolerance = grouping_tolerance;
    if (count < circles.size())
        d.circles.assign(circles.begin() + static_cast<std::ptrdiff_t>(count), circles.end());
    return d;
}

std::vector<cplx> CircleDecomposition::distinct_values() const {
    std::vector<cplx> vals;
    for (const auto& circle : circles)
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

// ---------------------------------------------------------------------------

namespace {

// Enumerate multi-indices with |k| <= K in lexicographic order and attach the
// product of eigenvalue powers. Degree-major order keeps the constant entry
// first, which the tests rely on for readability only.
void enumerate_fixed(const std::vector<cplx>& lambda, int K, std::vector<int>& k,
                     std::size_t pos, int remaining, cplx value,
                     std::vector<LatticeEntry>& out) {
    if (pos == k.size()) {
        out.push_back({MultiIndex{k, 0}, value, std::abs(value)});
        return;
    }
    cplx p(1.0, 0.0);
    for (int d = 0; d <= remaining; ++d) {
        k[pos] = d;
        enumerate_fixed(lambda, K, k, pos + 1, remaining - d, value * p, out);
        p *= lambda[pos];
    }
    k[pos] = 0;
}

}  // namespace

EigenvalueLattice fixed_point_lattice(const std::vector<cplx>& eigenvalues, int K) {
    if (eigenvalues.empty()) throw std::invalid_argument("need at least one eigenvalue");
    if (K < 0) throw std::invalid_argument("truncation K must be >= 0");
    for (std::size_t j = 0; j < eigenvalues.size(); ++j)
        if (eigenvalues[j] == cplx(0.0, 0.0))
            throw std::invalid_argument("eigenvalue " + std::to_string(j + 1) + " is zero");

    EigenvalueLattice lat;
    lat.kind = LatticeKind::fixed_point;
    lat.K = K;
    std::vector<int> k(eigenvalues.size(), 0);
    enumerate_fixed(eigenvalues, K, k, 0, K, cplx(1.0, 0.0), lat.entries);
    return lat;
}

EigenvalueLattice limit_cycle_lattice(double rho_star, int K, int N) {
    if (!(rho_star < 0.0)) throw std::invalid_argument("rho* must be negative");
    if (K < 0 || N < 0) throw std::invalid_argument("truncations must be >= 0");

    EigenvalueLattice lat;
    lat.kind = LatticeKind::limit_cycle;
    lat.K = K;
    lat.N = N;
    for (int k = 0; k <= K; ++k) {
        const double modulus = std::exp(k * rho_star);  // shared by the whole ring
        for (int n = -N; n <= N; ++n) {
            const cplx value = modulus * cplx(std::cos(n), std::sin(n));
            lat.entries.push_back({MultiIndex{{k}, n}, value, modulus});
        }
    }
    return lat;
}

CircleDecomposition decompose_circles(const EigenvalueLattice& lattice, double tol) {
    if (lattice.entries.empty()) throw std::invalid_argument("lattice is empty");
    if (!(tol > 0.0)) throw std::invalid_argument("grouping tolerance must be positive");

    std::vector<LatticeEntry> sorted = lattice.entries;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const LatticeEntry& a, const LatticeEntry& b) {
                         return a.modulus > b.modulus;
                     });

    CircleDecomposition d;
    d.grouping_tolerance = tol;
    for (const auto& e : sorted) {
        const double m = e.modulus;
        if (!d.circles.empty()) {
            Circle& cur = d.circles.back();
            if (cur.radius - m <= tol * cur.radius) {
                cur.members.push_back(e);
                continue;
            }
            // Gap check: the smallest member of the finished circle must sit
            // clearly above the new one, or grouping is ambiguous.
            const double low = cur.members.back().modulus;
            if (low - m <= tol * cur.radius)
                throw Error("ambiguous circle grouping: moduli " + std::to_string(low) + " and " +
                            std::to_string(m) + " are separated by less than the tolerance");
        }
        Circle c;
        c.radius = m;
        c.members.push_back(e);
        d.circles.push_back(std::move(c));
    }
    return d;
}

const Circle& peripheral(const CircleDecomposition& decomposition) {
    if (decomposition.circles.empty()) throw std::invalid_argument("decomposition is empty");
    return decomposition.circles.front();
}

}  // namespace gla
