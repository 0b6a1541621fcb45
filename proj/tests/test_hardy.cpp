#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "gla/analytic.hpp"
#include "gla/hardy.hpp"
#include "gla/project.hpp"

using namespace gla;

namespace {

State make_state(std::initializer_list<cplx> coords) {
    State s(static_cast<Eigen::Index>(coords.size()));
    Eigen::Index i = 0;
    for (cplx c : coords) s[i++] = c;
    return s;
}

RingPolynomial random_poly(std::mt19937_64& rng, const EigenvalueLattice& lattice,
                           std::size_t max_terms) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_int_distribution<std::size_t> pick(0, lattice.entries.size() - 1);
    RingPolynomial p(lattice.kind);
    const std::size_t terms = 1 + pick(rng) % max_terms;
    for (std::size_t i = 0; i < terms; ++i)
        p.set(lattice.entries[pick(rng)].index, cplx(u(rng), u(rng)));
    return p;
}

BorelRegion random_region(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.1);
    switch (rng() % 3) {
        case 0: {
            double a = u(rng), b = u(rng);
            if (a > b) std::swap(a, b);
            return BorelRegion::modulus_interval(a, b);
        }
        case 1: {
            double a = u(rng), b = u(rng);
            if (a > b) std::swap(a, b);
            const double pi = std::acos(-1.0);
            return BorelRegion::modulus_argument(a, b, -pi / 2, pi / 2);
        }
        default:
            return BorelRegion::everything();
    }
}

}  // namespace

TEST_CASE("poly_norm") {
    SUBCASE("constant") {
        RingPolynomial p;
        p.set(MultiIndex{{0}, 0}, cplx(3, 0));
        CHECK(poly_norm(p) == doctest::Approx(3.0).epsilon(1e-15));
    }

    SUBCASE("x + x^2 has norm sqrt(2)") {
        RingPolynomial p;
        p.set(MultiIndex{{1}, 0}, cplx(1, 0));
        p.set(MultiIndex{{2}, 0}, cplx(1, 0));
        CHECK(poly_norm(p) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    }

    SUBCASE("limit-cycle Parseval sum") {
        // Fourier coefficients a0 = 1, a1 = 2 at degree k = 1: norm sqrt(5).
        RingPolynomial p(LatticeKind::limit_cycle);
        p.set(MultiIndex{{1}, 0}, cplx(1, 0));
        p.set(MultiIndex{{1}, 1}, cplx(2, 0));
        CHECK(poly_norm(p) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
    }

    SUBCASE("zero iff empty") {
        RingPolynomial p;
        CHECK(poly_norm(p) == 0.0);
        p.set(MultiIndex{{1}, 0}, cplx(1, 0));
        p.set(MultiIndex{{1}, 0}, cplx(0, 0));  // exact zero removes the term
        CHECK(p.empty());
        CHECK(poly_norm(p) == 0.0);
    }
}

TEST_CASE("poly_eval") {
    SUBCASE("single monomial") {
        RingPolynomial p;
        p.set(MultiIndex{{1}, 0}, cplx(1, 0));
        CHECK(poly_eval(p, make_state({0.5})) == cplx(0.5, 0));
    }

    SUBCASE("geometric partial sum") {
        RingPolynomial p;
        for (int k = 0; k <= 10; ++k) p.set(MultiIndex{{k}, 0}, cplx(1, 0));
        const cplx got = poly_eval(p, make_state({0.5}));
        const double want = (1.0 - std::pow(0.5, 11)) / (1.0 - 0.5);
        CHECK(std::abs(got - want) < 1e-14);
    }

    SUBCASE("boundary of the polydisc is excluded") {
        RingPolynomial p;
        p.set(MultiIndex{{1, 0}, 0}, cplx(1, 0));
        CHECK_THROWS_AS(poly_eval(p, make_state({1.0, 0.0})), DomainError);
        CHECK_THROWS_AS(poly_eval(p, make_state({0.2, cplx(0.8, 0.7)})), DomainError);
    }

    SUBCASE("limit-cycle evaluation against the eigenfunction basis") {
        LimitCycleFlow flow(-1.0, {0.3}, {});
        RingPolynomial p(LatticeKind::limit_cycle);
        p.set(MultiIndex{{1}, 1}, cplx(2, 0));  // 2 * g_1 h_1
        const State pt = make_state({0.4, 1.3});
        const cplx want = 2.0 * limit_cycle_eigenfunction(flow, 1, 1)(pt);
        CHECK(std::abs(poly_eval(p, pt, &flow) - want) < 1e-14);
        CHECK_THROWS_AS(poly_eval(p, pt), std::invalid_argument);  // flow required
    }
}

TEST_CASE("koopman_apply") {
    SUBCASE("single eigenvalue") {
        const auto lat = fixed_point_lattice({cplx(0.5, 0)}, 2);
        RingPolynomial p;
        p.set(MultiIndex{{1}, 0}, cplx(1, 0));
        const auto up = koopman_apply(p, lat);
        CHECK(up.coeff(MultiIndex{{1}, 0}) == cplx(0.5, 0));
    }

    SUBCASE("product eigenvalue") {
        const auto lat = fixed_point_lattice({cplx(0.9, 0), cplx(0.5, 0)}, 2);
        RingPolynomial p;
        p.set(MultiIndex{{1, 1}, 0}, cplx(1, 0));
        const auto up = koopman_apply(p, lat);
        CHECK(std::abs(up.coeff(MultiIndex{{1, 1}, 0}) - cplx(0.45, 0)) < 1e-15);
    }

    SUBCASE("limit cycle multiplies by e^{k rho* + i n}") {
        const auto lat = limit_cycle_lattice(-1.0, 2, 2);
        RingPolynomial p(LatticeKind::limit_cycle);
        p.set(MultiIndex{{1}, 1}, cplx(1, 0));
        const auto up = koopman_apply(p, lat);
        const cplx want = std::exp(-1.0) * cplx(std::cos(1.0), std::sin(1.0));
        CHECK(std::abs(up.coeff(MultiIndex{{1}, 1}) - want) < 1e-15);
    }

    SUBCASE("support outside the lattice is an error") {
        const auto lat = fixed_point_lattice({cplx(0.5, 0)}, 1);
        RingPolynomial p;
        p.set(MultiIndex{{2}, 0}, cplx(1, 0));
        CHECK_THROWS_AS(koopman_apply(p, lat), std::invalid_argument);
    }

    SUBCASE("contraction on stable lattices") {
        const auto lat = fixed_point_lattice({cplx(0.9, 0.2), cplx(0.3, -0.3)}, 3);
        std::mt19937_64 rng(99);
        for (int i = 0; i < 20; ++i) {
            const auto p = random_poly(rng, lat, 10);
            CHECK(poly_norm(koopman_apply(p, lat)) <= poly_norm(p) * (1.0 + 1e-15));
        }
    }
}

TEST_CASE("spectral_projection") {
    const auto lat = limit_cycle_lattice(-1.0, 2, 1);

    SUBCASE("everything is the identity") {
        RingPolynomial p(LatticeKind::limit_cycle);
        p.set(MultiIndex{{1}, 1}, cplx(2, 0));
        p.set(MultiIndex{{2}, -1}, cplx(3, 0));
        CHECK(spectral_projection(p, BorelRegion::everything(), lat) == p);
    }

    SUBCASE("modulus interval keeps only the matching ring") {
        RingPolynomial p(LatticeKind::limit_cycle);
        p.set(MultiIndex{{1}, 1}, cplx(2, 0));
        p.set(MultiIndex{{2}, -1}, cplx(3, 0));
        const double r = std::exp(-1.0);
        const auto q =
            spectral_projection(p, BorelRegion::modulus_interval(r - 0.01, r + 0.01), lat);
        CHECK(q.terms().size() == 1);
        CHECK(q.coeff(MultiIndex{{1}, 1}) == cplx(2, 0));
    }

    SUBCASE("disjoint regions are additive") {
        RingPolynomial p(LatticeKind::limit_cycle);
        p.set(MultiIndex{{0}, 0}, cplx(1, 0));
        p.set(MultiIndex{{1}, 0}, cplx(2, 0));
        p.set(MultiIndex{{2}, 1}, cplx(3, 0));
        const auto q1 = spectral_projection(p, BorelRegion::modulus_interval(0.9, 1.1), lat);
        const auto q2 = spectral_projection(p, BorelRegion::modulus_interval(0.3, 0.4), lat);
        // Union via an index set: selection over disjoint pieces adds up.
        std::vector<MultiIndex> keep;
        for (const auto& [idx, c] : q1.terms()) keep.push_back(idx);
        for (const auto& [idx, c] : q2.terms()) keep.push_back(idx);
        const auto qu = spectral_projection(p, BorelRegion::index_set(keep), lat);
        CHECK(qu.terms().size() == q1.terms().size() + q2.terms().size());
        for (const auto& [idx, c] : qu.terms())
            CHECK(c == (q1.coeff(idx) + q2.coeff(idx)));
    }
}

TEST_CASE("spectral measure algebra on random polynomials") {
    std::mt19937_64 rng(20240819);
    const auto lat_fp = fixed_point_lattice({cplx(0.9, 0), cplx(0.5, 0.2)}, 4);
    const auto lat_lc = limit_cycle_lattice(-0.7, 3, 3);

    for (int trial = 0; trial < 50; ++trial) {
        const auto& lat = (trial % 2 == 0) ? lat_fp : lat_lc;
        const auto p = random_poly(rng, lat, 30);
        const auto d1 = random_region(rng);
        const auto d2 = random_region(rng);

        // Idempotence, exactly.
        const auto once = spectral_projection(p, d1, lat);
        CHECK(spectral_projection(once, d1, lat) == once);

        // Multiplicativity over intersections, exactly.
        const auto lhs = spectral_projection(p, d1.intersect(d2), lat);
        const auto rhs = spectral_projection(spectral_projection(p, d2, lat), d1, lat);
        CHECK(lhs == rhs);

        // Equiboundedness with equality iff nothing was dropped.
        CHECK(poly_norm(once) <= poly_norm(p) * (1.0 + 1e-15));
        if (once.terms().size() == p.terms().size())
            CHECK(poly_norm(once) == poly_norm(p));
        else
            CHECK(poly_norm(once) < poly_norm(p));

        // Commutation with the Koopman action, exactly.
        const auto a = koopman_apply(spectral_projection(p, d1, lat), lat);
        const auto b = spectral_projection(koopman_apply(p, lat), d1, lat);
        CHECK(a == b);
    }
}

TEST_CASE("polynomial JSON round trip is bit-exact") {
    std::mt19937_64 rng(4242);
    const auto lat = fixed_point_lattice({cplx(0.9, 0.1), cplx(0.4, -0.2)}, 3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_poly(rng, lat, 12);
        const auto q = RingPolynomial::from_json(p.to_json());
        REQUIRE(q.terms().size() == p.terms().size());
        CHECK(q == p);
        // Bit-exact coefficients, not just approximately equal.
        for (const auto& [idx, c] : p.terms()) {
            const cplx qc = q.coeff(idx);
            CHECK(std::memcmp(&qc, &c, sizeof(cplx)) == 0);
        }
    }
    CHECK_THROWS(RingPolynomial::from_json("{\"kind\": \"weird\", \"terms\": []}"));
}

TEST_CASE("consistency with GLA projections") {
    // Scalar-coefficient polynomial on the diagonal system: the projection at
    // each lattice eigenvalue equals the spectral-measure selection evaluated
    // at the base point.
    const std::vector<cplx> lambda = {cplx(0.9, 0), cplx(0.5, 0)};
    const auto lat = fixed_point_lattice(lambda, 2);
    const auto decomp = decompose_circles(lat);
    auto sys = DiscreteLinearSystem::diagonal(
        (Eigen::VectorXcd(2) << lambda[0], lambda[1]).finished());

    RingPolynomial p;
    p.set(MultiIndex{{0, 0}, 0}, cplx(0.7, 0));
    p.set(MultiIndex{{1, 0}, 0}, cplx(1.0, 0));
    p.set(MultiIndex{{0, 1}, 0}, cplx(0.4, 0));
    p.set(MultiIndex{{1, 1}, 0}, cplx(0.2, 0));
    p.set(MultiIndex{{2, 0}, 0}, cplx(0.1, 0));

    const Observable f{[p](const State& x) { return poly_eval(p, x); }, "p"};
    const State x0 = make_state({0.4, 0.3});

    for (const auto& e : lat.entries) {
        const auto r = gla_project(sys, f, x0, e.index, decomp, 1000);
        const auto sel = spectral_projection(p, BorelRegion::single_value(e.value), lat);
        const cplx oracle = sel.empty() ? cplx(0, 0) : poly_eval(sel, x0);
        const double tol = r.cesaro_bound.value_or(0.0) + 1e-10;
        CHECK(std::abs(r.value - oracle) <= tol);
    }
}
