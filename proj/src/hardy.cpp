#include "gla/hardy.hpp"

#include <cmath>

#include <json.hpp>

namespace gla {

using nlohmann::json;

void RingPolynomial::set(const MultiIndex& idx, cplx coeff) {
    for (int ki : idx.k)
        if (ki < 0) throw std::invalid_argument("multi-degree must be nonnegative");
    if (kind_ == LatticeKind::fixed_point && idx.n != 0)
        throw std::invalid_argument("fixed-point polynomials have no Fourier index");
    if (!finite(coeff)) throw std::invalid_argument("coefficient must be finite");
    if (coeff == cplx(0.0, 0.0))
        terms_.erase(idx);
    else
        terms_[idx] = coeff;
}

cplx RingPolynomial::coeff(const MultiIndex& idx) const {
    const auto it = terms_.find(idx);
    return it == terms_.end() ? cplx(0.0, 0.0) : it->second;
}

std::string RingPolynomial::to_json() const {
    json j;
    j["kind"] = kind_ == LatticeKind::fixed_point ? "fixed_point" : "limit_cycle";
    json terms = json::array();
    for (const auto& [idx, c] : terms_) {
        json t;
        t["k"] = idx.k;
        t["n"] = idx.n;
        t["re"] = c.real();
        t["im"] = c.imag();
        terms.push_back(std::move(t));
    }
    j["terms"] = std::move(terms);
    return j.dump();
}

RingPolynomial RingPolynomial::from_json(const std::string& text) {
    json j = json::parse(text);
    if (!j.is_object() || !j.contains("kind") || !j.contains("terms"))
        throw std::invalid_argument("polynomial JSON needs {kind, terms}");
    const std::string kind = j["kind"].get<std::string>();
    RingPolynomial p(kind == "limit_cycle" ? LatticeKind::limit_cycle
                                           : LatticeKind::fixed_point);
    if (kind != "fixed_point" && kind != "limit_cycle")
        throw std::invalid_argument("unknown polynomial kind: " + kind);
    for (const auto& t : j["terms"]) {
        MultiIndex idx;
        idx.k = t.at("k").get<std::vector<int>>();
        idx.n = t.value("n", 0);
        p.set(idx, cplx(t.at("re").get<double>(), t.at("im").get<double>()));
    }
    return p;
}

double poly_norm(const RingPolynomial& p) {
    double sum = 0.0, comp = 0.0;
    for (const auto& kv : p.terms()) {
        const double y = std::norm(kv.second) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return std::sqrt(sum);
}

cplx poly_eval(const RingPolynomial& p, const State& point, const LimitCycleFlow* flow) {
    if (p.kind() == LatticeKind::fixed_point) {
        for (Eigen::Index i = 0; i < point.size(); ++i)
            if (!(std::abs(point[i]) < 1.0))
                throw DomainError("evaluation point outside the open unit polydisc, coordinate " +
                                  std::to_string(i + 1));
        KahanSum sum;
        for (const auto& [idx, c] : p.terms()) {
            if (static_cast<Eigen::Index>(idx.k.size()) != point.size())
                throw std::invalid_argument("term dimension mismatch");
            cplx mono(1.0, 0.0);
            for (std::size_t j = 0; j < idx.k.size(); ++j)
                for (int e = 0; e < idx.k[j]; ++e) mono *= point[static_cast<Eigen::Index>(j)];
            sum.add(c * mono);
        }
        return sum.value();
    }

    if (flow == nullptr)
        throw std::invalid_argument("limit-cycle polynomials need the flow to evaluate xi");
    if (point.size() != 2) throw std::invalid_argument("limit-cycle state is (x, s)");
    const double x = point[0].real();
    if (!(std::abs(x) < 1.0))
        throw DomainError("evaluation point outside |x| < 1");
    const double s = point[1].real();
    const double xis = flow->xi(s);
    KahanSum sum;
    for (const auto& [idx, c] : p.terms()) {
        const int k = idx.k.empty() ? 0 : idx.k[0];
        double radial = std::exp(-k * xis);
        for (int e = 0; e < k; ++e) radial *= x;
        sum.add(c * radial * cplx(std::cos(idx.n * s), std::sin(idx.n * s)));
    }
    return sum.value();
}

RingPolynomial koopman_apply(const RingPolynomial& p, const EigenvalueLattice& lattice) {
    if ((p.kind() == LatticeKind::fixed_point) != (lattice.kind == LatticeKind::fixed_point))
        throw std::invalid_argument("polynomial and lattice kinds differ");
    RingPolynomial out(p.kind());
    for (const auto& [idx, c] : p.terms()) {
        const LatticeEntry* e = lattice.find(idx);
        if (e == nullptr)
            throw std::invalid_argument("term " + idx.str() + " outside the lattice truncation");
        out.set(idx, c * e->value);
    }
    return out;
}

// ---------------------------------------------------------------------------
// BorelRegion
// ---------------------------------------------------------------------------

BorelRegion BorelRegion::everything() { return {}; }

BorelRegion BorelRegion::modulus_interval(double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("modulus interval requires lo <= hi");
    BorelRegion r;
    r.modulus = std::make_pair(lo, hi);
    return r;
}

BorelRegion BorelRegion::modulus_argument(double rlo, double rhi, double alo, double ahi) {
    BorelRegion r = modulus_interval(rlo, rhi);
    if (alo > ahi) throw std::invalid_argument("argument interval requires lo <= hi");
    r.argument = std::make_pair(alo, ahi);
    return r;
}

BorelRegion BorelRegion::index_set(std::vector<MultiIndex> indices) {
    BorelRegion r;
    r.indices = std::move(indices);
    return r;
}

BorelRegion BorelRegion::single_value(cplx value, double tol) {
    BorelRegion r;
    r.value_ball = std::make_pair(value, tol);
    return r;
}

bool BorelRegion::contains(const MultiIndex& idx, cplx value) const {
    if (modulus) {
        const double m = std::abs(value);
        if (m < modulus->first || m > modulus->second) return false;
    }
    if (argument) {
        const double a = std::arg(value);
        if (a < argument->first || a > argument->second) return false;
    }
    if (value_ball) {
        if (std::abs(value - value_ball->first) > value_ball->second) return false;
    }
    if (indices) {
        bool found = false;
        for (const auto& i : *indices)
            if (i == idx) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

BorelRegion BorelRegion::intersect(const BorelRegion& other) const {
    BorelRegion r;
    if (modulus && other.modulus)
        r.modulus = std::make_pair(std::max(modulus->first, other.modulus->first),
                                   std::min(modulus->second, other.modulus->second));
    else
        r.modulus = modulus ? modulus : other.modulus;
    if (argument && other.argument)
        r.argument = std::make_pair(std::max(argument->first, other.argument->first),
                                    std::min(argument->second, other.argument->second));
    else
        r.argument = argument ? argument : other.argument;
    if (indices && other.indices) {
        std::vector<MultiIndex> both;
        for (const auto& i : *indices)
            for (const auto& j : *other.indices)
                if (i == j) {
                    both.push_back(i);
                    break;
                }
        r.indices = std::move(both);
    } else {
        r.indices = indices ? indices : other.indices;
    }
    if (value_ball && other.value_ball) {
        // Two balls: keep the first and let the second act through contains()
        // would lose information; restrict to the degenerate shared case.
        if (value_ball->first == other.value_ball->first)
            r.value_ball = std::make_pair(value_ball->first,
                                          std::min(value_ball->second, other.value_ball->second));
        else
            r.value_ball = std::make_pair(value_ball->first, -1.0);  // empty
    } else {
        r.value_ball = value_ball ? value_ball : other.value_ball;
    }
    return r;
}

RingPolynomial spectral_projection(const RingPolynomial& p, const BorelRegion& region,
                                   const EigenvalueLattice& lattice) {
    if ((p.kind() == LatticeKind::fixed_point) != (lattice.kind == LatticeKind::fixed_point))
        throw std::invalid_argument("polynomial and lattice kinds differ");
    RingPolynomial out(p.kind());
    for (const auto& [idx, c] : p.terms()) {
        const LatticeEntry* e = lattice.find(idx);
        if (e == nullptr)
            throw std::invalid_argument("term " + idx.str() + " outside the lattice truncation");
        if (region.contains(idx, e->value)) out.set(idx, c);
    }
    return out;
}

}  // namespace gla
