#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gla/dynsys.hpp"

namespace gla {

// A scalar observable f: state space -> C. Evaluators are pure and the
// struct is immutable after construction, so observables are safe to share
// across threads.
struct Observable {
    std::function<cplx(const State&)> eval;
    std::string label;

    cplx operator()(const State& x) const { return eval(x); }
};

inline Observable constant_observable(cplx c) {
    return {[c](const State&) { return c; }, "const"};
}

inline Observable zero_observable() { return constant_observable(cplx(0.0, 0.0)); }

inline Observable scale(cplx a, Observable f) {
    auto g = f.eval;
    return {[a, g](const State& x) { return a * g(x); }, f.label};
}

inline Observable sum(Observable f, Observable g) {
    auto fe = f.eval;
    auto ge = g.eval;
    return {[fe, ge](const State& x) { return fe(x) + ge(x); }, f.label + "+" + g.label};
}

inline Observable product(Observable f, Observable g) {
    auto fe = f.eval;
    auto ge = g.eval;
    return {[fe, ge](const State& x) { return fe(x) * ge(x); }, f.label + "*" + g.label};
}

inline Observable linear_combination(const std::vector<std::pair<cplx, Observable>>& terms) {
    std::vector<std::pair<cplx, std::function<cplx(const State&)>>> parts;
    parts.reserve(terms.size());
    std::string label;
    for (const auto& [w, obs] : terms) {
        parts.emplace_back(w, obs.eval);
        if (!label.empty()) label += "+";
        label += obs.label;
    }
    return {[parts](const State& x) {
                KahanSum s;
                for (const auto& [w, e] : parts) s.add(w * e(x));
                return s.value();
            },
            label};
}

// A map between state spaces with a declared domain; used for conjugacy
// pullbacks.
struct StateMap {
    std::function<State(const State&)> apply;
    std::function<bool(const State&)> in_domain;  // may be empty: whole space
    std::string label;
};

}  // namespace gla
