#include "gla/config.hpp"

#include <json.hpp>

namespace gla {

using nlohmann::json;

namespace {

class Validator {
public:
    std::vector<std::string> issues;

    void fail(const std::string& path, const std::string& what) {
        issues.push_back(path + ": " + what);
    }

    bool check_keys(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        bool ok = true;
        for (const auto& item : j.items()) {
            bool known = false;
            for (const char* k : allowed)
                if (item.key() == k) {
                    known = true;
                    break;
                }
            if (!known) {
                fail(path, "unknown key '" + item.key() + "'");
                ok = false;
            }
        }
        return ok;
    }

    // Complex scalars appear as [re, im] or as a bare number.
    std::optional<cplx> complex_value(const json& j, const std::string& path) {
        if (j.is_number()) return cplx(j.get<double>(), 0.0);
        if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
            return cplx(j[0].get<double>(), j[1].get<double>());
        fail(path, "expected a number or [re, im]");
        return std::nullopt;
    }

    std::optional<double> number(const json& j, const std::string& path) {
        if (j.is_number()) return j.get<double>();
        fail(path, "expected a number");
        return std::nullopt;
    }
};

void parse_system(const json& j, const std::string& path, SystemSpec& out, Validator& v) {
    if (!v.check_keys(j, path,
                      {"kind", "eigenvalues", "eigenvectors", "base", "charts", "rho"}))
        return;
    const std::string kind = j.value("kind", "");
    if (kind == "diagonal")
        out.kind = SystemSpec::Kind::diagonal;
    else if (kind == "linear")
        out.kind = SystemSpec::Kind::linear;
    else if (kind == "conjugate")
        out.kind = SystemSpec::Kind::conjugate;
    else if (kind == "limit_cycle")
        out.kind = SystemSpec::Kind::limit_cycle;
    else {
        v.fail(path + ".kind", "expected diagonal | linear | conjugate | limit_cycle");
        return;
    }

    if (out.kind == SystemSpec::Kind::limit_cycle) {
        for (const char* k : {"eigenvalues", "eigenvectors", "base", "charts"})
            if (j.contains(k)) v.fail(path, std::string("key '") + k + "' not valid here");
        if (!j.contains("rho")) {
            v.fail(path, "limit_cycle needs 'rho'");
            return;
        }
        const json& r = j["rho"];
        if (!v.check_keys(r, path + ".rho", {"a0", "cos", "sin"})) return;
        if (auto a0 = v.number(r.value("a0", json()), path + ".rho.a0")) out.rho_a0 = *a0;
        if (!(out.rho_a0 < 0.0)) v.fail(path + ".rho.a0", "rho* must be negative");
        for (const char* name : {"cos", "sin"}) {
            if (!r.contains(name)) continue;
            if (!r[name].is_array()) {
                v.fail(path + ".rho." + name, "expected an array of numbers");
                continue;
            }
            std::vector<double> coeffs;
            for (std::size_t i = 0; i < r[name].size(); ++i)
                if (auto x = v.number(r[name][i],
                                      path + ".rho." + name + "[" + std::to_string(i) + "]"))
                    coeffs.push_back(*x);
            (std::string(name) == "cos" ? out.rho_cos : out.rho_sin) = std::move(coeffs);
        }
        return;
    }

    const json* lin = &j;
    std::string lin_path = path;
    if (out.kind == SystemSpec::Kind::conjugate) {
        if (!j.contains("base")) {
            v.fail(path, "conjugate needs 'base'");
            return;
        }
        lin = &j["base"];
        lin_path = path + ".base";
        if (!v.check_keys(*lin, lin_path, {"kind", "eigenvalues", "eigenvectors"})) return;
        const std::string bk = lin->value("kind", "diagonal");
        if (bk != "diagonal" && bk != "linear") {
            v.fail(lin_path + ".kind", "base must be diagonal or linear");
            return;
        }
    }

    if (!lin->contains("eigenvalues") || !(*lin)["eigenvalues"].is_array() ||
        (*lin)["eigenvalues"].empty()) {
        v.fail(lin_path + ".eigenvalues", "expected a nonempty array");
        return;
    }
    for (std::size_t i = 0; i < (*lin)["eigenvalues"].size(); ++i)
        if (auto z = v.complex_value((*lin)["eigenvalues"][i],
                                     lin_path + ".eigenvalues[" + std::to_string(i) + "]")) {
            if (*z == cplx(0.0, 0.0))
                v.fail(lin_path + ".eigenvalues[" + std::to_string(i) + "]", "must be nonzero");
            out.eigenvalues.push_back(*z);
        }

    const auto d = static_cast<Eigen::Index>(out.eigenvalues.size());
    if (lin->contains("eigenvectors")) {
        const json& m = (*lin)["eigenvectors"];
        if (!m.is_array() || static_cast<Eigen::Index>(m.size()) != d) {
            v.fail(lin_path + ".eigenvectors", "expected a d x d matrix (array of rows)");
        } else {
            out.eigenvectors.resize(d, d);
            for (Eigen::Index r = 0; r < d; ++r) {
                const json& row = m[static_cast<std::size_t>(r)];
                if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
                    v.fail(lin_path + ".eigenvectors[" + std::to_string(r) + "]",
                           "expected a row of length d");
                    continue;
                }
                for (Eigen::Index c = 0; c < d; ++c)
                    if (auto z = v.complex_value(row[static_cast<std::size_t>(c)],
                                                 lin_path + ".eigenvectors[" + std::to_string(r) +
                                                     "][" + std::to_string(c) + "]"))
                        out.eigenvectors(r, c) = *z;
            }
        }
    } else {
        out.eigenvectors = Eigen::MatrixXcd::Identity(d, d);
    }

    if (out.kind == SystemSpec::Kind::conjugate) {
        if (!j.contains("charts") || !j["charts"].is_array() ||
            j["charts"].size() != out.eigenvalues.size()) {
            v.fail(path + ".charts", "expected one chart per coordinate");
            return;
        }
        for (std::size_t i = 0; i < j["charts"].size(); ++i) {
            const std::string cp = path + ".charts[" + std::to_string(i) + "]";
            const json& c = j["charts"][i];
            if (!v.check_keys(c, cp, {"cubic", "domain"})) continue;
            ChartSpec spec;
            if (auto a = v.number(c.value("cubic", json(0.0)), cp + ".cubic")) spec.cubic = *a;
            if (c.contains("domain")) {
                const json& dom = c["domain"];
                if (!dom.is_array() || dom.size() != 2 || !dom[0].is_number() ||
                    !dom[1].is_number()) {
                    v.fail(cp + ".domain", "expected [lo, hi]");
                } else {
                    spec.lo = dom[0].get<double>();
                    spec.hi = dom[1].get<double>();
                    if (!(spec.lo < 0.0 && spec.hi > 0.0))
                        v.fail(cp + ".domain", "domain must contain 0");
                }
            }
            out.charts.push_back(spec);
        }
    }
}

void parse_observable(const json& j, const std::string& path, ObservableSpec& out,
                      Validator& v) {
    if (!v.check_keys(j, path, {"kind", "j", "m", "n", "terms", "polynomial"})) return;
    const std::string kind = j.value("kind", "");
    if (kind == "zero") {
        out.kind = ObservableSpec::Kind::zero;
    } else if (kind == "principal" || kind == "pullback_principal") {
        out.kind = kind == "principal" ? ObservableSpec::Kind::principal
                                       : ObservableSpec::Kind::pullback_principal;
        if (!j.contains("j") || !j["j"].is_number_integer())
            v.fail(path + ".j", "expected an integer index (1-based)");
        else
            out.j = j["j"].get<int>();
    } else if (kind == "product") {
        out.kind = ObservableSpec::Kind::product;
        if (!j.contains("m") || !j["m"].is_array())
            v.fail(path + ".m", "expected a multi-index array");
        else
            for (const auto& e : j["m"]) out.m.push_back(e.get<int>());
    } else if (kind == "combination") {
        out.kind = ObservableSpec::Kind::combination;
        if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty()) {
            v.fail(path + ".terms", "expected a nonempty array");
            return;
        }
        for (std::size_t i = 0; i < j["terms"].size(); ++i) {
            const std::string tp = path + ".terms[" + std::to_string(i) + "]";
            const json& t = j["terms"][i];
            if (!v.check_keys(t, tp, {"m", "weight"})) continue;
            ObservableSpec::Term term;
            if (!t.contains("m") || !t["m"].is_array())
                v.fail(tp + ".m", "expected a multi-index array");
            else
                for (const auto& e : t["m"]) term.m.push_back(e.get<int>());
            if (t.contains("weight"))
                if (auto w = v.complex_value(t["weight"], tp + ".weight")) term.weight = *w;
            out.terms.push_back(std::move(term));
        }
    } else if (kind == "limit_cycle_eigenfunction") {
        out.kind = ObservableSpec::Kind::limit_cycle_eigenfunction;
        if (!j.contains("m") || !j["m"].is_number_integer() || j["m"].get<int>() < 0)
            v.fail(path + ".m", "expected an integer >= 0");
        else
            out.lc_m = j["m"].get<int>();
        if (j.contains("n") && j["n"].is_number_integer())
            out.lc_n = j["n"].get<int>();
        else if (j.contains("n"))
            v.fail(path + ".n", "expected an integer");
    } else if (kind == "polynomial") {
        out.kind = ObservableSpec::Kind::polynomial;
        if (!j.contains("polynomial")) {
            v.fail(path, "polynomial observable needs 'polynomial'");
            return;
        }
        try {
            out.polynomial = RingPolynomial::from_json(j["polynomial"].dump());
        } catch (const std::exception& e) {
            v.fail(path + ".polynomial", e.what());
        }
    } else {
        v.fail(path + ".kind",
               "expected zero | principal | product | combination | polynomial | "
               "limit_cycle_eigenfunction | pullback_principal");
    }
}

void parse_x0(const json& j, const std::string& path, ExperimentConfig& cfg, Validator& v) {
    if (!v.check_keys(j, path, {"points", "grid"})) return;
    if (j.contains("points") == j.contains("grid")) {
        v.fail(path, "exactly one of 'points' or 'grid' required");
        return;
    }
    if (j.contains("points")) {
        const json& pts = j["points"];
        if (!pts.is_array() || pts.empty()) {
            v.fail(path + ".points", "expected a nonempty array of points");
            return;
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string pp = path + ".points[" + std::to_string(i) + "]";
            if (!pts[i].is_array() || pts[i].empty()) {
                v.fail(pp, "expected an array of coordinates");
                continue;
            }
            std::vector<cplx> point;
            for (std::size_t c = 0; c < pts[i].size(); ++c)
                if (auto z = v.complex_value(pts[i][c], pp + "[" + std::to_string(c) + "]"))
                    point.push_back(*z);
            cfg.x0_points.push_back(std::move(point));
        }
    } else {
        const json& g = j["grid"];
        if (!v.check_keys(g, path + ".grid", {"center", "radius", "count"})) return;
        GridSpec grid;
        if (!g.contains("center") || !g["center"].is_array() || g["center"].empty())
            v.fail(path + ".grid.center", "expected a nonempty array of numbers");
        else
            for (const auto& e : g["center"]) grid.center.push_back(e.get<double>());
        if (auto r = v.number(g.value("radius", json(0.1)), path + ".grid.radius"))
            grid.radius = *r;
        if (g.contains("count") && g["count"].is_number_unsigned())
            grid.count = g["count"].get<std::size_t>();
        else if (g.contains("count"))
            v.fail(path + ".grid.count", "expected a positive integer");
        if (grid.count < 1) v.fail(path + ".grid.count", "must be >= 1");
        cfg.x0_grid = std::move(grid);
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    Validator v;
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ValidationError({std::string("not valid JSON: ") + e.what()});
    }

    ExperimentConfig cfg;
    v.check_keys(j, "$",
                 {"system", "observable", "x0", "lattice", "n", "targets", "mode", "continuous",
                  "output_dir", "seed", "grouping_tol"});

    if (j.contains("system"))
        parse_system(j["system"], "$.system", cfg.system, v);
    else
        v.fail("$", "missing 'system'");

    if (j.contains("observable"))
        parse_observable(j["observable"], "$.observable", cfg.observable, v);
    else
        v.fail("$", "missing 'observable'");

    if (j.contains("x0"))
        parse_x0(j["x0"], "$.x0", cfg, v);
    else
        v.fail("$", "missing 'x0'");

    if (j.contains("lattice")) {
        if (v.check_keys(j["lattice"], "$.lattice", {"K", "N"})) {
            if (j["lattice"].contains("K") && j["lattice"]["K"].is_number_integer())
                cfg.K = j["lattice"]["K"].get<int>();
            else
                v.fail("$.lattice.K", "expected an integer");
            if (j["lattice"].contains("N")) {
                if (j["lattice"]["N"].is_number_integer())
                    cfg.N = j["lattice"]["N"].get<int>();
                else
                    v.fail("$.lattice.N", "expected an integer");
            }
            if (cfg.K < 0) v.fail("$.lattice.K", "must be >= 0");
            if (cfg.N < 0) v.fail("$.lattice.N", "must be >= 0");
        }
    } else {
        v.fail("$", "missing 'lattice'");
    }

    const std::string mode = j.value("mode", "forward");
    if (mode == "forward")
        cfg.mode = RunMode::forward;
    else if (mode == "inverse")
        cfg.mode = RunMode::inverse;
    else if (mode == "continuous")
        cfg.mode = RunMode::continuous;
    else if (mode == "sweep")
        cfg.mode = RunMode::sweep;
    else if (mode == "verify")
        cfg.mode = RunMode::verify;
    else
        v.fail("$.mode", "expected forward | inverse | continuous | sweep | verify");

    if (cfg.mode != RunMode::continuous) {
        if (!j.contains("n") || !j["n"].is_array() || j["n"].empty()) {
            v.fail("$.n", "expected a nonempty array of sample counts");
        } else {
            for (std::size_t i = 0; i < j["n"].size(); ++i) {
                const json& e = j["n"][i];
                if (!e.is_number_integer() || e.get<long long>() < 1)
                    v.fail("$.n[" + std::to_string(i) + "]", "sample counts must be >= 1");
                else
                    cfg.n_values.push_back(e.get<std::size_t>());
            }
        }
    } else if (j.contains("n")) {
        v.fail("$.n", "not used in continuous mode");
    }

    if (j.contains("targets")) {
        const json& t = j["targets"];
        if (t.is_string() && t.get<std::string>() == "all") {
            cfg.targets_all = true;
        } else if (t.is_array()) {
            for (std::size_t i = 0; i < t.size(); ++i) {
                const json& e = t[i];
                if (!e.is_array() || e.empty()) {
                    v.fail("$.targets[" + std::to_string(i) + "]",
                           "expected a lattice index (array of integers)");
                    continue;
                }
                MultiIndex idx;
                if (cfg.system.kind == SystemSpec::Kind::limit_cycle) {
                    if (e.size() != 2) {
                        v.fail("$.targets[" + std::to_string(i) + "]",
                               "limit-cycle targets are [k, n]");
                        continue;
                    }
                    idx.k = {e[0].get<int>()};
                    idx.n = e[1].get<int>();
                } else {
                    for (const auto& c : e) idx.k.push_back(c.get<int>());
                }
                cfg.targets.push_back(std::move(idx));
            }
        } else {
            v.fail("$.targets", "expected \"all\" or an array of lattice indices");
        }
    } else if (cfg.mode != RunMode::sweep) {
        v.fail("$", "missing 'targets'");
    } else {
        cfg.targets_all = true;
    }

    if (cfg.mode == RunMode::continuous) {
        if (!j.contains("continuous")) {
            v.fail("$", "continuous mode needs 'continuous': {alpha, dt}");
        } else if (v.check_keys(j["continuous"], "$.continuous", {"alpha", "dt"})) {
            if (auto a = v.number(j["continuous"].value("alpha", json()), "$.continuous.alpha"))
                cfg.alpha = *a;
            if (auto d = v.number(j["continuous"].value("dt", json()), "$.continuous.dt"))
                cfg.dt = *d;
            if (!(cfg.alpha > 0.0)) v.fail("$.continuous.alpha", "must be positive");
            if (!(cfg.dt > 0.0 && cfg.dt < cfg.alpha)) v.fail("$.continuous.dt", "must be in (0, alpha)");
        }
    } else if (j.contains("continuous")) {
        v.fail("$.continuous", "only used in continuous mode");
    }

    if (j.contains("output_dir")) {
        if (j["output_dir"].is_string())
            cfg.output_dir = j["output_dir"].get<std::string>();
        else
            v.fail("$.output_dir", "expected a string");
    }
    if (j.contains("seed")) {
        if (j["seed"].is_number_unsigned())
            cfg.seed = j["seed"].get<std::uint64_t>();
        else
            v.fail("$.seed", "expected a nonnegative integer");
    }
    if (j.contains("grouping_tol")) {
        if (auto g = v.number(j["grouping_tol"], "$.grouping_tol")) cfg.grouping_tol = *g;
        if (!(cfg.grouping_tol > 0.0)) v.fail("$.grouping_tol", "must be positive");
    }

    // Cross-field checks run whenever the system spec itself is usable, so a
    // bad 'n' does not hide a bad target: the caller sees every problem.
    bool system_usable = cfg.K >= 0 && cfg.N >= 0;
    if (cfg.system.kind == SystemSpec::Kind::limit_cycle) {
        system_usable = system_usable && cfg.system.rho_a0 < 0;
    } else {
        system_usable = system_usable && !cfg.system.eigenvalues.empty();
        for (cplx l : cfg.system.eigenvalues)
            if (l == cplx(0.0, 0.0)) system_usable = false;
    }
    if (system_usable) {
        const bool is_lc = cfg.system.kind == SystemSpec::Kind::limit_cycle;
        if (is_lc && cfg.mode != RunMode::continuous)
            v.fail("$.mode", "limit-cycle systems run in continuous mode");
        if (!is_lc && cfg.mode == RunMode::continuous)
            v.fail("$.mode", "continuous mode needs a limit-cycle system");
        if (cfg.mode == RunMode::inverse && cfg.system.kind == SystemSpec::Kind::conjugate)
            v.fail("$.mode", "inverse mode needs an invertible linear system");

        const std::size_t d = is_lc ? 2 : cfg.system.eigenvalues.size();
        for (std::size_t i = 0; i < cfg.x0_points.size(); ++i)
            if (cfg.x0_points[i].size() != d)
                v.fail("$.x0.points[" + std::to_string(i) + "]",
                       "dimension mismatch: expected " + std::to_string(d) + " coordinates");
        if (cfg.x0_grid && cfg.x0_grid->center.size() != d)
            v.fail("$.x0.grid.center", "dimension mismatch");

        if (!cfg.targets_all && !cfg.targets.empty()) {
            EigenvalueLattice lat =
                is_lc ? limit_cycle_lattice(cfg.system.rho_a0, cfg.K, cfg.N)
                      : fixed_point_lattice(cfg.system.eigenvalues, cfg.K);
            for (const auto& t : cfg.targets) {
                if (!is_lc && t.k.size() != cfg.system.eigenvalues.size()) {
                    v.fail("$.targets", "index " + t.str() + " has the wrong dimension");
                    continue;
                }
                if (lat.find(t) == nullptr)
                    v.fail("$.targets",
                           "index " + t.str() + " outside the truncated lattice");
            }
        }
        if (cfg.observable.kind == ObservableSpec::Kind::polynomial &&
            cfg.system.kind != SystemSpec::Kind::diagonal)
            v.fail("$.observable", "polynomial observables need a diagonal system");
        if (cfg.observable.kind == ObservableSpec::Kind::limit_cycle_eigenfunction && !is_lc)
            v.fail("$.observable", "limit-cycle eigenfunctions need a limit-cycle system");
        if (cfg.observable.kind == ObservableSpec::Kind::pullback_principal &&
            cfg.system.kind != SystemSpec::Kind::conjugate)
            v.fail("$.observable", "pullback observables need a conjugate system");
    }

    if (!v.issues.empty()) throw ValidationError(std::move(v.issues));
    return cfg;
}

}  // namespace gla
