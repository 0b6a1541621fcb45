#include "gla/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>

#include <json.hpp>

#include "gla/batch.hpp"
#include "gla/laplace.hpp"

namespace gla {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// ---------------------------------------------------------------------------
// Experiment assembly
// ---------------------------------------------------------------------------

struct Built {
    std::unique_ptr<DiscreteSystem> system;
    const DiscreteLinearSystem* linear = nullptr;  // invertible path, when available
    std::optional<LimitCycleFlow> flow;
    EigenvalueLattice lattice;
    CircleDecomposition decomposition;
    Observable observable;
    std::vector<std::pair<cplx, Observable>> components;  // (eigenvalue, component)
    int lc_m = 0, lc_n = 0;                               // lc eigenfunction index
    std::vector<State> x0s;
};

State to_state(const std::vector<cplx>& coords) {
    State s(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) s[static_cast<Eigen::Index>(i)] = coords[i];
    return s;
}

Built build_experiment(const ExperimentConfig& cfg) {
    Built b;
    const bool is_lc = cfg.system.kind == SystemSpec::Kind::limit_cycle;

    if (is_lc) {
        b.flow.emplace(cfg.system.rho_a0, cfg.system.rho_cos, cfg.system.rho_sin);
        b.lattice = limit_cycle_lattice(cfg.system.rho_a0, cfg.K, cfg.N);
    } else {
        Eigen::VectorXcd lambda(static_cast<Eigen::Index>(cfg.system.eigenvalues.size()));
        for (std::size_t i = 0; i < cfg.system.eigenvalues.size(); ++i)
            lambda[static_cast<Eigen::Index>(i)] = cfg.system.eigenvalues[i];
        DiscreteLinearSystem base(lambda, cfg.system.eigenvectors);

        if (cfg.system.kind == SystemSpec::Kind::conjugate) {
            std::vector<ScalarMonotoneMap> charts;
            for (const auto& c : cfg.system.charts)
                charts.push_back(ScalarMonotoneMap::cubic(c.cubic, c.lo, c.hi));
            b.system = std::make_unique<ConjugateNonlinearSystem>(std::move(base),
                                                                  std::move(charts));
        } else {
            auto lin = std::make_unique<DiscreteLinearSystem>(std::move(base));
            b.linear = lin.get();
            b.system = std::move(lin);
        }
        b.lattice = fixed_point_lattice(cfg.system.eigenvalues, cfg.K);
    }
    b.decomposition = decompose_circles(b.lattice, cfg.grouping_tol);

    // Observable and its analytic spectral components (the verify oracle).
    const auto& spec = cfg.observable;
    auto lattice_value = [&](const std::vector<int>& m) {
        cplx v(1.0, 0.0);
        for (std::size_t j = 0; j < m.size(); ++j)
            for (int e = 0; e < m[j]; ++e) v *= cfg.system.eigenvalues[j];
        return v;
    };
    switch (spec.kind) {
        case ObservableSpec::Kind::zero:
            b.observable = zero_observable();
            break;
        case ObservableSpec::Kind::principal: {
            AdjointBasis basis = adjoint_basis(cfg.system.eigenvectors);
            b.observable = principal_eigenfunction(basis, spec.j);
            b.components.emplace_back(cfg.system.eigenvalues[static_cast<std::size_t>(spec.j - 1)],
                                      b.observable);
            break;
        }
        case ObservableSpec::Kind::product: {
            AdjointBasis basis = adjoint_basis(cfg.system.eigenvectors);
            b.observable = product_eigenfunction(basis, spec.m);
            b.components.emplace_back(lattice_value(spec.m), b.observable);
            break;
        }
        case ObservableSpec::Kind::combination: {
            AdjointBasis basis = adjoint_basis(cfg.system.eigenvectors);
            std::vector<std::pair<cplx, Observable>> terms;
            for (const auto& t : spec.terms) {
                Observable comp = scale(t.weight, product_eigenfunction(basis, t.m));
                terms.emplace_back(cplx(1.0, 0.0), comp);
                b.components.emplace_back(lattice_value(t.m), comp);
            }
            b.observable = linear_combination(terms);
            break;
        }
        case ObservableSpec::Kind::polynomial: {
            const RingPolynomial p = spec.polynomial;
            b.observable = {[p](const State& x) { return poly_eval(p, x); }, "poly"};
            for (const auto& [idx, c] : p.terms()) {
                RingPolynomial term(p.kind());
                term.set(idx, c);
                b.components.emplace_back(
                    lattice_value(idx.k),
                    Observable{[term](const State& x) { return poly_eval(term, x); },
                               "poly" + idx.str()});
            }
            break;
        }
        case ObservableSpec::Kind::limit_cycle_eigenfunction: {
            b.observable = limit_cycle_eigenfunction(*b.flow, spec.lc_m, spec.lc_n);
            b.lc_m = spec.lc_m;
            b.lc_n = spec.lc_n;
            break;
        }
        case ObservableSpec::Kind::pullback_principal: {
            const auto* conj = dynamic_cast<const ConjugateNonlinearSystem*>(b.system.get());
            if (conj == nullptr) throw std::invalid_argument("pullback needs a conjugate system");
            // Adjoint basis of the scaled linear dynamics D A D^{-1}.
            Eigen::MatrixXcd Vs = conj->base().eigenvector_matrix();
            for (Eigen::Index r = 0; r < Vs.rows(); ++r)
                Vs.row(r) *= conj->unit_scale()[static_cast<std::size_t>(r)];
            AdjointBasis basis = adjoint_basis(Vs);
            b.observable =
                pullback(principal_eigenfunction(basis, spec.j), conjugacy_chain(*conj));
            b.components.emplace_back(cfg.system.eigenvalues[static_cast<std::size_t>(spec.j - 1)],
                                      b.observable);
            break;
        }
    }

    // Base points: explicit list or a seeded random box.
    if (cfg.x0_grid) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (std::size_t i = 0; i < cfg.x0_grid->count; ++i) {
            State s(static_cast<Eigen::Index>(cfg.x0_grid->center.size()));
            for (std::size_t c = 0; c < cfg.x0_grid->center.size(); ++c)
                s[static_cast<Eigen::Index>(c)] =
                    cplx(cfg.x0_grid->center[c] + cfg.x0_grid->radius * unit(rng), 0.0);
            b.x0s.push_back(std::move(s));
        }
    } else {
        for (const auto& p : cfg.x0_points) b.x0s.push_back(to_state(p));
    }
    return b;
}

// Resolved target list: explicit indices, or every lattice entry in
// descending-circle order for "all".
std::vector<LatticeEntry> resolve_targets(const ExperimentConfig& cfg, const Built& b) {
    std::vector<LatticeEntry> out;
    if (cfg.targets_all) {
        for (const auto& circle : b.decomposition.circles)
            for (const auto& m : circle.members) out.push_back(m);
    } else {
        for (const auto& t : cfg.targets) {
            const LatticeEntry* e = b.lattice.find(t);
            if (e == nullptr)
                throw ValidationError({"target " + t.str() + " outside the truncated lattice"});
            out.push_back(*e);
        }
    }
    return out;
}

cplx oracle_value(const Built& b, cplx gamma, const State& x0) {
    KahanSum s;
    for (const auto& [value, comp] : b.components)
        if (std::abs(value - gamma) <= 1e-12 * std::max(1.0, std::abs(gamma))) s.add(comp(x0));
    return s.value();
}

// ---------------------------------------------------------------------------
// Output rows
// ---------------------------------------------------------------------------

struct Row {
    cplx target;
    std::size_t x0_id = 0;
    double n = 0;  // requested n (or alpha in continuous mode)
    cplx value;
    std::optional<cplx> oracle;
    std::optional<double> abs_err;
    std::optional<double> cesaro_bound;
    std::size_t n_used = 0;
    double residual_sup = 0.0;
};

std::string csv_header(RunMode mode) {
    switch (mode) {
        case RunMode::verify:
            return "target_re,target_im,x0_id,n,gla_re,gla_im,oracle_re,oracle_im,abs_err,"
                   "cesaro_bound";
        case RunMode::continuous:
            return "target_re,target_im,x0_id,alpha,value_re,value_im,oracle_re,oracle_im,"
                   "abs_err";
        default:
            return "target_re,target_im,x0_id,n,gla_re,gla_im,cesaro_bound,n_used,residual_sup";
    }
}

std::string csv_row(RunMode mode, const Row& r) {
    std::string s;
    auto add = [&s](const std::string& f) {
        if (!s.empty()) s += ',';
        s += f;
    };
    add(format_double(r.target.real()));
    add(format_double(r.target.imag()));
    add(std::to_string(r.x0_id));
    add(format_double(r.n));
    add(format_double(r.value.real()));
    add(format_double(r.value.imag()));
    if (mode == RunMode::verify || mode == RunMode::continuous) {
        add(format_double(r.oracle->real()));
        add(format_double(r.oracle->imag()));
        add(format_double(*r.abs_err));
        if (mode == RunMode::verify) add(format_double(r.cesaro_bound.value_or(0.0)));
    } else {
        add(format_double(r.cesaro_bound.value_or(0.0)));
        add(std::to_string(r.n_used));
        add(format_double(r.residual_sup));
    }
    return s;
}

void require_finite(const Row& r) {
    bool ok = finite(r.value) && std::isfinite(r.n) && std::isfinite(r.residual_sup);
    if (r.oracle) ok = ok && finite(*r.oracle);
    if (r.abs_err) ok = ok && std::isfinite(*r.abs_err);
    if (r.cesaro_bound) ok = ok && std::isfinite(*r.cesaro_bound);
    if (!ok)
        throw NumericError("non-finite result cell", r.x0_id, 0.0);
}

// ---------------------------------------------------------------------------
// SVG convergence plot: log-log error vs n, one polyline per target, with a
// slope -1 guide.
// ---------------------------------------------------------------------------

std::string render_convergence_svg(const std::vector<Row>& rows, RunMode mode) {
    struct Series {
        cplx target;
        std::vector<std::pair<double, double>> pts;  // (n, err)
    };
    std::vector<Series> series;
    for (const auto& r : rows) {
        double err = 0.0;
        if (mode == RunMode::verify || mode == RunMode::continuous)
            err = r.abs_err.value_or(0.0);
        else
            err = r.cesaro_bound.value_or(r.residual_sup);
        if (!(err > 0.0)) err = 1e-17;  // log plot floor
        Series* s = nullptr;
        for (auto& existing : series)
            if (existing.target == r.target) s = &existing;
        if (s == nullptr) {
            series.push_back({r.target, {}});
            s = &series.back();
        }
        s->pts.emplace_back(r.n, err);
    }

    double nmin = 1e300, nmax = 0, emin = 1e300, emax = 0;
    for (const auto& s : series)
        for (const auto& [n, e] : s.pts) {
            nmin = std::min(nmin, n);
            nmax = std::max(nmax, n);
            emin = std::min(emin, e);
            emax = std::max(emax, e);
        }
    if (series.empty()) {
        nmin = 1;
        nmax = 10;
        emin = 1e-16;
        emax = 1;
    }
    if (nmax <= nmin) nmax = nmin * 10;
    if (emax <= emin) emax = emin * 10;

    const double W = 720, H = 480, L = 70, R = 30, T = 30, B = 50;
    const double lx0 = std::log10(nmin), lx1 = std::log10(nmax);
    const double ly0 = std::log10(emin), ly1 = std::log10(emax);
    auto X = [&](double n) { return L + (std::log10(n) - lx0) / (lx1 - lx0) * (W - L - R); };
    auto Y = [&](double e) { return H - B - (std::log10(e) - ly0) / (ly1 - ly0) * (H - T - B); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

    std::string svg;
    char buf[256];
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
           "viewBox=\"0 0 720 480\">\n";
    svg += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                  "stroke=\"#333\"/>\n",
                  L, T, W - L - R, H - T - B);
    svg += buf;

    // Decade ticks.
    for (int d = static_cast<int>(std::ceil(lx0)); d <= static_cast<int>(std::floor(lx1)); ++d) {
        const double x = X(std::pow(10.0, d));
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ccc\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"middle\">"
                      "1e%d</text>\n",
                      x, T, x, H - B, x, H - B + 16, d);
        svg += buf;
    }
    for (int d = static_cast<int>(std::ceil(ly0)); d <= static_cast<int>(std::floor(ly1)); ++d) {
        const double y = Y(std::pow(10.0, d));
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ccc\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\">"
                      "1e%d</text>\n",
                      L, y, W - R, y, L - 6, y + 4, d);
        svg += buf;
    }

    // Slope -1 guide through the data's upper-left corner.
    {
        const double c = emax * nmin;  // err = c / n
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#888\" "
                      "stroke-dasharray=\"6,4\"/>\n",
                      X(nmin), Y(c / nmin), X(nmax), Y(std::max(c / nmax, emin)));
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" fill=\"#888\">slope -1"
                      "</text>\n",
                      X(nmax) - 70, Y(std::max(c / nmax, emin)) - 6);
        svg += buf;
    }

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = palette[i % 10];
        std::string pts;
        for (const auto& [n, e] : series[i].pts) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", X(n), Y(std::clamp(e, emin, emax)));
            pts += buf;
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" points=\"" + pts +
               "\"/>\n";
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" fill=\"%s\">%.6g%+.6gi"
                      "</text>\n",
                      W - R - 150.0, T + 16.0 + 14.0 * static_cast<double>(i), color,
                      series[i].target.real(), series[i].target.imag());
        svg += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\">n</text>"
                  "<text x=\"16\" y=\"%.1f\" font-size=\"12\" transform=\"rotate(-90 16 %.1f)\" "
                  "text-anchor=\"middle\">error</text>\n",
                  (L + W - R) / 2, H - 12.0, (T + H - B) / 2, (T + H - B) / 2);
    svg += buf;
    svg += "</svg>\n";
    return svg;
}

std::string index_string(const EigenvalueLattice& lattice, const MultiIndex& idx) {
    if (lattice.kind == LatticeKind::limit_cycle)
        return "(" + std::to_string(idx.k.empty() ? 0 : idx.k[0]) + "," + std::to_string(idx.n) +
               ")";
    std::string s = "(";
    for (std::size_t i = 0; i < idx.k.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(idx.k[i]);
    }
    return s + ")";
}

}  // namespace

void print_lattice(const ExperimentConfig& config, std::ostream& os) {
    const Built b = build_experiment(config);
    os << "lattice: " << b.lattice.entries.size() << " entries, "
       << b.decomposition.circles.size() << " circles\n";
    for (std::size_t c = 0; c < b.decomposition.circles.size(); ++c) {
        const auto& circle = b.decomposition.circles[c];
        os << "circle " << c << ": radius " << format_double(circle.radius) << ", "
           << circle.members.size() << " member(s)\n";
        for (const auto& m : circle.members)
            os << "  " << index_string(b.lattice, m.index) << " -> "
               << format_double(m.value.real()) << (m.value.imag() < 0 ? "-" : "+")
               << format_double(std::abs(m.value.imag())) << "i\n";
    }
}

void run(const ExperimentConfig& cfg, const RunOptions& options) {
    const Built b = build_experiment(cfg);
    const std::vector<LatticeEntry> targets = resolve_targets(cfg, b);
    const bool with_oracle = cfg.mode == RunMode::verify || cfg.mode == RunMode::continuous;

    std::vector<Row> rows;

    if (cfg.mode == RunMode::continuous) {
        // Quadrature grid 0..alpha, uniform dt.
        const auto steps = static_cast<std::size_t>(std::llround(cfg.alpha / cfg.dt));
        std::vector<double> grid(steps + 1);
        for (std::size_t i = 0; i <= steps; ++i) grid[i] = static_cast<double>(i) * cfg.dt;

        for (const auto& target : targets) {
            const int k = target.index.k.empty() ? 0 : target.index.k[0];
            const cplx exponent(k * b.flow->rho_star(), static_cast<double>(target.index.n));
            for (std::size_t x0_id = 0; x0_id < b.x0s.size(); ++x0_id) {
                const State& p0 = b.x0s[x0_id];
                const auto states = flow_sample(*b.flow, p0[0].real(), p0[1].real(), grid);
                std::vector<TimedSample> samples(states.size());
                for (std::size_t i = 0; i < states.size(); ++i)
                    samples[i] = {grid[i], b.observable(states[i])};
                Row r;
                r.target = target.value;
                r.x0_id = x0_id;
                r.n = cfg.alpha;
                r.value = continuous_laplace_average(samples, exponent);
                // Projection of g_m h_n at its own exponent is the value at
                // the base point, and zero at any other lattice exponent.
                const bool match = cfg.observable.kind ==
                                       ObservableSpec::Kind::limit_cycle_eigenfunction &&
                                   b.lc_m == k && b.lc_n == target.index.n;
                r.oracle = match ? b.observable(states[0]) : cplx(0.0, 0.0);
                r.abs_err = std::abs(r.value - *r.oracle);
                require_finite(r);
                rows.push_back(std::move(r));
            }
        }
    } else {
        // Ordered by (target index, x0_id, n) regardless of execution order.
        std::vector<ProjectionTask> tasks;
        for (const auto& target : targets)
            for (std::size_t x0_id = 0; x0_id < b.x0s.size(); ++x0_id)
                for (std::size_t n : cfg.n_values) {
                    ProjectionTask t;
                    t.x0_id = x0_id;
                    t.lambda = target.value;
                    t.target = target.index;
                    t.has_index = true;
                    t.n = n;
                    t.inverse = cfg.mode == RunMode::inverse;
                    tasks.push_back(std::move(t));
                }

        const auto outcomes = run_projection_batch(*b.system, b.linear, b.observable, b.x0s,
                                                   b.decomposition, tasks, options.jobs);
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            if (outcomes[i].failed)
                throw NumericError("task failed: " + outcomes[i].error, i, 0.0);
            const GLAResult& g = outcomes[i].result;
            Row r;
            r.target = tasks[i].lambda;
            r.x0_id = tasks[i].x0_id;
            r.n = static_cast<double>(tasks[i].n);
            r.value = g.value;
            r.cesaro_bound = g.cesaro_bound;
            r.n_used = g.n;
            r.residual_sup = g.residual_sup;
            if (with_oracle) {
                r.oracle = oracle_value(b, tasks[i].lambda, b.x0s[tasks[i].x0_id]);
                r.abs_err = std::abs(r.value - *r.oracle);
            }
            require_finite(r);
            rows.push_back(std::move(r));
        }
    }

    // ------------------------------------------------------------------
    // Write outputs; remove partial files if anything fails.
    // ------------------------------------------------------------------
    const fs::path out_dir = options.out_dir.empty() ? cfg.output_dir : options.out_dir;
    fs::create_directories(out_dir);
    std::vector<fs::path> written;
    auto write_file = [&](const fs::path& name, const std::string& content) {
        const fs::path p = out_dir / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw Error("cannot open " + p.string() + " for writing");
        f << content;
        if (!f) throw Error("write failed: " + p.string());
        written.push_back(p);
    };

    try {
        std::string csv = csv_header(cfg.mode) + "\n";
        for (const auto& r : rows) csv += csv_row(cfg.mode, r) + "\n";
        write_file("results.csv", csv);

        std::string lattice_csv = "index,re,im,modulus,circle_id\n";
        for (std::size_t c = 0; c < b.decomposition.circles.size(); ++c)
            for (const auto& m : b.decomposition.circles[c].members)
                lattice_csv += csv_quote(index_string(b.lattice, m.index)) + "," +
                               format_double(m.value.real()) + "," +
                               format_double(m.value.imag()) + "," +
                               format_double(m.modulus) + "," + std::to_string(c) + "\n";
        write_file("lattice.csv", lattice_csv);

        json out;
        out["mode"] = static_cast<int>(cfg.mode);
        out["seed"] = cfg.seed;
        out["jobs_independent"] = true;
        json jrows = json::array();
        for (const auto& r : rows) {
            json e;
            e["target_re"] = r.target.real();
            e["target_im"] = r.target.imag();
            e["x0_id"] = r.x0_id;
            e["n"] = r.n;
            e["value_re"] = r.value.real();
            e["value_im"] = r.value.imag();
            if (r.oracle) {
                e["oracle_re"] = r.oracle->real();
                e["oracle_im"] = r.oracle->imag();
                e["abs_err"] = *r.abs_err;
            }
            if (r.cesaro_bound) e["cesaro_bound"] = *r.cesaro_bound;
            e["n_used"] = r.n_used;
            e["residual_sup"] = r.residual_sup;
            jrows.push_back(std::move(e));
        }
        out["results"] = std::move(jrows);
        write_file("results.json", out.dump(2) + "\n");

        write_file("convergence.svg", render_convergence_svg(rows, cfg.mode));
    } catch (...) {
        for (const auto& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
        throw;
    }
}

}  // namespace gla
