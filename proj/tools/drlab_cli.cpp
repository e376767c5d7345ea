// drlab: command-line front end.
//
// Exit codes: 0 success, 1 numeric non-convergence or a failed check (results
// are still written), 2 bad arguments or configuration.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "drlab/config.hpp"
#include "drlab/csv.hpp"
#include "drlab/curve.hpp"
#include "drlab/errors.hpp"
#include "drlab/lab.hpp"
#include "drlab/models.hpp"
#include "drlab/montecarlo.hpp"
#include "drlab/recursion.hpp"

using json = nlohmann::ordered_json;
using namespace drlab;

namespace {

constexpr const char* kDefaultDriver = "lf:p=0.5,z=1";

// Non-finite doubles become strings so the JSON stays valid.
json num(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

template <class T>
json opt(const std::optional<T>& x) {
    if (!x) return nullptr;
    if constexpr (std::is_floating_point_v<T>) {
        return num(*x);
    } else {
        return *x;
    }
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << '\n';
}

void emit_csv(const RunConfig& cfg, const CsvTable& table) {
    if (cfg.out) {
        write_csv_file(*cfg.out, table);
    } else {
        write_csv(std::cout, table);
    }
}

template <class T>
T need(const std::optional<T>& x, const char* name) {
    if (!x) throw ConfigError(std::string("missing required parameter --") + name);
    return *x;
}

std::int64_t positive(std::int64_t x, const char* name) {
    if (x <= 0) throw ConfigError(std::string("--") + name + " must be positive");
    return x;
}

BuiltDriver driver_of(const RunConfig& cfg) { return build_driver(parse_driver(cfg.driver.value_or(kDefaultDriver))); }

CurveOptions curve_options(const RunConfig& cfg) {
    CurveOptions o;
    o.m = static_cast<std::size_t>(positive(cfg.m.value_or(1000), "m"));
    o.tol = cfg.tol.value_or(1e-12);
    o.max_sweeps = positive(cfg.max_sweeps.value_or(100'000), "max-sweeps");
    o.K = cfg.K;
    return o;
}

json to_json(const ScalingReport& r, bool pass) {
    return {{"experiment", r.experiment},
            {"driver", r.driver},
            {"v0", r.v0},
            {"cells", r.rows.size()},
            {"raw_last", num(r.raw_last)},
            {"extrapolated_limit", num(r.extrapolated_limit)},
            {"target", opt(r.target)},
            {"relative_gap", num(r.relative_gap)},
            {"spread", num(r.spread)},
            {"flagged", r.flagged},
            {"note", r.note},
            {"pass", pass}};
}

CsvTable to_table(const ScalingReport& r) { return {r.columns, r.rows}; }

int cmd_psi(const RunConfig& cfg) {
    const auto d = driver_of(cfg);
    const auto& psi = d.psi;
    json j{{"driver", describe(d.spec)},
           {"fingerprint", psi.fingerprint()},
           {"psi_0", psi.eval(0.0)},
           {"dpsi_0", psi.deriv(0.0)},
           {"psi_inf", num(psi.psi_inf())},
           {"psi_lower", num(psi.psi_lower())},
           {"domain_min", num(psi.domain_min())},
           {"domain_min_closed", psi.domain().lo_closed},
           {"domain_max", num(psi.domain_max())}};
    if (d.lf) {
        j["xi"] = d.lf->constants.root;
        j["root_slope"] = d.lf->constants.root_slope;
    }
    if (d.clf) {
        j["tau"] = d.clf->constants.root;
        j["root_slope"] = d.clf->constants.root_slope;
    }
    print(j);
    if (cfg.out) write_json_file(*cfg.out, j);
    return 0;
}

int cmd_classify(const RunConfig& cfg) {
    const auto d = driver_of(cfg);
    const double u0 = need(cfg.u0, "u0");
    const double v0 = need(cfg.v0, "v0");
    if (!(u0 >= 0.0)) throw ConfigError("--u0 must be non-negative");
    ClassifyOptions opts;
    opts.max_iter = positive(cfg.max_iter.value_or(opts.max_iter), "max-iter");
    const auto c = classify_detailed(u0, v0, d.psi, opts);
    json j{{"driver", d.psi.fingerprint()}, {"u0", u0},           {"v0", v0},
           {"phase", to_string(c.phase)},   {"steps", c.steps},   {"final_u", num(c.final_u)},
           {"final_v", num(c.final_v)}};
    print(j);
    if (cfg.out) {
        CsvTable t{{"n", "u", "v", "log_u"}, {}};
        for (const auto& s : orbit(u0, v0, d.psi, c.steps))
            t.rows.push_back({static_cast<double>(s.n), s.u, s.v, s.log_u});
        write_csv_file(*cfg.out, t);
    }
    return c.phase == Phase::Undetermined ? 1 : 0;
}

int cmd_curve(const RunConfig& cfg, const std::optional<std::string>& reference) {
    const auto d = driver_of(cfg);
    const double A = cfg.A.value_or(0.5);
    const auto opts = curve_options(cfg);
    CriticalCurve curve;
    if (cfg.sweeps) {
        // exactly g_sweeps, no convergence test
        auto grid = solve_g1(d.psi, A, opts.m);
        grid.K = opts.K ? *opts.K : pick_K(d.psi, A, opts.m);
        for (std::int64_t n = 1; n < positive(*cfg.sweeps, "sweeps"); ++n) grid = iterate_g(grid, d.psi);
        curve = make_curve(std::move(grid), d.psi, false);
    } else {
        curve = solve_curve(d.psi, A, opts);
    }
    const auto local = residual_local(curve, d.psi);
    CsvTable t{{"x", "g", "h", "residual_local"}, {}};
    for (std::size_t i = 0; i < curve.h.size(); ++i)
        t.rows.push_back({curve.grid.x[i], curve.grid.g[i], curve.h[i], local[i]});
    json j{{"driver", d.psi.fingerprint()},
           {"A", A},
           {"m", curve.grid.m},
           {"K", curve.grid.K},
           {"sweeps", curve.grid.sweeps},
           {"g_at_minus_A_plus_A", curve.grid.g.front() + A},
           {"sup_change_last", curve.grid.sup_change_last},
           {"max_clamp", curve.grid.max_clamp},
           {"residual_sup", curve.residual_sup},
           {"converged", curve.converged},
           {"nontrivial", curve.nontrivial}};
    if (reference) {
        const auto ref = read_csv_file(*reference, t.header);
        if (ref.rows.size() != t.rows.size()) throw ConfigError("reference curve has a different grid size");
        double diff = 0.0;
        for (std::size_t i = 0; i < ref.rows.size(); ++i) {
            if (std::abs(ref.rows[i][0] - t.rows[i][0]) > 1e-12) throw ConfigError("reference curve grid differs");
            diff = std::max(diff, std::abs(ref.rows[i][2] - t.rows[i][2]));
        }
        j["reference_max_abs_h_diff"] = diff;
    }
    emit_csv(cfg, t);
    if (cfg.out) print(j);
    return curve.converged || cfg.sweeps ? 0 : 1;
}

json to_json(const FreeEnergyEstimate& e) {
    return {{"value", num(e.value)},
            {"log_value", num(e.log_value)},
            {"lower", num(e.lower)},
            {"upper", num(e.upper)},
            {"log_lower", num(e.log_lower)},
            {"log_upper", num(e.log_upper)},
            {"n_star", opt(e.n_star)},
            {"steps", e.steps},
            {"converged", e.converged},
            {"phase", to_string(e.phase)}};
}

int cmd_free_energy(const RunConfig& cfg) {
    const auto d = driver_of(cfg);
    if (!d.psi.bounded()) throw ConfigError("free energy needs a driver with finite Psi(inf)");
    const double u0 = need(cfg.u0, "u0");
    const double v0 = need(cfg.v0, "v0");
    FreeEnergyOptions opts;
    opts.max_iter = positive(cfg.max_iter.value_or(opts.max_iter), "max-iter");
    if (cfg.tol) opts.tol = *cfg.tol;
    const auto est = free_energy(u0, v0, d.psi, opts);
    json j{{"driver", d.psi.fingerprint()}, {"u0", u0}, {"v0", v0}, {"estimate", to_json(est)}};
    print(j);
    if (cfg.out) write_json_file(*cfg.out, j);
    return est.converged ? 0 : 1;
}

json to_json(const ThresholdReport& r) {
    return {{"hypothesis_holds", r.hypothesis_holds},
            {"value", r.value},
            {"seed_v", r.seed_v},
            {"h_at_seed", r.h_at_seed},
            {"straddle_ok", opt(r.straddle_ok)},
            {"note", r.note}};
}

// Curve on [-A, 0] covering v, for the threshold reports.
CriticalCurve curve_covering(const RunConfig& cfg, const PsiFunction& psi, double v) {
    const double A = cfg.A.value_or(std::max(0.5, -1.05 * v));
    if (-v > A) throw ConfigError("--A must cover v = " + format_double(v));
    return solve_curve(psi, A, curve_options(cfg));
}

int cmd_lf(const RunConfig& cfg, bool threshold) {
    const auto d = driver_of(cfg);
    if (!d.lf) throw ConfigError("the lf command needs an lf driver");
    const auto& model = *d.lf;
    const LFParams q0{need(cfg.alpha, "alpha"), need(cfg.beta, "beta")};
    if (!valid(q0)) throw ConfigError("need alpha, beta > 0 with alpha + beta >= 1");
    const std::int64_t steps = positive(cfg.steps.value_or(100), "steps");
    CsvTable t{{"n", "alpha", "beta", "u", "v", "P_ge_1"}, {}};
    LFParams q = q0;
    for (std::int64_t n = 0; n <= steps; ++n) {
        const auto [u, v] = lf_to_uv(q, model);
        t.rows.push_back({static_cast<double>(n), q.alpha, q.beta, u, v, lf_prob_ge(q, 1)});
        if (n < steps) q = lf_step(q, model);
    }
    const auto direct = free_energy_lf_direct(model, q0);
    json j{{"driver", d.psi.fingerprint()},
           {"alpha", q0.alpha},
           {"beta", q0.beta},
           {"steps", steps},
           {"free_energy_direct", {{"value", num(direct.value)}, {"log_value", num(direct.log_value)},
                                   {"converged", direct.converged}, {"steps", direct.steps}}}};
    bool ok = direct.converged;
    if (model.psi.bounded()) {
        const auto est = free_energy_lf(model, q0);
        j["free_energy"] = to_json(est);
        ok = ok && est.converged;
    }
    if (threshold) {
        const double seed_v = model.constants.root_slope * (q0.beta / q0.alpha - model.constants.root);
        const auto curve = curve_covering(cfg, model.psi, seed_v);
        j["gamma_star"] = to_json(gamma_star(model, q0.alpha, q0.beta, curve));
    }
    emit_csv(cfg, t);
    if (cfg.out) print(j);
    return ok ? 0 : 1;
}

int cmd_clf(const RunConfig& cfg, bool threshold) {
    const auto d = driver_of(cfg);
    if (!d.clf) throw ConfigError("the clf command needs a clf driver");
    const auto& model = *d.clf;
    const CLFParams q0{need(cfg.lambda, "lambda"), need(cfg.rho, "rho")};
    if (!valid(q0)) throw ConfigError("need lambda > 0 and 0 <= rho <= 1");
    const std::int64_t steps = positive(cfg.steps.value_or(100), "steps");
    CsvTable t{{"n", "lambda", "rho", "u", "v", "P_ge_1"}, {}};
    CLFParams q = q0;
    for (std::int64_t n = 0; n <= steps; ++n) {
        const auto [u, v] = clf_to_uv(q, model);
        t.rows.push_back({static_cast<double>(n), q.lambda, q.rho, u, v, clf_tail(q, 1.0)});
        if (n < steps) q = clf_step(q, model);
    }
    json j{{"driver", d.psi.fingerprint()}, {"lambda", q0.lambda}, {"rho", q0.rho}, {"steps", steps}};
    if (threshold) {
        const double seed_v = model.constants.root_slope * (1.0 / q0.lambda - model.constants.root);
        const auto curve = curve_covering(cfg, model.psi, seed_v);
        j["rho_star"] = to_json(rho_star(model, q0.lambda, curve));
    }
    emit_csv(cfg, t);
    if (cfg.out) print(j);
    return 0;
}

json to_json(const McReport& r) {
    json lines = json::array();
    for (const auto& l : r.lines)
        lines.push_back({{"name", l.name},
                         {"empirical", l.empirical},
                         {"predicted", l.predicted},
                         {"tolerance", l.tolerance},
                         {"predicted_sd", l.predicted_sd},
                         {"pass", l.pass}});
    return {{"level", r.level}, {"pass", r.pass}, {"statistics", lines}};
}

int cmd_mc(const RunConfig& cfg) {
    const auto d = driver_of(cfg);
    McOptions opts;
    opts.seed = cfg.seed.value_or(1);
    opts.threads = static_cast<unsigned>(positive(cfg.threads.value_or(1), "threads"));
    const auto size = static_cast<std::size_t>(positive(cfg.pool_size.value_or(1'000'000), "pool-size"));
    const std::int64_t levels = positive(cfg.levels.value_or(3), "levels");
    json j{{"driver", d.psi.fingerprint()}, {"seed", opts.seed}, {"pool_size", size}, {"levels", levels}};
    json reports = json::array();
    bool pass = true;
    if (d.lf) {
        LFParams q{cfg.alpha.value_or(0.6), cfg.beta.value_or(0.9)};
        if (!valid(q)) throw ConfigError("need alpha, beta > 0 with alpha + beta >= 1");
        j["start"] = {{"alpha", q.alpha}, {"beta", q.beta}};
        auto pool = initial_pool(q, size, opts);
        for (std::int64_t k = 1; k <= levels; ++k) {
            pool = mc_step(pool, *d.lf, opts);
            q = lf_step(q, *d.lf);
            const auto rep = compare_to_model(pool, q);
            pass = pass && rep.pass;
            reports.push_back(to_json(rep));
        }
    } else if (d.clf) {
        CLFParams q{cfg.lambda.value_or(2.0), cfg.rho.value_or(0.5)};
        if (!valid(q)) throw ConfigError("need lambda > 0 and 0 <= rho <= 1");
        j["start"] = {{"lambda", q.lambda}, {"rho", q.rho}};
        auto pool = initial_pool(q, size, opts);
        for (std::int64_t k = 1; k <= levels; ++k) {
            pool = mc_step(pool, *d.clf, opts);
            q = clf_step(q, *d.clf);
            const auto rep = compare_to_model(pool, q);
            pass = pass && rep.pass;
            reports.push_back(to_json(rep));
        }
    } else {
        throw ConfigError("mc needs an lf or clf driver");
    }
    j["reports"] = reports;
    j["pass"] = pass;
    print(j);
    if (cfg.out) write_json_file(*cfg.out, j);
    return pass ? 0 : 1;
}

// Curve and refined h for the near-critical lab experiments.
HProvider lab_h(const RunConfig& cfg, const PsiFunction& psi, double v0) {
    if (v0 >= 0.0) return [](double) { return 0.0; };
    const double A = cfg.A.value_or(0.5);
    if (-v0 > A) throw ConfigError("--A must be at least |v0|");
    auto curve = solve_curve(psi, A, curve_options(cfg));
    return precise_h_provider(psi, curve);
}

std::vector<double> eps_of(const RunConfig& cfg) {
    return cfg.eps.value_or(std::vector<double>{1e-4, 1e-5, 1e-6, 1e-7, 1e-8});
}

int finish_lab(const RunConfig& cfg, const ScalingReport& r, bool pass, json extra = {}) {
    auto j = to_json(r, pass);
    for (auto& [k, v] : extra.items()) j[k] = v;
    emit_csv(cfg, to_table(r));
    if (cfg.out) print(j);
    return r.flagged || !pass ? 1 : 0;
}

int cmd_lab(const std::string& which, const RunConfig& cfg) {
    const auto d = driver_of(cfg);
    const auto& psi = d.psi;
    if (which == "critical") {
        const double v0 = cfg.v0.value_or(-0.3);
        const auto r = critical_asymptotics(psi, lab_h(cfg, psi, v0), v0, positive(cfg.n_max.value_or(100'000), "n-max"));
        const bool pass = !r.rows.empty() && std::abs(r.rows.back()[1] - 2.0) < 0.1 && std::abs(r.rows.back()[2] + 2.0) < 0.1;
        return finish_lab(cfg, r, pass);
    }
    if (which == "n-star") {
        const double v0 = cfg.v0.value_or(0.0);
        const auto r = n_star_scaling(psi, lab_h(cfg, psi, v0), v0, eps_of(cfg), cfg.c_star);
        const bool pass = (r.rows.size() < 3 || r.spread < 0.05) && (!r.target || r.relative_gap < 0.05);
        return finish_lab(cfg, r, pass);
    }
    if (which == "c-star") {
        const double v0 = cfg.v0.value_or(-1e-4);
        const auto r = c_star_estimate(psi, lab_h(cfg, psi, v0), v0, eps_of(cfg));
        return finish_lab(cfg, r, r.rows.size() < 3 || r.spread < 0.05);
    }
    if (which == "c-v") {
        const double v0 = cfg.v0.value_or(0.0);
        const auto h = lab_h(cfg, psi, v0);
        const auto eps = eps_of(cfg);
        std::optional<double> c_star = cfg.c_star;
        if (!c_star && v0 < 0.0) {
            const auto cs = c_star_estimate(psi, h, v0, eps);
            c_star = std::isfinite(cs.extrapolated_limit) ? cs.extrapolated_limit : cs.raw_last;
        }
        const auto r = C_v_estimate(psi, h, v0, eps, c_star);
        return finish_lab(cfg, r, !r.target || r.relative_gap < 0.1, {{"c_star", opt(c_star)}});
    }
    if (which == "euler") {
        const auto r = euler_tan_check(cfg.eps.value_or(std::vector<double>{1e-4, 1e-6, 1e-8}),
                                       cfg.t.value_or(std::vector<double>{0.3, 0.7, 1.0}));
        return finish_lab(cfg, r, r.raw_last <= 0.02);
    }
    if (which == "sandwich") {
        const auto r = sandwich_check(psi, need(cfg.u0, "u0"), cfg.v0.value_or(0.0));
        json j{{"experiment", "sandwich"},
               {"driver", psi.fingerprint()},
               {"u0", r.u0},
               {"v0", r.v0},
               {"estimate", to_json(r.estimate)},
               {"log_F_1_0", r.log_f10},
               {"slack_low", r.slack_low},
               {"slack_high", r.slack_high},
               {"log_width", r.log_width},
               {"width_bound", r.width_bound},
               {"pass", r.pass}};
        print(j);
        if (cfg.out) write_json_file(*cfg.out, j);
        return r.pass && r.estimate.converged ? 0 : 1;
    }
    throw ConfigError("unknown lab experiment " + which);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-parameter recursion lab: phase diagram, critical curve, free energy and model checks."};
    app.fallthrough();
    app.require_subcommand(1);

    std::optional<std::string> config_path, reference;
    RunConfig flags;
    bool threshold = false;
    app.add_option("--config", config_path, "INI configuration file; flags override its values");
    app.add_option("--driver", flags.driver, "affine | fig1 | fig1-clamped | lf:p=..,z=.. | clf:p=..,z=..");
    app.add_option("--A", flags.A, "curve extent: the curve lives on [-A, 0]");
    app.add_option("--m", flags.m, "curve grid intervals");
    app.add_option("--K", flags.K, "sweep damping constant (default: chosen from the driver)");
    app.add_option("--tol", flags.tol, "convergence tolerance");
    app.add_option("--max-sweeps", flags.max_sweeps, "curve sweep cap");
    app.add_option("--sweeps", flags.sweeps, "curve: stop after exactly this many sweeps");
    app.add_option("--u0", flags.u0, "initial u");
    app.add_option("--v0", flags.v0, "initial v");
    app.add_option("--max-iter", flags.max_iter, "iteration cap for orbits");
    app.add_option("--steps", flags.steps, "number of model steps");
    app.add_option("--alpha", flags.alpha, "LF alpha");
    app.add_option("--beta", flags.beta, "LF beta");
    app.add_option("--lambda", flags.lambda, "CLF lambda");
    app.add_option("--rho", flags.rho, "CLF rho");
    app.add_option_function<std::string>("--eps", [&](const std::string& s) { flags.eps = parse_list(s); },
                                         "comma-separated distances to the curve, decreasing");
    app.add_option_function<std::string>("--t", [&](const std::string& s) { flags.t = parse_list(s); },
                                         "comma-separated rescaled times");
    app.add_option("--n-max", flags.n_max, "last step for the critical decay table");
    app.add_option("--c-star", flags.c_star, "known c_star for v0 < 0 targets");
    app.add_option("--seed", flags.seed, "Monte Carlo seed");
    app.add_option("--pool-size", flags.pool_size, "Monte Carlo pool size");
    app.add_option("--levels", flags.levels, "Monte Carlo levels");
    app.add_option("--threads", flags.threads, "worker threads (results do not depend on it)");
    app.add_option("--out", flags.out, "output file (CSV table, or JSON for table-less commands)");
    app.add_option("--reference", reference, "curve: reference CSV to diff against");
    app.add_flag("--threshold", threshold, "lf/clf: also compute the critical scaling of the family");

    auto* psi_cmd = app.add_subcommand("psi", "driver summary");
    auto* classify_cmd = app.add_subcommand("classify", "phase of (u0, v0)");
    auto* curve_cmd = app.add_subcommand("curve", "solve the critical curve, CSV x,g,h,residual_local");
    auto* fe_cmd = app.add_subcommand("free-energy", "free energy of (u0, v0)");
    auto* lf_cmd = app.add_subcommand("lf", "LF parameter orbit");
    auto* clf_cmd = app.add_subcommand("clf", "CLF parameter orbit");
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo pool check against the closed-form laws");
    mc_cmd->add_subcommand("validate", "same as plain mc");
    auto* lab_cmd = app.add_subcommand("lab", "near-critical experiments");
    lab_cmd->require_subcommand(1);
    for (const char* name : {"critical", "n-star", "c-star", "c-v", "euler", "sandwich"}) lab_cmd->add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        RunConfig cfg = config_path ? merge(load_config(*config_path), flags) : flags;
        if (psi_cmd->parsed()) return cmd_psi(cfg);
        if (classify_cmd->parsed()) return cmd_classify(cfg);
        if (curve_cmd->parsed()) return cmd_curve(cfg, reference);
        if (fe_cmd->parsed()) return cmd_free_energy(cfg);
        if (lf_cmd->parsed()) return cmd_lf(cfg, threshold);
        if (clf_cmd->parsed()) return cmd_clf(cfg, threshold);
        if (mc_cmd->parsed()) return cmd_mc(cfg);
        for (auto* sub : lab_cmd->get_subcommands())
            if (sub->parsed()) return cmd_lab(sub->get_name(), cfg);
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
