#include "drlab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "drlab/errors.hpp"

namespace drlab {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    char* end = nullptr;
    const double x = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(x))
        throw ConfigError(what + ": not a finite number: '" + s + "'");
    return x;
}

std::int64_t to_int(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    std::int64_t x = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError(what + ": not an integer: '" + s + "'");
    return x;
}

std::uint64_t to_uint(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError(what + ": not a non-negative integer: '" + s + "'");
    return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
    return out;
}

std::vector<Atom> parse_atoms(const std::string& text) {
    std::vector<Atom> atoms;
    for (const auto& item : split(text, ';')) {
        if (item.empty()) throw ConfigError("empty atom in '" + text + "'");
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            atoms.push_back({to_double(item, "atom value"), 1.0});
        } else {
            atoms.push_back(
                {to_double(item.substr(0, colon), "atom value"), to_double(item.substr(colon + 1), "atom probability")});
        }
    }
    if (atoms.empty()) throw ConfigError("no atoms given");
    return atoms;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

DriverKind parse_kind(const std::string& k) {
    if (k == "affine") return DriverKind::Affine;
    if (k == "fig1") return DriverKind::Fig1;
    if (k == "fig1-clamped") return DriverKind::Fig1Clamped;
    if (k == "lf") return DriverKind::LF;
    if (k == "clf") return DriverKind::CLF;
    throw ConfigError("unknown driver kind '" + k + "'");
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(to_double(item, "list entry"));
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

DriverSpec parse_driver(const std::string& text) {
    const std::string t = trim(text);
    const auto colon = t.find(':');
    DriverSpec spec;
    spec.kind = parse_kind(t.substr(0, colon));
    const bool model = spec.kind == DriverKind::LF || spec.kind == DriverKind::CLF;
    if (!model) {
        if (colon != std::string::npos) throw ConfigError("driver '" + t.substr(0, colon) + "' takes no parameters");
        return spec;
    }
    if (colon == std::string::npos) throw ConfigError("driver needs p and z, e.g. lf:p=0.5,z=1");
    bool have_p = false;
    for (const auto& kv : split(t.substr(colon + 1), ',')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value in driver, got '" + kv + "'");
        const std::string key = trim(kv.substr(0, eq));
        const std::string val = kv.substr(eq + 1);
        if (key == "p") {
            spec.p = to_double(val, "p");
            have_p = true;
        } else if (key == "z") {
            spec.atoms = parse_atoms(val);
        } else {
            throw ConfigError("unknown driver key '" + key + "'");
        }
    }
    if (!have_p || spec.atoms.empty()) throw ConfigError("driver needs both p and z");
    return spec;
}

std::string describe(const DriverSpec& spec) {
    switch (spec.kind) {
        case DriverKind::Affine: return "affine";
        case DriverKind::Fig1: return "fig1";
        case DriverKind::Fig1Clamped: return "fig1-clamped";
        case DriverKind::LF:
        case DriverKind::CLF: {
            std::string s = spec.kind == DriverKind::LF ? "lf:p=" : "clf:p=";
            s += fmt(spec.p) + ",z=";
            for (std::size_t i = 0; i < spec.atoms.size(); ++i)
                s += (i ? ";" : "") + fmt(spec.atoms[i].value) + ":" + fmt(spec.atoms[i].prob);
            return s;
        }
    }
    return "?";
}

BuiltDriver build_driver(const DriverSpec& spec) {
    try {
        switch (spec.kind) {
            case DriverKind::Affine: return {spec, make_affine_psi(), {}, {}};
            case DriverKind::Fig1: return {spec, make_fig1_psi(), {}, {}};
            case DriverKind::Fig1Clamped: return {spec, make_fig1_clamped_psi(), {}, {}};
            case DriverKind::LF: {
                auto model = LFModel::make(spec.p, ZSpecDiscrete(spec.atoms));
                auto psi = model.psi;
                return {spec, psi, std::move(model), {}};
            }
            case DriverKind::CLF: {
                auto model = CLFModel::make(spec.p, ZSpecContinuous(spec.atoms));
                auto psi = model.psi;
                return {spec, psi, {}, std::move(model)};
            }
        }
    } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown driver kind");
}

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    RunConfig c;
    using Setter = std::function<void(const std::string&)>;
    auto dbl = [](std::optional<double>& f, const char* name) -> Setter {
        return [&f, name](const std::string& s) { f = to_double(s, name); };
    };
    auto i64 = [](std::optional<std::int64_t>& f, const char* name) -> Setter {
        return [&f, name](const std::string& s) { f = to_int(s, name); };
    };
    std::optional<std::string> kind, p, z;
    const std::map<std::string, std::map<std::string, Setter>> schema{
        {"driver",
         {{"spec", [&](const std::string& s) { c.driver = trim(s); }},
          {"kind", [&](const std::string& s) { kind = trim(s); }},
          {"p", [&](const std::string& s) { p = trim(s); }},
          {"z", [&](const std::string& s) { z = trim(s); }}}},
        {"curve",
         {{"A", dbl(c.A, "A")},
          {"m", i64(c.m, "m")},
          {"K", dbl(c.K, "K")},
          {"tol", dbl(c.tol, "tol")},
          {"max_sweeps", i64(c.max_sweeps, "max_sweeps")},
          {"sweeps", i64(c.sweeps, "sweeps")}}},
        {"orbit",
         {{"u0", dbl(c.u0, "u0")},
          {"v0", dbl(c.v0, "v0")},
          {"max_iter", i64(c.max_iter, "max_iter")},
          {"steps", i64(c.steps, "steps")}}},
        {"model",
         {{"alpha", dbl(c.alpha, "alpha")},
          {"beta", dbl(c.beta, "beta")},
          {"lambda", dbl(c.lambda, "lambda")},
          {"rho", dbl(c.rho, "rho")}}},
        {"lab",
         {{"eps", [&](const std::string& s) { c.eps = parse_list(s); }},
          {"t", [&](const std::string& s) { c.t = parse_list(s); }},
          {"n_max", i64(c.n_max, "n_max")},
          {"c_star", dbl(c.c_star, "c_star")}}},
        {"mc",
         {{"seed", [&](const std::string& s) { c.seed = to_uint(s, "seed"); }},
          {"pool_size", i64(c.pool_size, "pool_size")},
          {"levels", i64(c.levels, "levels")},
          {"threads", i64(c.threads, "threads")}}},
        {"output", {{"out", [&](const std::string& s) { c.out = trim(s); }}}},
    };
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
        const auto sec = schema.find(section);
        if (sec == schema.end()) throw ConfigError("config: unknown section [" + section + "]");
        for (const auto& [key, node] : body) {
            const auto field = sec->second.find(key);
            if (field == sec->second.end()) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
            field->second(node.data());
        }
    }
    if (kind) {
        if (c.driver) throw ConfigError("config: give either driver.spec or driver.kind, not both");
        std::string s = *kind;
        if (p || z) s += ":p=" + p.value_or("") + ",z=" + z.value_or("");
        c.driver = s;
    } else if (p || z) {
        throw ConfigError("config: driver.p and driver.z need driver.kind");
    }
    if (c.driver) (void)parse_driver(*c.driver);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

RunConfig merge(RunConfig base, const RunConfig& over) {
    auto take = [](auto& dst, const auto& src) {
        if (src) dst = src;
    };
    take(base.driver, over.driver);
    take(base.A, over.A);
    take(base.m, over.m);
    take(base.K, over.K);
    take(base.tol, over.tol);
    take(base.max_sweeps, over.max_sweeps);
    take(base.sweeps, over.sweeps);
    take(base.u0, over.u0);
    take(base.v0, over.v0);
    take(base.max_iter, over.max_iter);
    take(base.steps, over.steps);
    take(base.alpha, over.alpha);
    take(base.beta, over.beta);
    take(base.lambda, over.lambda);
    take(base.rho, over.rho);
    take(base.eps, over.eps);
    take(base.t, over.t);
    take(base.n_max, over.n_max);
    take(base.c_star, over.c_star);
    take(base.seed, over.seed);
    take(base.pool_size, over.pool_size);
    take(base.levels, over.levels);
    take(base.threads, over.threads);
    take(base.out, over.out);
    return base;
}

}  // namespace drlab
