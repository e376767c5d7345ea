#pragma once

// Run configuration: driver strings and INI files with typed sections.
//
// Driver strings: affine | fig1 | fig1-clamped | lf:p=0.5,z=1 |
// clf:p=0.5,z=1:0.5;2:0.5 where z lists value:prob atoms separated by ';'
// (a bare value means a point mass).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drlab/driver.hpp"
#include "drlab/models.hpp"

namespace drlab {

enum class DriverKind { Affine, Fig1, Fig1Clamped, LF, CLF };

struct DriverSpec {
    DriverKind kind = DriverKind::Affine;
    double p = 0.5;
    std::vector<Atom> atoms;
};

/// Throws ConfigError.
[[nodiscard]] DriverSpec parse_driver(const std::string& text);
[[nodiscard]] std::string describe(const DriverSpec& spec);

struct BuiltDriver {
    DriverSpec spec;
    PsiFunction psi;
    std::optional<LFModel> lf;
    std::optional<CLFModel> clf;
};

/// Validation failures in Z or p surface as ConfigError.
[[nodiscard]] BuiltDriver build_driver(const DriverSpec& spec);

/// Every field is optional so file values and flags can be layered.
struct RunConfig {
    std::optional<std::string> driver;
    // curve
    std::optional<double> A;
    std::optional<std::int64_t> m;
    std::optional<double> K;
    std::optional<double> tol;
    std::optional<std::int64_t> max_sweeps;
    std::optional<std::int64_t> sweeps;
    // orbit
    std::optional<double> u0;
    std::optional<double> v0;
    std::optional<std::int64_t> max_iter;
    std::optional<std::int64_t> steps;
    // model
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> lambda;
    std::optional<double> rho;
    // lab
    std::optional<std::vector<double>> eps;
    std::optional<std::vector<double>> t;
    std::optional<std::int64_t> n_max;
    std::optional<double> c_star;
    // mc
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> pool_size;
    std::optional<std::int64_t> levels;
    std::optional<std::int64_t> threads;
    // output
    std::optional<std::string> out;
};

/// INI file with sections [driver] (kind, p, z or spec), [curve], [orbit],
/// [model], [lab], [mc] and [output]. Unknown sections or keys are errors.
[[nodiscard]] RunConfig load_config(const std::string& path);
[[nodiscard]] RunConfig parse_config(const std::string& text);

/// Fields set in `over` replace those in `base`.
[[nodiscard]] RunConfig merge(RunConfig base, const RunConfig& over);

[[nodiscard]] std::vector<double> parse_list(const std::string& text);

}  // namespace drlab
