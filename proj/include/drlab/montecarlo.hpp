#pragma once

// Pool Monte Carlo for X_{n+1} = (X^(1) + ... + X^(R) - Z)_+ with R geometric:
// each level resamples the previous pool with replacement.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "drlab/models.hpp"

namespace drlab {

/// 64-bit Mersenne twister with fixed uniform conversions, so streams are
/// reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::seed_seq& seq) : eng_(seq) {}
    Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    /// Uniform on (0, 1].
    double uniform_open() { return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53; }
    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

/// Support {1, 2, ...}, P(R = k) = p (1 - p)^{k-1}.
[[nodiscard]] std::int64_t sample_geometric(double p, Rng& rng);
[[nodiscard]] std::int64_t sample_lf(const LFParams& q, Rng& rng);
[[nodiscard]] double sample_clf(const CLFParams& q, Rng& rng);

struct SamplePool {
    std::int64_t level = 0;
    std::vector<double> samples;
    std::uint64_t seed = 0;
    bool integer_valued = false;

    [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
};

struct McOptions {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::size_t chunk = 4096;  // samples per RNG stream; fixes the result independently of threads
};

[[nodiscard]] SamplePool initial_pool(const LFParams& q, std::size_t size, const McOptions& opts);
[[nodiscard]] SamplePool initial_pool(const CLFParams& q, std::size_t size, const McOptions& opts);

[[nodiscard]] SamplePool mc_step(const SamplePool& pool, const LFModel& model, const McOptions& opts);
[[nodiscard]] SamplePool mc_step(const SamplePool& pool, const CLFModel& model, const McOptions& opts);

struct EmpiricalSummary {
    double mass_at_zero = 0.0;
    std::vector<std::pair<double, double>> tail_probs;  // (threshold, P(X >= t) or P(X > t))
    double mean = 0.0;
    std::size_t pool_size = 0;
};

/// Tail thresholds are inclusive (X >= t) for integer pools, strict otherwise.
[[nodiscard]] EmpiricalSummary summarize(const SamplePool& pool, const std::vector<double>& thresholds);

struct StatLine {
    std::string name;
    double empirical = 0.0;
    double predicted = 0.0;
    double tolerance = 0.0;
    double predicted_sd = 0.0;  // sd of one sample under the predicted law
    bool pass = false;
};

struct McReport {
    std::vector<StatLine> lines;
    bool pass = false;
    std::size_t pool_size = 0;
    std::int64_t level = 0;
};

/// Mass at zero, tails at k = 1..5 and the mean, each within 4/sqrt(N).
[[nodiscard]] McReport compare_to_model(const SamplePool& pool, const LFParams& predicted);
/// Mass at zero, tails at (k/2)/lambda for k = 1..5 and the mean, each within 4/sqrt(N).
[[nodiscard]] McReport compare_to_model(const SamplePool& pool, const CLFParams& predicted);

}  // namespace drlab
