#include "drlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>

#include "drlab/errors.hpp"

namespace drlab {

namespace {

constexpr std::uint64_t kInitialStream = 0x494e4954ULL;  // distinct from every level index

std::uint32_t lo32(std::uint64_t x) { return static_cast<std::uint32_t>(x); }
std::uint32_t hi32(std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); }

/// Fills `out` chunk by chunk; chunk c always draws from stream (seed, key, c).
template <class Fn>
void fill_chunked(std::vector<double>& out, std::uint64_t seed, std::uint64_t key, const McOptions& opts, Fn fn) {
    const std::size_t n = out.size();
    const std::size_t chunk = std::max<std::size_t>(opts.chunk, 1);
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t c = first; c < n_chunks; c += stride) {
            Rng rng(seed, key, c);
            const std::size_t end = std::min(n, (c + 1) * chunk);
            for (std::size_t i = c * chunk; i < end; ++i) out[i] = fn(rng);
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(n_chunks)));
    if (threads == 1) {
        work(0, 1);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
}

void check_size(std::size_t size) {
    if (size < 1000) throw ArgumentError("sample pools need at least 1000 samples");
}

double tail_sd(double prob) { return std::sqrt(std::max(0.0, prob * (1.0 - prob))); }

McReport finish(std::vector<StatLine> lines, const SamplePool& pool) {
    McReport rep;
    rep.pool_size = pool.size();
    rep.level = pool.level;
    rep.pass = true;
    const double tol = 4.0 / std::sqrt(static_cast<double>(pool.size()));
    for (auto& l : lines) {
        l.tolerance = tol;
        l.pass = std::abs(l.empirical - l.predicted) <= tol;
        rep.pass = rep.pass && l.pass;
    }
    rep.lines = std::move(lines);
    return rep;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk) : eng_() {
    std::seed_seq seq{lo32(seed), hi32(seed), lo32(stream), hi32(stream), lo32(chunk), hi32(chunk)};
    eng_.seed(seq);
}

std::int64_t sample_geometric(double p, Rng& rng) {
    if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("geometric law needs 0 < p <= 1");
    if (p == 1.0) return 1;
    return 1 + static_cast<std::int64_t>(std::floor(std::log(rng.uniform_open()) / std::log1p(-p)));
}

std::int64_t sample_lf(const LFParams& q, Rng& rng) {
    const double s = q.alpha + q.beta;
    if (rng.uniform() >= 1.0 / s) return 0;
    const double r = q.beta / s;
    if (r <= 0.0) return 1;
    return 1 + static_cast<std::int64_t>(std::floor(std::log(rng.uniform_open()) / std::log(r)));
}

double sample_clf(const CLFParams& q, Rng& rng) {
    if (rng.uniform() >= q.rho) return 0.0;
    return -std::log(rng.uniform_open()) / q.lambda;
}

SamplePool initial_pool(const LFParams& q, std::size_t size, const McOptions& opts) {
    check_size(size);
    if (!valid(q)) throw ArgumentError("initial_pool: invalid LF parameters");
    SamplePool pool{0, std::vector<double>(size), opts.seed, true};
    fill_chunked(pool.samples, opts.seed, kInitialStream, opts,
                 [&q](Rng& rng) { return static_cast<double>(sample_lf(q, rng)); });
    return pool;
}

SamplePool initial_pool(const CLFParams& q, std::size_t size, const McOptions& opts) {
    check_size(size);
    if (!valid(q)) throw ArgumentError("initial_pool: invalid CLF parameters");
    SamplePool pool{0, std::vector<double>(size), opts.seed, false};
    fill_chunked(pool.samples, opts.seed, kInitialStream, opts, [&q](Rng& rng) { return sample_clf(q, rng); });
    return pool;
}

namespace {

template <class ZLaw>
SamplePool step_pool(const SamplePool& pool, double p, const ZLaw& z, const McOptions& opts) {
    if (pool.samples.empty()) throw ArgumentError("mc_step: empty pool");
    const auto& prev = pool.samples;
    const auto n = static_cast<double>(prev.size());
    const std::size_t last = prev.size() - 1;
    SamplePool next{pool.level + 1, std::vector<double>(prev.size()), pool.seed, pool.integer_valued};
    fill_chunked(next.samples, pool.seed, static_cast<std::uint64_t>(next.level), opts, [&](Rng& rng) {
        const std::int64_t r = sample_geometric(p, rng);
        double sum = 0.0;
        for (std::int64_t j = 0; j < r; ++j) sum += prev[std::min(last, static_cast<std::size_t>(rng.uniform() * n))];
        return std::max(0.0, sum - z.sample(rng.uniform()));
    });
    return next;
}

}  // namespace

SamplePool mc_step(const SamplePool& pool, const LFModel& model, const McOptions& opts) {
    return step_pool(pool, model.p, model.z, opts);
}

SamplePool mc_step(const SamplePool& pool, const CLFModel& model, const McOptions& opts) {
    return step_pool(pool, model.p, model.z, opts);
}

EmpiricalSummary summarize(const SamplePool& pool, const std::vector<double>& thresholds) {
    EmpiricalSummary s;
    s.pool_size = pool.size();
    if (pool.samples.empty()) return s;
    std::vector<std::size_t> counts(thresholds.size(), 0);
    std::size_t zeros = 0;
    double total = 0.0;
    for (double x : pool.samples) {
        if (x == 0.0) ++zeros;
        total += x;
        for (std::size_t k = 0; k < thresholds.size(); ++k) {
            if (pool.integer_valued ? x >= thresholds[k] : x > thresholds[k]) ++counts[k];
        }
    }
    const auto n = static_cast<double>(pool.size());
    s.mass_at_zero = static_cast<double>(zeros) / n;
    s.mean = total / n;
    for (std::size_t k = 0; k < thresholds.size(); ++k)
        s.tail_probs.emplace_back(thresholds[k], static_cast<double>(counts[k]) / n);
    return s;
}

McReport compare_to_model(const SamplePool& pool, const LFParams& predicted) {
    if (pool.size() < 10'000) throw ArgumentError("compare_to_model needs at least 10^4 samples");
    const std::vector<double> ks{1, 2, 3, 4, 5};
    const auto emp = summarize(pool, ks);
    std::vector<StatLine> lines;
    const double p0 = lf_prob_zero(predicted);
    lines.push_back({"P(X=0)", emp.mass_at_zero, p0, 0.0, tail_sd(p0), false});
    for (std::size_t k = 0; k < ks.size(); ++k) {
        const double pk = lf_prob_ge(predicted, static_cast<std::int64_t>(ks[k]));
        lines.push_back({"P(X>=" + std::to_string(k + 1) + ")", emp.tail_probs[k].second, pk, 0.0, tail_sd(pk), false});
    }
    const double s = predicted.alpha + predicted.beta;
    const double r = predicted.beta / s;
    const double second = (1.0 + r) / ((1.0 - r) * (1.0 - r)) / s;
    const double mean = lf_mean(predicted);
    lines.push_back({"mean", emp.mean, mean, 0.0, std::sqrt(std::max(0.0, second - mean * mean)), false});
    return finish(std::move(lines), pool);
}

McReport compare_to_model(const SamplePool& pool, const CLFParams& predicted) {
    if (pool.size() < 10'000) throw ArgumentError("compare_to_model needs at least 10^4 samples");
    std::vector<double> xs;
    for (int k = 1; k <= 5; ++k) xs.push_back(0.5 * k / predicted.lambda);
    const auto emp = summarize(pool, xs);
    std::vector<StatLine> lines;
    const double p0 = 1.0 - predicted.rho;
    lines.push_back({"P(X=0)", emp.mass_at_zero, p0, 0.0, tail_sd(p0), false});
    char name[64];
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double pk = clf_tail(predicted, xs[k]);
        std::snprintf(name, sizeof name, "P(X>%.17g)", xs[k]);
        lines.push_back({name, emp.tail_probs[k].second, pk, 0.0, tail_sd(pk), false});
    }
    const double mean = clf_mean(predicted);
    const double var = 2.0 * predicted.rho / (predicted.lambda * predicted.lambda) - mean * mean;
    lines.push_back({"mean", emp.mean, mean, 0.0, std::sqrt(std::max(0.0, var)), false});
    return finish(std::move(lines), pool);
}

}  // namespace drlab
