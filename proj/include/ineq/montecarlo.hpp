#ifndef INEQ_MONTECARLO_HPP
#define INEQ_MONTECARLO_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ineq/random.hpp"
#include "ineq/survey.hpp"

// Replicated-sampling experiments: draw R independent samples from a fixed
// population, estimate the index with its linearized variance each time,
// and compare the spread of the estimates with the variance estimator's
// mean.  A ratio near one and near-nominal interval coverage are the
// finite-sample signatures of the linearization being adequate.
//
// Replicate r draws from a generator seeded with derive_seed(master_seed, r),
// so results are independent of execution order and thread count.

namespace ineq {

struct PopulationSpec {
    enum class Source { inline_values, lognormal, pareto, uniform };

    Source source = Source::inline_values;
    std::vector<double> values;  // inline_values
    int size = 0;                // generators
    std::uint64_t seed = 0;
    double sigma = 1.0;  // lognormal
    double alpha = 1.0;  // pareto shape
    double lo = 0.0, hi = 1.0;  // uniform

    static PopulationSpec inline_values_of(std::vector<double> v) {
        PopulationSpec p;
        p.source = Source::inline_values;
        p.values = std::move(v);
        return p;
    }
    static PopulationSpec lognormal_of(int size, double sigma, std::uint64_t seed) {
        PopulationSpec p;
        p.source = Source::lognormal;
        p.size = size;
        p.sigma = sigma;
        p.seed = seed;
        return p;
    }
    static PopulationSpec pareto_of(int size, double alpha, std::uint64_t seed) {
        PopulationSpec p;
        p.source = Source::pareto;
        p.size = size;
        p.alpha = alpha;
        p.seed = seed;
        return p;
    }
    static PopulationSpec uniform_of(int size, double lo, double hi, std::uint64_t seed) {
        PopulationSpec p;
        p.source = Source::uniform;
        p.size = size;
        p.lo = lo;
        p.hi = hi;
        p.seed = seed;
        return p;
    }

    std::vector<double> realize() const {
        if (source == Source::inline_values) {
            if (values.size() < 2)
                throw std::invalid_argument("population: need at least 2 values");
            return values;
        }
        if (size < 2) throw std::invalid_argument("population: need size >= 2");
        std::mt19937_64 gen(seed);
        std::vector<double> out(static_cast<std::size_t>(size));
        switch (source) {
            case Source::lognormal:
                if (!(sigma > 0.0))
                    throw std::invalid_argument("population: lognormal needs sigma > 0");
                for (double& v : out) v = rng::lognormal(gen, sigma);
                break;
            case Source::pareto:
                if (!(alpha > 0.0))
                    throw std::invalid_argument("population: pareto needs alpha > 0");
                for (double& v : out) v = rng::pareto(gen, alpha);
                break;
            case Source::uniform:
                if (!(lo < hi))
                    throw std::invalid_argument("population: uniform needs lo < hi");
                for (double& v : out) v = rng::uniform_range(gen, lo, hi);
                break;
            default:
                break;
        }
        return out;
    }

    std::string fingerprint() const {
        char buf[128];
        switch (source) {
            case Source::inline_values:
                std::snprintf(buf, sizeof buf, "inline(n=%zu)", values.size());
                break;
            case Source::lognormal:
                std::snprintf(buf, sizeof buf, "lognormal(sigma=%.17g,N=%d,seed=%llu)",
                              sigma, size, static_cast<unsigned long long>(seed));
                break;
            case Source::pareto:
                std::snprintf(buf, sizeof buf, "pareto(alpha=%.17g,N=%d,seed=%llu)",
                              alpha, size, static_cast<unsigned long long>(seed));
                break;
            case Source::uniform:
                std::snprintf(buf, sizeof buf,
                              "uniform(lo=%.17g,hi=%.17g,N=%d,seed=%llu)", lo, hi,
                              size, static_cast<unsigned long long>(seed));
                break;
        }
        return buf;
    }
};

struct DesignSpec {
    SamplingDesign::Kind kind = SamplingDesign::Kind::srswor;
    int n = 0;                          // srswor
    double p = 0.0;                     // bernoulli
    std::vector<double> pi;             // poisson (size N)
    std::vector<int> strata_sizes;      // stratified: contiguous blocks
    std::vector<int> n_per_stratum;

    static DesignSpec srswor_of(int n) {
        DesignSpec d;
        d.kind = SamplingDesign::Kind::srswor;
        d.n = n;
        return d;
    }
    static DesignSpec bernoulli_of(double p) {
        DesignSpec d;
        d.kind = SamplingDesign::Kind::bernoulli;
        d.p = p;
        return d;
    }
    static DesignSpec poisson_of(std::vector<double> pi) {
        DesignSpec d;
        d.kind = SamplingDesign::Kind::poisson;
        d.pi = std::move(pi);
        return d;
    }
    static DesignSpec stratified_of(std::vector<int> sizes, std::vector<int> n_h) {
        DesignSpec d;
        d.kind = SamplingDesign::Kind::stratified_srswor;
        d.strata_sizes = std::move(sizes);
        d.n_per_stratum = std::move(n_h);
        return d;
    }

    SamplingDesign build(int population_size) const {
        switch (kind) {
            case SamplingDesign::Kind::srswor:
                return SamplingDesign::srswor(population_size, n);
            case SamplingDesign::Kind::bernoulli:
                return SamplingDesign::bernoulli(population_size, p);
            case SamplingDesign::Kind::poisson:
                if (static_cast<int>(pi.size()) != population_size)
                    throw std::invalid_argument("design: poisson pi size != N");
                return SamplingDesign::poisson(pi);
            case SamplingDesign::Kind::stratified_srswor: {
                if (strata_sizes.size() != n_per_stratum.size())
                    throw std::invalid_argument("design: strata arrays size mismatch");
                std::vector<int> stratum_of_unit;
                stratum_of_unit.reserve(static_cast<std::size_t>(population_size));
                for (std::size_t h = 0; h < strata_sizes.size(); ++h)
                    for (int i = 0; i < strata_sizes[h]; ++i)
                        stratum_of_unit.push_back(static_cast<int>(h));
                if (static_cast<int>(stratum_of_unit.size()) != population_size)
                    throw std::invalid_argument("design: strata sizes do not sum to N");
                return SamplingDesign::stratified_srswor(stratum_of_unit, n_per_stratum);
            }
        }
        throw std::logic_error("DesignSpec::build: unreachable");
    }

    std::string fingerprint() const {
        char buf[96];
        switch (kind) {
            case SamplingDesign::Kind::srswor:
                std::snprintf(buf, sizeof buf, "srswor(n=%d)", n);
                break;
            case SamplingDesign::Kind::bernoulli:
                std::snprintf(buf, sizeof buf, "bernoulli(p=%.17g)", p);
                break;
            case SamplingDesign::Kind::poisson:
                std::snprintf(buf, sizeof buf, "poisson(units=%zu)", pi.size());
                break;
            case SamplingDesign::Kind::stratified_srswor:
                std::snprintf(buf, sizeof buf, "stratified(strata=%zu)",
                              strata_sizes.size());
                break;
        }
        return buf;
    }
};

struct SimulationConfig {
    PopulationSpec population;
    DesignSpec design;
    IndexKind index = IndexKind::gini();
    int replicates = 0;
    double level = 0.95;
    std::uint64_t master_seed = 0;
    /// Diagnostic: linearize at the (known) population measure instead of
    /// the empirical one.
    bool linearize_at_population = false;

    std::string fingerprint() const {
        char tail[96];
        std::snprintf(tail, sizeof tail, "R=%d|level=%.17g|master_seed=%llu|z=%s",
                      replicates, level, static_cast<unsigned long long>(master_seed),
                      linearize_at_population ? "population" : "empirical");
        return "index=" + index.name() + "|design=" + design.fingerprint() +
               "|pop=" + population.fingerprint() + "|" + tail;
    }
};

struct ReplicateRow {
    int replicate = 0;
    double estimate = 0.0;
    double variance = 0.0;
    double raw_variance = 0.0;
    double std_error = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    bool covered = false;
    bool degenerate = false;
};

struct SimulationReport {
    std::string fingerprint;
    double true_value = 0.0;
    double mean_estimate = 0.0;
    double empirical_variance = 0.0;
    double mean_linearized_variance = 0.0;
    double variance_ratio = 0.0;
    double coverage = 0.0;
    int replicates = 0;
    int degenerate_count = 0;
    std::vector<ReplicateRow> per_replicate;
    double timing_seconds = 0.0;
};

/// Run the replicated experiment.  Deterministic for a given config:
/// replicate r always uses seed derive_seed(master_seed, r), rows are
/// aggregated in replicate order, and the thread count only affects timing.
inline SimulationReport run(const SimulationConfig& config, int threads = 1) {
    if (config.replicates < 2)
        throw std::invalid_argument("simulation: need at least 2 replicates");
    if (!(config.level > 0.0 && config.level < 1.0))
        throw std::invalid_argument("simulation: level must lie in (0,1)");
    const auto start = std::chrono::steady_clock::now();

    const std::vector<double> population = config.population.realize();
    const SamplingDesign design = config.design.build(static_cast<int>(population.size()));
    const DiscreteMeasure population_measure = DiscreteMeasure::from_values(population);
    const double true_value = index_value(config.index, population_measure);
    IndexResult population_result;
    if (config.linearize_at_population)
        population_result = index_result(config.index, population_measure);

    const int R = config.replicates;
    std::vector<ReplicateRow> rows(static_cast<std::size_t>(R));

    const auto worker = [&](int begin, int end) {
        for (int r = begin; r < end; ++r) {
            ReplicateRow row;
            row.replicate = r;
            const std::uint64_t seed =
                rng::derive_seed(config.master_seed, static_cast<std::uint64_t>(r));
            try {
                const SampleData sample = draw_sample(design, population, seed);
                VarianceReport report;
                if (config.linearize_at_population) {
                    std::vector<double> z;
                    z.reserve(sample.units.size());
                    for (const SampleUnit& u : sample.units)
                        z.push_back(population_result.influence_at(u.y));
                    report = estimate_with_variance_given(config.index, sample,
                                                          config.level, z);
                } else {
                    report = estimate_with_variance(config.index, sample, config.level);
                }
                row.estimate = report.estimate;
                row.variance = report.variance;
                row.raw_variance = report.raw_variance;
                row.std_error = report.std_error;
                row.ci_lower = report.ci_lower;
                row.ci_upper = report.ci_upper;
                row.covered = report.ci_lower <= true_value && true_value <= report.ci_upper;
            } catch (const std::domain_error&) {
                row.degenerate = true;
            } catch (const std::invalid_argument&) {
                row.degenerate = true;
            }
            rows[static_cast<std::size_t>(r)] = row;
        }
    };

    if (threads <= 1) {
        worker(0, R);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (R + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int begin = t * chunk;
            const int end = std::min(R, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (std::thread& t : pool) t.join();
    }

    SimulationReport report;
    report.fingerprint = config.fingerprint();
    report.true_value = true_value;
    report.replicates = R;
    report.per_replicate = std::move(rows);

    // aggregate in replicate order; shifted sums keep an all-equal run
    // (census) at exactly zero empirical variance
    int ok = 0, covered = 0;
    double shift = 0.0;
    bool have_shift = false;
    double sum_shifted = 0.0, sum_variance = 0.0;
    for (const ReplicateRow& row : report.per_replicate) {
        if (row.degenerate) {
            ++report.degenerate_count;
            continue;
        }
        if (!have_shift) {
            shift = row.estimate;
            have_shift = true;
        }
        ++ok;
        sum_shifted += row.estimate - shift;
        sum_variance += row.variance;
        if (row.covered) ++covered;
    }
    if (ok < 2)
        throw std::domain_error("simulation: fewer than 2 usable replicates");
    report.mean_estimate = shift + sum_shifted / ok;
    const double mean_shifted = sum_shifted / ok;
    double ss = 0.0;
    for (const ReplicateRow& row : report.per_replicate) {
        if (row.degenerate) continue;
        const double d = (row.estimate - shift) - mean_shifted;
        ss += d * d;
    }
    report.empirical_variance = ss / (ok - 1);
    report.mean_linearized_variance = sum_variance / ok;
    report.variance_ratio = report.empirical_variance / report.mean_linearized_variance;
    report.coverage = static_cast<double>(covered) / ok;
    report.timing_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

struct SummaryRow {
    std::string fingerprint;
    double true_value = 0.0;
    double mean_estimate = 0.0;
    double variance_ratio = 0.0;
    double coverage = 0.0;
    int replicates = 0;
    int degenerate_count = 0;
};

/// One row per report, sorted by config fingerprint.
inline std::vector<SummaryRow> summarize(std::span<const SimulationReport> reports) {
    if (reports.empty()) throw std::invalid_argument("summarize: no reports");
    std::vector<SummaryRow> rows;
    rows.reserve(reports.size());
    for (const SimulationReport& r : reports)
        rows.push_back({r.fingerprint, r.true_value, r.mean_estimate, r.variance_ratio,
                        r.coverage, r.replicates, r.degenerate_count});
    std::sort(rows.begin(), rows.end(),
              [](const SummaryRow& a, const SummaryRow& b) {
                  return a.fingerprint < b.fingerprint;
              });
    return rows;
}

}  // namespace ineq

#endif  // INEQ_MONTECARLO_HPP
