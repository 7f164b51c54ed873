#ifndef INEQ_SURVEY_HPP
#define INEQ_SURVEY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ineq/indexes.hpp"
#include "ineq/measure.hpp"
#include "ineq/random.hpp"

// Classical without-replacement designs, the inverse-probability-weighted
// empirical measure, plug-in index estimation and linearized variance
// estimation.  The estimator of the variance of a plug-in index is the
// Horvitz-Thompson (or, for fixed-size designs, Sen-Yates-Grundy) variance
// estimator applied to the linearized variable z_i = IF(y_i) evaluated on
// the empirical measure.

namespace ineq {

/// First- and second-order inclusion probabilities of one of the supported
/// designs, indexed by population unit.
class SamplingDesign {
public:
    enum class Kind { srswor, bernoulli, poisson, stratified_srswor };

    static SamplingDesign srswor(int population_size, int sample_size) {
        if (population_size <= 0 || sample_size <= 0 || sample_size > population_size)
            throw std::invalid_argument("srswor: need 0 < n <= N");
        SamplingDesign d(Kind::srswor, population_size);
        d.n_ = sample_size;
        return d;
    }

    static SamplingDesign bernoulli(int population_size, double p) {
        if (population_size <= 0)
            throw std::invalid_argument("bernoulli: need N > 0");
        if (!(p > 0.0 && p <= 1.0))
            throw std::invalid_argument("bernoulli: need p in (0,1]");
        SamplingDesign d(Kind::bernoulli, population_size);
        d.p_ = p;
        return d;
    }

    static SamplingDesign poisson(std::vector<double> first_order) {
        if (first_order.empty())
            throw std::invalid_argument("poisson: need at least one unit");
        for (double pi : first_order)
            if (!(pi > 0.0 && pi <= 1.0))
                throw std::invalid_argument("poisson: each pi must lie in (0,1]");
        SamplingDesign d(Kind::poisson, static_cast<int>(first_order.size()));
        d.pi_ = std::move(first_order);
        return d;
    }

    /// Stratified SRSWOR; `stratum_of_unit[i]` is the 0-based stratum of
    /// unit i, `sample_size_per_stratum[h]` the within-stratum sample size.
    static SamplingDesign stratified_srswor(std::vector<int> stratum_of_unit,
                                            std::vector<int> sample_size_per_stratum) {
        if (stratum_of_unit.empty())
            throw std::invalid_argument("stratified: empty population");
        const int strata = static_cast<int>(sample_size_per_stratum.size());
        std::vector<int> counts(strata, 0);
        for (int h : stratum_of_unit) {
            if (h < 0 || h >= strata)
                throw std::invalid_argument("stratified: stratum id out of range");
            ++counts[h];
        }
        for (int h = 0; h < strata; ++h) {
            if (counts[h] == 0)
                throw std::invalid_argument("stratified: empty stratum");
            if (sample_size_per_stratum[h] <= 0 ||
                sample_size_per_stratum[h] > counts[h])
                throw std::invalid_argument("stratified: need 0 < n_h <= N_h");
        }
        SamplingDesign d(Kind::stratified_srswor,
                         static_cast<int>(stratum_of_unit.size()));
        d.stratum_of_unit_ = std::move(stratum_of_unit);
        d.stratum_n_ = std::move(sample_size_per_stratum);
        d.stratum_size_ = std::move(counts);
        return d;
    }

    Kind kind() const { return kind_; }
    int population_size() const { return population_size_; }

    bool fixed_size() const {
        return kind_ == Kind::srswor || kind_ == Kind::stratified_srswor;
    }

    /// Total sample size of a fixed-size design.
    int sample_size() const {
        switch (kind_) {
            case Kind::srswor:
                return n_;
            case Kind::stratified_srswor:
                return std::accumulate(stratum_n_.begin(), stratum_n_.end(), 0);
            default:
                throw std::logic_error("sample_size: design is not fixed-size");
        }
    }

    /// Stratum partition (stratified designs only).
    const std::vector<int>& stratum_of_unit() const { return stratum_of_unit_; }
    const std::vector<int>& stratum_sample_sizes() const { return stratum_n_; }

    double first_order(int unit) const {
        check_unit(unit);
        switch (kind_) {
            case Kind::srswor:
                return static_cast<double>(n_) / population_size_;
            case Kind::bernoulli:
                return p_;
            case Kind::poisson:
                return pi_[static_cast<std::size_t>(unit)];
            case Kind::stratified_srswor: {
                const int h = stratum_of_unit_[static_cast<std::size_t>(unit)];
                return static_cast<double>(stratum_n_[h]) / stratum_size_[h];
            }
        }
        throw std::logic_error("first_order: unreachable");
    }

    double second_order(int a, int b) const {
        check_unit(a);
        check_unit(b);
        if (a == b) return first_order(a);
        switch (kind_) {
            case Kind::srswor: {
                const double n = n_, big_n = population_size_;
                return n * (n - 1.0) / (big_n * (big_n - 1.0));
            }
            case Kind::bernoulli:
                return p_ * p_;
            case Kind::poisson:
                return pi_[static_cast<std::size_t>(a)] * pi_[static_cast<std::size_t>(b)];
            case Kind::stratified_srswor: {
                const int ha = stratum_of_unit_[static_cast<std::size_t>(a)];
                const int hb = stratum_of_unit_[static_cast<std::size_t>(b)];
                if (ha != hb) return first_order(a) * first_order(b);
                const double n = stratum_n_[ha], big_n = stratum_size_[ha];
                return n * (n - 1.0) / (big_n * (big_n - 1.0));
            }
        }
        throw std::logic_error("second_order: unreachable");
    }

private:
    SamplingDesign(Kind k, int population_size)
        : kind_(k), population_size_(population_size) {}

    void check_unit(int unit) const {
        if (unit < 0 || unit >= population_size_)
            throw std::invalid_argument("SamplingDesign: unit label out of range");
    }

    Kind kind_;
    int population_size_;
    int n_ = 0;
    double p_ = 0.0;
    std::vector<double> pi_;
    std::vector<int> stratum_of_unit_;
    std::vector<int> stratum_n_;
    std::vector<int> stratum_size_;
};

struct SampleUnit {
    int label = 0;
    double y = 0.0;
    double pi = 1.0;
};

struct SampleData {
    std::vector<SampleUnit> units;
    std::optional<SamplingDesign> design;
};

/// Draw a sample from the design over `population` (unit i carries value
/// population[i]).  Deterministic given the seed; labels come out sorted.
inline SampleData draw_sample(const SamplingDesign& design,
                              std::span<const double> population,
                              std::uint64_t seed) {
    if (static_cast<int>(population.size()) != design.population_size())
        throw std::invalid_argument("draw_sample: population size does not match design");
    std::mt19937_64 gen(seed);
    std::vector<int> chosen;

    switch (design.kind()) {
        case SamplingDesign::Kind::srswor: {
            const int big_n = design.population_size();
            const int n = design.sample_size();
            std::vector<int> idx(static_cast<std::size_t>(big_n));
            std::iota(idx.begin(), idx.end(), 0);
            // partial Fisher-Yates: the first n slots end up a uniform
            // without-replacement draw
            for (int k = 0; k < n; ++k) {
                const int j = k + static_cast<int>(rng::uniform_below(
                                      gen, static_cast<std::uint64_t>(big_n - k)));
                std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(j)]);
            }
            chosen.assign(idx.begin(), idx.begin() + n);
            std::sort(chosen.begin(), chosen.end());
            break;
        }
        case SamplingDesign::Kind::bernoulli:
        case SamplingDesign::Kind::poisson: {
            for (int i = 0; i < design.population_size(); ++i)
                if (rng::uniform01(gen) < design.first_order(i)) chosen.push_back(i);
            break;
        }
        case SamplingDesign::Kind::stratified_srswor: {
            // one shared stream, strata processed in id order
            const auto& stratum_of_unit = design.stratum_of_unit();
            const auto& stratum_n = design.stratum_sample_sizes();
            std::vector<std::vector<int>> members(stratum_n.size());
            for (int i = 0; i < design.population_size(); ++i)
                members[static_cast<std::size_t>(stratum_of_unit[static_cast<std::size_t>(i)])]
                    .push_back(i);
            for (std::size_t h = 0; h < members.size(); ++h) {
                auto& pool = members[h];
                const int n_h = stratum_n[h];
                for (int k = 0; k < n_h; ++k) {
                    const int j =
                        k + static_cast<int>(rng::uniform_below(
                                gen, static_cast<std::uint64_t>(
                                         static_cast<int>(pool.size()) - k)));
                    std::swap(pool[static_cast<std::size_t>(k)],
                              pool[static_cast<std::size_t>(j)]);
                }
                chosen.insert(chosen.end(), pool.begin(), pool.begin() + n_h);
            }
            std::sort(chosen.begin(), chosen.end());
            break;
        }
    }

    SampleData s;
    s.design = design;
    s.units.reserve(chosen.size());
    for (int label : chosen)
        s.units.push_back({label, population[static_cast<std::size_t>(label)],
                           design.first_order(label)});
    return s;
}

/// Empirical measure of a sample: a point mass of 1/pi_i at each observed
/// value.
inline DiscreteMeasure empirical_measure(const SampleData& s) {
    if (s.units.empty())
        throw std::domain_error("empirical_measure: empty sample");
    std::vector<Atom> atoms;
    atoms.reserve(s.units.size());
    for (const SampleUnit& u : s.units) {
        if (!(u.pi > 0.0 && u.pi <= 1.0))
            throw std::domain_error("empirical_measure: pi must lie in (0,1]");
        atoms.push_back({u.y, 1.0 / u.pi});
    }
    return DiscreteMeasure(std::move(atoms));
}

/// Plug-in estimator: the index evaluated on the empirical measure.
inline double plug_in(IndexKind kind, const SampleData& s) {
    return index_value(kind, empirical_measure(s));
}

/// Linearized variable z_i = IF(y_i) with the influence function evaluated
/// on the empirical measure (the population measure being unknown at
/// estimation time).  Order matches s.units.
inline std::vector<double> linearized_values(IndexKind kind, const SampleData& s) {
    const DiscreteMeasure m = empirical_measure(s);
    const IndexResult r = index_result(kind, m);
    std::vector<double> z;
    z.reserve(s.units.size());
    for (const SampleUnit& u : s.units) z.push_back(r.influence_at(u.y));
    return z;
}

/// Horvitz-Thompson variance estimator of the total of z:
/// sum over sampled pairs of (pi_ij - pi_i pi_j)/pi_ij * (z_i/pi_i)(z_j/pi_j).
/// May come out negative for some designs.
inline double variance_ht(std::span<const double> z, const SampleData& s) {
    if (!s.design)
        throw std::domain_error("variance_ht: joint inclusion probabilities unavailable");
    if (z.size() != s.units.size())
        throw std::invalid_argument("variance_ht: z size mismatch");
    const auto& units = s.units;
    double acc = 0.0;
    for (std::size_t i = 0; i < units.size(); ++i) {
        const double ei = z[i] / units[i].pi;
        for (std::size_t j = 0; j < units.size(); ++j) {
            if (i == j) {
                // pi_ii = pi_i, so the coefficient is exactly 1 - pi_i
                acc += (1.0 - units[i].pi) * ei * ei;
                continue;
            }
            const double pij = s.design->second_order(units[i].label, units[j].label);
            const double ej = z[j] / units[j].pi;
            acc += (pij - units[i].pi * units[j].pi) / pij * ei * ej;
        }
    }
    return acc;
}

/// Sen-Yates-Grundy variance estimator, valid for fixed-size designs:
/// (1/2) sum over i != j of (pi_i pi_j - pi_ij)/pi_ij * (z_i/pi_i - z_j/pi_j)^2.
inline double variance_syg(std::span<const double> z, const SampleData& s) {
    if (!s.design)
        throw std::domain_error("variance_syg: joint inclusion probabilities unavailable");
    if (!s.design->fixed_size())
        throw std::domain_error("variance_syg: requires a fixed-size design");
    if (z.size() != s.units.size())
        throw std::invalid_argument("variance_syg: z size mismatch");
    const auto& units = s.units;
    double acc = 0.0;
    for (std::size_t i = 0; i < units.size(); ++i) {
        const double ei = z[i] / units[i].pi;
        for (std::size_t j = i + 1; j < units.size(); ++j) {
            const double pij = s.design->second_order(units[i].label, units[j].label);
            const double d = ei - z[j] / units[j].pi;
            acc += (units[i].pi * units[j].pi - pij) / pij * d * d;
        }
    }
    return acc;
}

enum class VarianceMethod { horvitz_thompson, sen_yates_grundy };

inline const char* to_string(VarianceMethod m) {
    return m == VarianceMethod::sen_yates_grundy ? "SYG" : "HT";
}

/// Point estimate with linearized variance and a normal-approximation
/// confidence interval.  `variance` is clamped at zero for the interval;
/// the unclamped estimate stays in `raw_variance`.
struct VarianceReport {
    double estimate = 0.0;
    double variance = 0.0;
    double raw_variance = 0.0;
    double std_error = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    double level = 0.0;
    VarianceMethod method = VarianceMethod::horvitz_thompson;
    int n_effective = 0;
};

/// Variant hook: estimate with the linearized variable supplied externally
/// (used for diagnostics that linearize at the true population measure).
inline VarianceReport estimate_with_variance_given(
    IndexKind kind, const SampleData& s, double level, std::span<const double> z) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("estimate_with_variance: level must lie in (0,1)");
    if (!s.design)
        throw std::domain_error("estimate_with_variance: design required");
    VarianceReport r;
    r.estimate = plug_in(kind, s);
    const bool fixed = s.design->fixed_size();
    r.method = fixed ? VarianceMethod::sen_yates_grundy : VarianceMethod::horvitz_thompson;
    r.raw_variance = fixed ? variance_syg(z, s) : variance_ht(z, s);
    r.variance = r.raw_variance > 0.0 ? r.raw_variance : 0.0;
    r.std_error = std::sqrt(r.variance);
    const double q = rng::normal_quantile(0.5 * (1.0 + level));
    r.ci_lower = r.estimate - q * r.std_error;
    r.ci_upper = r.estimate + q * r.std_error;
    r.level = level;
    r.n_effective = static_cast<int>(s.units.size());
    return r;
}

inline VarianceReport estimate_with_variance(IndexKind kind, const SampleData& s,
                                             double level) {
    const std::vector<double> z = linearized_values(kind, s);
    return estimate_with_variance_given(kind, s, level, z);
}

}  // namespace ineq

#endif  // INEQ_SURVEY_HPP
