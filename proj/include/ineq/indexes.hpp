#ifndef INEQ_INDEXES_HPP
#define INEQ_INDEXES_HPP

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ineq/engine.hpp"
#include "ineq/measure.hpp"

// The four supported inequality indexes as functionals of a discrete
// measure, each with a closed-form value, a closed-form influence function,
// and an equivalent ComposedFunctional so the generic engine can cross-check
// both.  Writing N = mass, T = total, mu = T/N, H_y = head_count(y),
// K_y = upper_total(y):
//
//   Gini      G  = (2/NT) sum w*y*H_y  -  1
//   Amato     A  = sum w * sqrt(1/N^2 + y^2/T^2)
//   Zenga     Z  = 1 - sum w * (N-H_y)(T-K_y) / (N H_y K_y)
//   Atkinson  A_eps = 1 - ( sum w * y^(1-eps) / (N^eps T^(1-eps)) )^(1/(1-eps))
//
// All four are invariant under rescaling of the weights (degree-0
// homogeneous) and under rescaling of the values.  Ties enter through the
// inclusive conventions of head_count / upper_total; in particular a
// perfectly equal population has G = 1 and tiny populations push Z to 1,
// both direct consequences of evaluating the functionals as written.

namespace ineq {

enum class IndexFamily { gini, amato, zenga, atkinson };

/// Identifies one of the four indexes; Atkinson carries its inequality
/// aversion parameter epsilon in [0, 1).
class IndexKind {
public:
    static IndexKind gini() { return IndexKind(IndexFamily::gini, 0.0); }
    static IndexKind amato() { return IndexKind(IndexFamily::amato, 0.0); }
    static IndexKind zenga() { return IndexKind(IndexFamily::zenga, 0.0); }
    static IndexKind atkinson(double epsilon) {
        if (!(epsilon >= 0.0 && epsilon < 1.0))
            throw std::invalid_argument("atkinson: epsilon must lie in [0,1)");
        return IndexKind(IndexFamily::atkinson, epsilon);
    }

    IndexFamily family() const { return family_; }
    double epsilon() const { return epsilon_; }

    std::string name() const {
        switch (family_) {
            case IndexFamily::gini: return "gini";
            case IndexFamily::amato: return "amato";
            case IndexFamily::zenga: return "zenga";
            case IndexFamily::atkinson: {
                char buf[48];
                std::snprintf(buf, sizeof buf, "atkinson(eps=%.17g)", epsilon_);
                return buf;
            }
        }
        return "?";
    }

private:
    IndexKind(IndexFamily f, double e) : family_(f), epsilon_(e) {}
    IndexFamily family_;
    double epsilon_;
};

namespace detail {

inline void require_positive_total(const DiscreteMeasure& m, const char* index) {
    if (!(m.total() > 0.0))
        throw std::domain_error(std::string(index) + ": population total must be positive");
}

inline void require_nonnegative_values(const DiscreteMeasure& m, const char* index) {
    if (m.min_value() < 0.0)
        throw std::domain_error(std::string(index) + ": values must be nonnegative");
}

inline void require_positive_values(const DiscreteMeasure& m, const char* index) {
    if (!(m.min_value() > 0.0))
        throw std::domain_error(std::string(index) + ": values must be positive");
}

// (N-H)(T-K) / (N*H*K) with the convention that a vanishing numerator
// factor wins: below the support K = T, above it H = N, and in both cases
// the term is exactly zero without touching the denominator.
inline double zenga_term(double n, double t, double h, double k) {
    const double a = n - h;
    const double b = t - k;
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b / (n * h * k);
}

struct GiniCache {
    DiscreteMeasure measure;
    double n, t, value;

    explicit GiniCache(DiscreteMeasure m) : measure(std::move(m)), n(0), t(0), value(0) {
        require_positive_total(measure, "gini");
        require_nonnegative_values(measure, "gini");
        n = measure.mass();
        t = measure.total();
        double acc = 0.0;
        for (const Atom& a : measure.atoms())
            acc += a.weight * a.value * measure.head_count(a.value);
        value = 2.0 * acc / (n * t) - 1.0;
    }

    double influence(double u) const {
        return 2.0 * (u * measure.head_count(u) + measure.upper_total(u)) / (n * t) -
               (value + 1.0) * (1.0 / n + u / t);
    }
};

struct AmatoCache {
    double n, t, mu, value, sum_inv, sum_sq;

    explicit AmatoCache(const DiscreteMeasure& m) {
        require_positive_total(m, "amato");
        n = m.mass();
        t = m.total();
        mu = t / n;
        value = sum_inv = sum_sq = 0.0;
        for (const Atom& a : m.atoms()) {
            const double root = std::sqrt(mu * mu + a.value * a.value);
            value += a.weight * std::sqrt(1.0 / (n * n) + a.value * a.value / (t * t));
            sum_inv += a.weight / root;
            sum_sq += a.weight * a.value * a.value / root;
        }
    }

    double influence(double u) const {
        return std::sqrt(mu * mu + u * u) / t - mu / (n * n) * sum_inv -
               u / (t * t) * sum_sq;
    }
};

struct ZengaCache {
    DiscreteMeasure measure;
    double n, t, mu, value;
    std::vector<double> atom_values;
    std::vector<double> suffix_head;   // sum over y_i >= u of w (T-K)/(H^2 K)
    std::vector<double> prefix_upper;  // sum over y_i <= u of w (N-H)/(H K^2)
    double whole_upper_ratio;          // sum of w (T-K)/K
    double whole_head_ratio;           // sum of w (N-H)/(H K)

    explicit ZengaCache(DiscreteMeasure m) : measure(std::move(m)) {
        require_positive_values(measure, "zenga");
        n = measure.mass();
        t = measure.total();
        mu = t / n;
        const auto atoms = measure.atoms();
        const std::size_t count = atoms.size();
        atom_values.resize(count);
        suffix_head.assign(count + 1, 0.0);
        prefix_upper.assign(count + 1, 0.0);
        whole_upper_ratio = whole_head_ratio = 0.0;
        std::vector<double> head_term(count), upper_term(count);
        double acc = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double y = atoms[i].value, w = atoms[i].weight;
            const double h = measure.head_count(y);
            const double k = measure.upper_total(y);
            atom_values[i] = y;
            acc += w * zenga_term(n, t, h, k);
            head_term[i] = w * (t - k) / (h * h * k);
            upper_term[i] = w * (n - h) / (h * k * k);
            whole_upper_ratio += w * (t - k) / k;
            whole_head_ratio += w * (n - h) / (h * k);
        }
        value = 1.0 - acc;
        for (std::size_t i = count; i-- > 0;)
            suffix_head[i] = suffix_head[i + 1] + head_term[i];
        for (std::size_t i = 0; i < count; ++i)
            prefix_upper[i + 1] = prefix_upper[i] + upper_term[i];
    }

    double influence(double u) const {
        if (!(u > 0.0))
            throw std::domain_error("zenga: influence requires u > 0");
        // first index with value >= u, and first with value > u
        const auto lo = std::lower_bound(atom_values.begin(), atom_values.end(), u);
        const auto hi = std::upper_bound(atom_values.begin(), atom_values.end(), u);
        const double head_sum = suffix_head[static_cast<std::size_t>(lo - atom_values.begin())];
        const double upper_sum = prefix_upper[static_cast<std::size_t>(hi - atom_values.begin())];
        const double hu = measure.head_count(u);
        const double ku = measure.upper_total(u);
        return -zenga_term(n, t, hu, ku) + head_sum + mu * u * upper_sum -
               whole_upper_ratio / (n * n) - u * whole_head_ratio / n;
    }
};

struct AtkinsonCache {
    double eps, n, t, mu, moment_r, value;

    AtkinsonCache(const DiscreteMeasure& m, double epsilon) : eps(epsilon) {
        require_positive_values(m, "atkinson");
        n = m.mass();
        t = m.total();
        mu = t / n;
        moment_r = m.moment(1.0 - eps);
        const double inner = n * moment_r / (std::pow(n, eps) * std::pow(t, 1.0 - eps));
        value = 1.0 - std::pow(inner, 1.0 / (1.0 - eps));
    }

    double influence(double u) const {
        if (!(u > 0.0))
            throw std::domain_error("atkinson: influence requires u > 0");
        return (1.0 - value) / n *
               (-std::pow(u, 1.0 - eps) / ((1.0 - eps) * moment_r) + u / mu +
                eps / (1.0 - eps));
    }
};

}  // namespace detail

inline double gini_value(const DiscreteMeasure& m) { return detail::GiniCache(m).value; }
inline double gini_influence(const DiscreteMeasure& m, double u) {
    return detail::GiniCache(m).influence(u);
}

inline double amato_value(const DiscreteMeasure& m) { return detail::AmatoCache(m).value; }
inline double amato_influence(const DiscreteMeasure& m, double u) {
    return detail::AmatoCache(m).influence(u);
}

inline double zenga_value(const DiscreteMeasure& m) { return detail::ZengaCache(m).value; }
inline double zenga_influence(const DiscreteMeasure& m, double u) {
    return detail::ZengaCache(m).influence(u);
}

inline double atkinson_value(const DiscreteMeasure& m, double epsilon) {
    IndexKind::atkinson(epsilon);  // range check
    return detail::AtkinsonCache(m, epsilon).value;
}
inline double atkinson_influence(const DiscreteMeasure& m, double u, double epsilon) {
    IndexKind::atkinson(epsilon);
    return detail::AtkinsonCache(m, epsilon).influence(u);
}

/// Engine representation of an index: components drawn from {H, K, N, T},
/// the integrand family with its gradient, and the outer map.  All four
/// compositions are degree-0 homogeneous.
inline ComposedFunctional as_composition(IndexKind kind) {
    ComposedFunctional c;
    c.homogeneity_degree = 0.0;
    switch (kind.family()) {
        case IndexFamily::gini: {
            c.components = {head_count_component(), mass_component(), total_component()};
            c.psi.eval = [](double y, std::span<const double> l) {
                return 2.0 * y * l[0] / (l[1] * l[2]);
            };
            c.psi.gradient = [](double y, std::span<const double> l) {
                const double s = 2.0 * y / (l[1] * l[2]);
                return std::vector<double>{s, -s * l[0] / l[1], -s * l[0] / l[2]};
            };
            c.outer = {[](double f) { return f - 1.0; }, [](double) { return 1.0; }};
            break;
        }
        case IndexFamily::amato: {
            c.components = {mass_component(), total_component()};
            c.psi.eval = [](double y, std::span<const double> l) {
                return std::sqrt(1.0 / (l[0] * l[0]) + y * y / (l[1] * l[1]));
            };
            c.psi.gradient = [](double y, std::span<const double> l) {
                const double psi =
                    std::sqrt(1.0 / (l[0] * l[0]) + y * y / (l[1] * l[1]));
                return std::vector<double>{-1.0 / (l[0] * l[0] * l[0] * psi),
                                           -y * y / (l[1] * l[1] * l[1] * psi)};
            };
            c.outer = OuterMap::identity();
            break;
        }
        case IndexFamily::zenga: {
            c.components = {head_count_component(), upper_total_component(),
                            mass_component(), total_component()};
            c.psi.eval = [](double, std::span<const double> l) {
                return detail::zenga_term(l[2], l[3], l[0], l[1]);
            };
            c.psi.gradient = [](double, std::span<const double> l) {
                const double h = l[0], k = l[1], n = l[2], t = l[3];
                return std::vector<double>{
                    -(t - k) / (h * h * k), -t * (n - h) / (n * h * k * k),
                    (t - k) / (n * n * k), (n - h) / (n * h * k)};
            };
            c.outer = {[](double f) { return 1.0 - f; }, [](double) { return -1.0; }};
            break;
        }
        case IndexFamily::atkinson: {
            const double eps = kind.epsilon();
            c.components = {mass_component(), total_component()};
            c.psi.eval = [eps](double y, std::span<const double> l) {
                if (!(y > 0.0))
                    throw std::domain_error("atkinson: values must be positive");
                return std::pow(y, 1.0 - eps) /
                       (std::pow(l[0], eps) * std::pow(l[1], 1.0 - eps));
            };
            c.psi.gradient = [eps](double y, std::span<const double> l) {
                const double psi = std::pow(y, 1.0 - eps) /
                                   (std::pow(l[0], eps) * std::pow(l[1], 1.0 - eps));
                return std::vector<double>{-eps * psi / l[0], -(1.0 - eps) * psi / l[1]};
            };
            c.outer = {[eps](double f) { return 1.0 - std::pow(f, 1.0 / (1.0 - eps)); },
                       [eps](double f) {
                           return -std::pow(f, eps / (1.0 - eps)) / (1.0 - eps);
                       }};
            break;
        }
    }
    return c;
}

/// Value, reusable closed-form influence function, and engine form of one
/// index on one measure.  The influence closure owns its precomputations,
/// so sweeping it over many query points costs O(log m) each.
struct IndexResult {
    double value = 0.0;
    std::function<double(double)> influence_at;
    ComposedFunctional composition;
};

inline IndexResult index_result(IndexKind kind, const DiscreteMeasure& m) {
    IndexResult r;
    r.composition = as_composition(kind);
    switch (kind.family()) {
        case IndexFamily::gini: {
            auto cache = std::make_shared<detail::GiniCache>(m);
            r.value = cache->value;
            r.influence_at = [cache](double u) { return cache->influence(u); };
            break;
        }
        case IndexFamily::amato: {
            auto cache = std::make_shared<detail::AmatoCache>(m);
            r.value = cache->value;
            r.influence_at = [cache](double u) { return cache->influence(u); };
            break;
        }
        case IndexFamily::zenga: {
            auto cache = std::make_shared<detail::ZengaCache>(m);
            r.value = cache->value;
            r.influence_at = [cache](double u) { return cache->influence(u); };
            break;
        }
        case IndexFamily::atkinson: {
            auto cache = std::make_shared<detail::AtkinsonCache>(m, kind.epsilon());
            r.value = cache->value;
            r.influence_at = [cache](double u) { return cache->influence(u); };
            break;
        }
    }
    return r;
}

inline double index_value(IndexKind kind, const DiscreteMeasure& m) {
    switch (kind.family()) {
        case IndexFamily::gini: return gini_value(m);
        case IndexFamily::amato: return amato_value(m);
        case IndexFamily::zenga: return zenga_value(m);
        case IndexFamily::atkinson: return atkinson_value(m, kind.epsilon());
    }
    throw std::logic_error("index_value: unreachable");
}

inline double index_influence(IndexKind kind, const DiscreteMeasure& m, double u) {
    switch (kind.family()) {
        case IndexFamily::gini: return gini_influence(m, u);
        case IndexFamily::amato: return amato_influence(m, u);
        case IndexFamily::zenga: return zenga_influence(m, u);
        case IndexFamily::atkinson: return atkinson_influence(m, u, kind.epsilon());
    }
    throw std::logic_error("index_influence: unreachable");
}

/// Engine form validated against a concrete measure: throws exactly when
/// the corresponding value operation would.
inline ComposedFunctional as_composition(IndexKind kind, const DiscreteMeasure& m) {
    index_value(kind, m);
    return as_composition(kind);
}

}  // namespace ineq

#endif  // INEQ_INDEXES_HPP
