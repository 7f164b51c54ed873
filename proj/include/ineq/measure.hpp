#ifndef INEQ_MEASURE_HPP
#define INEQ_MEASURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ineq {

/// One point mass: a location on the real line and the mass sitting there.
struct Atom {
    double value = 0.0;
    double weight = 0.0;
};

/// A finite discrete measure on the real line.
///
/// Atoms are stored sorted by value, with equal values merged, together with
/// prefix sums of weight and of weight*value, so the primitive functionals
/// (mass, total, head_count, upper_total) cost O(log m) per query.  Query
/// results do not depend on the order atoms were supplied in.
///
/// A unit-weight measure represents a plain population; general positive
/// weights cover inverse-probability-weighted samples.  Instances are
/// immutable after construction; perturbation (`add_mass`) returns a new
/// measure and may carry a signed atom, which the queries handle as ordinary
/// signed sums.
class DiscreteMeasure {
public:
    explicit DiscreteMeasure(std::vector<Atom> atoms)
        : atoms_(std::move(atoms)) {
        if (atoms_.empty())
            throw std::invalid_argument("DiscreteMeasure: no atoms");
        for (const Atom& a : atoms_) {
            if (!std::isfinite(a.value))
                throw std::invalid_argument("DiscreteMeasure: value must be finite");
            if (!std::isfinite(a.weight) || !(a.weight > 0.0))
                throw std::invalid_argument("DiscreteMeasure: weight must be positive and finite");
        }
        canonicalize();
    }

    /// Unit-weight measure: one unit of mass per entry.
    static DiscreteMeasure from_values(std::span<const double> values) {
        std::vector<Atom> atoms;
        atoms.reserve(values.size());
        for (double v : values) atoms.push_back({v, 1.0});
        return DiscreteMeasure(std::move(atoms));
    }

    static DiscreteMeasure from_values(std::initializer_list<double> values) {
        return from_values(std::span<const double>(values.begin(), values.size()));
    }

    static DiscreteMeasure from_values_weights(std::span<const double> values,
                                               std::span<const double> weights) {
        if (values.size() != weights.size())
            throw std::invalid_argument("DiscreteMeasure: values/weights size mismatch");
        std::vector<Atom> atoms;
        atoms.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            atoms.push_back({values[i], weights[i]});
        return DiscreteMeasure(std::move(atoms));
    }

    /// Total mass: sum of all weights.
    double mass() const { return cum_weight_.back(); }

    /// Weighted total: sum of weight * value.
    double total() const { return cum_weight_value_.back(); }

    /// Mass carried by atoms with value <= y (ties included).
    double head_count(double y) const {
        const std::size_t idx = upper_index(y);
        return idx == 0 ? 0.0 : cum_weight_[idx - 1];
    }

    /// Weighted value total over atoms with value >= y (ties included).
    double upper_total(double y) const {
        const std::size_t idx = lower_index(y);
        return total() - (idx == 0 ? 0.0 : cum_weight_value_[idx - 1]);
    }

    /// r-th mass-weighted moment of the values.  Non-integer r requires all
    /// values positive.
    double moment(double r) const {
        if (r == 0.0) return 1.0;
        if (r == 1.0) return total() / mass();
        const bool integer_order = std::floor(r) == r;
        if (!integer_order && !(min_value() > 0.0))
            throw std::domain_error("moment: non-integer order requires positive values");
        double acc = 0.0;
        for (const Atom& a : atoms_) acc += a.weight * std::pow(a.value, r);
        return acc / mass();
    }

    /// New measure with extra mass `t` placed at `u` (t may be negative, as
    /// long as the total mass stays positive).  The receiver is unchanged.
    DiscreteMeasure add_mass(double u, double t) const {
        if (!std::isfinite(u) || !std::isfinite(t))
            throw std::invalid_argument("add_mass: arguments must be finite");
        if (!(mass() + t > 0.0))
            throw std::domain_error("add_mass: total mass must stay positive");
        DiscreteMeasure out(*this, private_tag{});
        auto it = std::lower_bound(out.atoms_.begin(), out.atoms_.end(), u,
                                   [](const Atom& a, double v) { return a.value < v; });
        if (it != out.atoms_.end() && it->value == u) {
            it->weight += t;
            if (it->weight == 0.0) out.atoms_.erase(it);
        } else if (t != 0.0) {
            out.atoms_.insert(it, Atom{u, t});
        }
        out.rebuild_sums();
        return out;
    }

    std::span<const Atom> atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    double min_value() const { return atoms_.front().value; }
    double max_value() const { return atoms_.back().value; }

private:
    struct private_tag {};
    DiscreteMeasure(const DiscreteMeasure& other, private_tag)
        : atoms_(other.atoms_) {}

    void canonicalize() {
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& a, const Atom& b) { return a.value < b.value; });
        std::size_t out = 0;
        for (std::size_t i = 1; i < atoms_.size(); ++i) {
            if (atoms_[i].value == atoms_[out].value)
                atoms_[out].weight += atoms_[i].weight;
            else
                atoms_[++out] = atoms_[i];
        }
        atoms_.resize(out + 1);
        rebuild_sums();
    }

    void rebuild_sums() {
        cum_weight_.resize(atoms_.size());
        cum_weight_value_.resize(atoms_.size());
        double w = 0.0, wv = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            w += atoms_[i].weight;
            wv += atoms_[i].weight * atoms_[i].value;
            cum_weight_[i] = w;
            cum_weight_value_[i] = wv;
        }
    }

    // index of the first atom with value > y
    std::size_t upper_index(double y) const {
        return static_cast<std::size_t>(
            std::upper_bound(atoms_.begin(), atoms_.end(), y,
                             [](double v, const Atom& a) { return v < a.value; }) -
            atoms_.begin());
    }

    // index of the first atom with value >= y
    std::size_t lower_index(double y) const {
        return static_cast<std::size_t>(
            std::lower_bound(atoms_.begin(), atoms_.end(), y,
                             [](const Atom& a, double v) { return a.value < v; }) -
            atoms_.begin());
    }

    std::vector<Atom> atoms_;
    std::vector<double> cum_weight_;
    std::vector<double> cum_weight_value_;
};

}  // namespace ineq

#endif  // INEQ_MEASURE_HPP
