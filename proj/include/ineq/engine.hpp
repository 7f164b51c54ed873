#ifndef INEQ_ENGINE_HPP
#define INEQ_ENGINE_HPP

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ineq/measure.hpp"

// Machinery for statistical functionals of the form
//
//     F(M) = outer( integral of psi_y(L_y(M)) dM(y) )
//
// where L_y is a vector of component functionals, psi_y a differentiable
// integrand family and outer a smooth scalar map.  The influence function
// of such a composition assembles from the component influence functions by
// the chain rule:
//
//     IF(u) = outer'(F) * [ psi_u(L_u(M))
//                           + integral of grad psi_y(L_y(M))^T IF_{L_y}(u) dM(y) ]
//
// with every integral an exact finite sum over the atoms of M.  A central
// finite-difference quotient of F(M + t*delta_u) serves as an independent
// numerical check on the assembled influence function.

namespace ineq {

/// One coordinate of the inner functional vector, together with its
/// influence function.  `influence` must equal the directional derivative
/// lim (eval(M + t*delta_u, y) - eval(M, y)) / t; finite differences are
/// the practical test for registered components.
struct ComponentFunctional {
    std::function<double(const DiscreteMeasure&, double /*y*/)> eval;
    std::function<double(double /*u*/, const DiscreteMeasure&, double /*y*/)> influence;
    std::string label;
};

/// Scalar integrand psi_y(l) indexed by the integration variable, with its
/// gradient in l.
struct IntegrandFamily {
    std::function<double(double /*y*/, std::span<const double> /*l*/)> eval;
    std::function<std::vector<double>(double /*y*/, std::span<const double> /*l*/)> gradient;
};

/// Smooth outer transform applied to the integral value.
struct OuterMap {
    std::function<double(double)> eval;
    std::function<double(double)> derivative;

    static OuterMap identity() {
        return {[](double f) { return f; }, [](double) { return 1.0; }};
    }
};

struct ComposedFunctional {
    std::vector<ComponentFunctional> components;
    IntegrandFamily psi;
    OuterMap outer;
    /// Declared degree of homogeneity of the full (outer-composed) map,
    /// checked by euler_residual rather than inferred.
    double homogeneity_degree = 0.0;
};

namespace detail {

inline void eval_components(const ComposedFunctional& c, const DiscreteMeasure& m,
                            double y, std::vector<double>& l) {
    l.resize(c.components.size());
    for (std::size_t j = 0; j < c.components.size(); ++j)
        l[j] = c.components[j].eval(m, y);
}

inline double evaluate_inner(const ComposedFunctional& c, const DiscreteMeasure& m) {
    double acc = 0.0;
    std::vector<double> l;
    for (const Atom& a : m.atoms()) {
        eval_components(c, m, a.value, l);
        acc += a.weight * c.psi.eval(a.value, l);
    }
    return acc;
}

}  // namespace detail

/// F(M): the outer map applied to the atom sum of psi_y(L_y(M)).
inline double evaluate(const ComposedFunctional& c, const DiscreteMeasure& m) {
    return c.outer.eval(detail::evaluate_inner(c, m));
}

/// Influence function of the composition at u, assembled from the component
/// influences and the integrand gradient, including the outer chain-rule
/// factor.
inline double influence(const ComposedFunctional& c, double u, const DiscreteMeasure& m) {
    if (!std::isfinite(u))
        throw std::invalid_argument("influence: u must be finite");
    std::vector<double> l;
    double inner = 0.0;
    double integral_term = 0.0;
    for (const Atom& a : m.atoms()) {
        detail::eval_components(c, m, a.value, l);
        inner += a.weight * c.psi.eval(a.value, l);
        const std::vector<double> grad = c.psi.gradient(a.value, l);
        double dot = 0.0;
        for (std::size_t j = 0; j < c.components.size(); ++j)
            dot += grad[j] * c.components[j].influence(u, m, a.value);
        integral_term += a.weight * dot;
    }
    detail::eval_components(c, m, u, l);
    const double new_point_term = c.psi.eval(u, l);
    return c.outer.derivative(inner) * (new_point_term + integral_term);
}

struct GateauxOptions {
    /// Mass perturbation step; 0 selects 1e-5 * mass(M).
    double step = 0.0;
    /// One Richardson extrapolation combining the t and t/2 quotients.
    bool richardson = true;
};

/// Central difference quotient (F(M + t*delta_u) - F(M - t*delta_u)) / 2t,
/// the numerical stand-in for the influence function at u.
inline double gateaux_numeric(const ComposedFunctional& c, double u,
                              const DiscreteMeasure& m, GateauxOptions opt = {}) {
    const double t = opt.step > 0.0 ? opt.step : 1e-5 * m.mass();
    const auto quotient = [&](double h) {
        return (evaluate(c, m.add_mass(u, h)) - evaluate(c, m.add_mass(u, -h))) / (2.0 * h);
    };
    const double d = quotient(t);
    if (!opt.richardson) return d;
    const double d_half = quotient(t / 2.0);
    return (4.0 * d_half - d) / 3.0;
}

/// Integral of the influence function against M, minus alpha * F(M).  Zero
/// (up to roundoff) whenever the declared homogeneity degree is correct.
inline double euler_residual(const ComposedFunctional& c, const DiscreteMeasure& m) {
    double acc = 0.0;
    for (const Atom& a : m.atoms()) acc += a.weight * influence(c, a.value, m);
    return acc - c.homogeneity_degree * evaluate(c, m);
}

// The four primitive components.  Influence functions are exact indicator
// expressions: adding mass t at u shifts head counts below-or-at u and
// upper totals at-or-above u.

inline ComponentFunctional mass_component() {
    return {[](const DiscreteMeasure& m, double) { return m.mass(); },
            [](double, const DiscreteMeasure&, double) { return 1.0; },
            "N"};
}

inline ComponentFunctional total_component() {
    return {[](const DiscreteMeasure& m, double) { return m.total(); },
            [](double u, const DiscreteMeasure&, double) { return u; },
            "T"};
}

inline ComponentFunctional head_count_component() {
    return {[](const DiscreteMeasure& m, double y) { return m.head_count(y); },
            [](double u, const DiscreteMeasure&, double y) { return u <= y ? 1.0 : 0.0; },
            "H"};
}

inline ComponentFunctional upper_total_component() {
    return {[](const DiscreteMeasure& m, double y) { return m.upper_total(y); },
            [](double u, const DiscreteMeasure&, double y) { return u >= y ? u : 0.0; },
            "K"};
}

}  // namespace ineq

#endif  // INEQ_ENGINE_HPP
