#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ineq/engine.hpp"
#include "ineq/indexes.hpp"
#include "ineq/measure.hpp"
#include "ineq/random.hpp"

using ineq::ComposedFunctional;
using ineq::DiscreteMeasure;
using ineq::IndexKind;

namespace {

// trivially linear functionals for exact oracle checks
ComposedFunctional total_functional() {
    ComposedFunctional c;
    c.psi.eval = [](double y, std::span<const double>) { return y; };
    c.psi.gradient = [](double, std::span<const double>) {
        return std::vector<double>{};
    };
    c.outer = ineq::OuterMap::identity();
    c.homogeneity_degree = 1.0;
    return c;
}

ComposedFunctional mass_functional() {
    ComposedFunctional c;
    c.psi.eval = [](double, std::span<const double>) { return 1.0; };
    c.psi.gradient = [](double, std::span<const double>) {
        return std::vector<double>{};
    };
    c.outer = ineq::OuterMap::identity();
    c.homogeneity_degree = 1.0;
    return c;
}

DiscreteMeasure random_positive_measure(std::mt19937_64& gen, std::size_t count) {
    std::vector<double> values(count);
    for (double& v : values) v = ineq::rng::lognormal(gen, 1.0);
    return DiscreteMeasure::from_values(values);
}

}  // namespace

TEST_CASE("linear functionals have exact influence quotients") {
    const auto m = DiscreteMeasure::from_values({1, 2, 3});
    const auto total = total_functional();
    const auto mass = mass_functional();

    CHECK(ineq::evaluate(total, m) == 6.0);
    CHECK(ineq::evaluate(mass, m) == 3.0);

    for (double u : {0.5, 2.0, 10.0}) {
        for (double t : {0.5, 0.0625, 1e-3}) {
            CHECK(ineq::gateaux_numeric(total, u, m, {t, false}) ==
                  doctest::Approx(u).epsilon(1e-12));
            CHECK(ineq::gateaux_numeric(mass, u, m, {t, false}) ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("gini composition evaluates and differentiates the hand case") {
    const auto m = DiscreteMeasure::from_values({1, 2, 3});
    const auto gini = ineq::as_composition(IndexKind::gini());

    CHECK(ineq::evaluate(gini, m) == doctest::Approx(5.0 / 9.0).epsilon(1e-15));

    CHECK(ineq::influence(gini, 1.0, m) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(ineq::influence(gini, 2.0, m) == doctest::Approx(-1.0 / 27.0).epsilon(1e-14));
    CHECK(ineq::influence(gini, 3.0, m) == doctest::Approx(1.0 / 27.0).epsilon(1e-14));

    // the quotient is smooth in t, so plain central differences at t = 1e-5
    // already land within 1e-7
    const double oracle = ineq::gateaux_numeric(gini, 2.0, m, {1e-5, false});
    CHECK(std::fabs(oracle - (-1.0 / 27.0)) < 1e-7);
    const double richardson = ineq::gateaux_numeric(gini, 2.0, m, {1e-5, true});
    CHECK(std::fabs(richardson - (-1.0 / 27.0)) < 1e-9);
}

TEST_CASE("amato composition on an equal population") {
    const auto m = DiscreteMeasure::from_values({4, 4, 4});
    const auto amato = ineq::as_composition(IndexKind::amato());
    CHECK(ineq::evaluate(amato, m) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(ineq::influence(amato, 4.0, m) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("atkinson(0) composition is identically zero") {
    std::mt19937_64 gen(3);
    const auto m = random_positive_measure(gen, 40);
    const auto atkinson0 = ineq::as_composition(IndexKind::atkinson(0.0));
    CHECK(ineq::evaluate(atkinson0, m) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("euler residual vanishes at the declared degree") {
    const auto m123 = DiscreteMeasure::from_values({1, 2, 3});

    const auto gini = ineq::as_composition(IndexKind::gini());
    CHECK(std::fabs(ineq::euler_residual(gini, m123)) < 1e-10);

    const auto m14 = DiscreteMeasure::from_values({1, 4});
    const auto atkinson = ineq::as_composition(IndexKind::atkinson(0.5));
    CHECK(std::fabs(ineq::euler_residual(atkinson, m14)) < 1e-10);

    // degree-1 total: residual is exactly zero
    CHECK(ineq::euler_residual(total_functional(), m123) == 0.0);
    CHECK(ineq::euler_residual(mass_functional(), m123) == 0.0);

    // a wrong declared degree shows up immediately
    auto mislabeled = total_functional();
    mislabeled.homogeneity_degree = 0.0;
    CHECK(std::fabs(ineq::euler_residual(mislabeled, m123)) > 1.0);
}

TEST_CASE("component influences match their finite-difference quotients") {
    std::mt19937_64 gen(17);
    const auto m = random_positive_measure(gen, 50);
    const std::vector<ineq::ComponentFunctional> components = {
        ineq::mass_component(), ineq::total_component(),
        ineq::head_count_component(), ineq::upper_total_component()};

    const double t = 1e-3;
    for (const auto& comp : components) {
        for (int i = 0; i < 20; ++i) {
            const double u = ineq::rng::lognormal(gen, 1.0);
            const double y = ineq::rng::lognormal(gen, 1.0);
            const auto perturbed = m.add_mass(u, t);
            const double quotient = (comp.eval(perturbed, y) - comp.eval(m, y)) / t;
            CHECK(comp.influence(u, m, y) == doctest::Approx(quotient).epsilon(1e-9));
        }
    }
}

TEST_CASE("integrand gradients match central finite differences") {
    std::mt19937_64 gen(29);
    const std::vector<ComposedFunctional> compositions = {
        ineq::as_composition(IndexKind::gini()),
        ineq::as_composition(IndexKind::amato()),
        ineq::as_composition(IndexKind::zenga()),
        ineq::as_composition(IndexKind::atkinson(0.3))};

    for (const auto& c : compositions) {
        const std::size_t k = c.components.size();
        for (int rep = 0; rep < 30; ++rep) {
            // component values on a realistic scale: H <= N, K <= T
            const double n = 5.0 + 50.0 * ineq::rng::uniform01(gen);
            const double t = n * (0.5 + 4.0 * ineq::rng::uniform01(gen));
            std::vector<double> l;
            if (k == 2) {
                l = {n, t};
            } else if (k == 3) {
                l = {n * (0.1 + 0.8 * ineq::rng::uniform01(gen)), n, t};
            } else {
                l = {n * (0.1 + 0.8 * ineq::rng::uniform01(gen)),
                     t * (0.1 + 0.8 * ineq::rng::uniform01(gen)), n, t};
            }
            const double y = ineq::rng::lognormal(gen, 1.0);
            const auto grad = c.psi.gradient(y, l);
            REQUIRE(grad.size() == k);
            for (std::size_t j = 0; j < k; ++j) {
                const double h = 1e-6 * (1.0 + std::fabs(l[j]));
                auto lp = l, lm = l;
                lp[j] += h;
                lm[j] -= h;
                const double numeric =
                    (c.psi.eval(y, lp) - c.psi.eval(y, lm)) / (2.0 * h);
                CHECK(grad[j] == doctest::Approx(numeric).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("outer map enters influence exactly as a chain-rule factor") {
    std::mt19937_64 gen(41);
    const auto m = random_positive_measure(gen, 30);

    auto inner = ineq::as_composition(IndexKind::gini());
    inner.outer = ineq::OuterMap::identity();
    const double f = ineq::evaluate(inner, m);

    // a genuinely nonlinear outer map
    ComposedFunctional wrapped = inner;
    wrapped.outer = {[](double x) { return std::exp(x) + x * x; },
                     [](double x) { return std::exp(x) + 2.0 * x; }};
    const double factor = std::exp(f) + 2.0 * f;

    for (int i = 0; i < 25; ++i) {
        const double u = ineq::rng::lognormal(gen, 1.0);
        const double base = ineq::influence(inner, u, m);
        const double composed = ineq::influence(wrapped, u, m);
        CHECK(composed == doctest::Approx(factor * base).epsilon(1e-12));
    }
}

TEST_CASE("influence agrees with the numerical quotient for all compositions") {
    std::mt19937_64 gen(53);
    const std::vector<ComposedFunctional> compositions = {
        ineq::as_composition(IndexKind::gini()),
        ineq::as_composition(IndexKind::amato()),
        ineq::as_composition(IndexKind::zenga()),
        ineq::as_composition(IndexKind::atkinson(0.5))};

    for (const auto& c : compositions) {
        const auto m = random_positive_measure(gen, 100);
        for (int i = 0; i < 15; ++i) {
            const bool on_atom = i % 2 == 0;
            const std::size_t pick =
                static_cast<std::size_t>(ineq::rng::uniform_below(gen, m.size()));
            const double atom_value = m.atoms()[pick].value;
            const double u = on_atom ? atom_value : atom_value * 1.01;
            const double closed = ineq::influence(c, u, m);
            const double numeric = ineq::gateaux_numeric(c, u, m, {1e-5, true});
            CHECK(std::fabs(closed - numeric) <= 1e-6 * (1.0 + std::fabs(closed)));
        }
    }
}

TEST_CASE("gateaux oracle rejects steps that empty the measure") {
    const auto m = DiscreteMeasure::from_values({1, 2});
    const auto gini = ineq::as_composition(IndexKind::gini());
    CHECK_THROWS_AS(ineq::gateaux_numeric(gini, 1.5, m, {5.0, false}),
                    std::domain_error);
}

TEST_CASE("influence is continuous between atoms") {
    std::mt19937_64 gen(61);
    const auto m = random_positive_measure(gen, 25);
    const std::vector<ComposedFunctional> compositions = {
        ineq::as_composition(IndexKind::gini()),
        ineq::as_composition(IndexKind::amato()),
        ineq::as_composition(IndexKind::zenga()),
        ineq::as_composition(IndexKind::atkinson(0.5))};

    const auto atoms = m.atoms();
    for (const auto& c : compositions) {
        for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
            const double mid = 0.5 * (atoms[i].value + atoms[i + 1].value);
            const double d = 1e-9 * mid;
            const double left = ineq::influence(c, mid - d, m);
            const double right = ineq::influence(c, mid + d, m);
            CHECK(std::fabs(right - left) <= 1e-5 * (1.0 + std::fabs(left)));
        }
    }
}
