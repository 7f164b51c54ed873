#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ineq/indexes.hpp"
#include "ineq/measure.hpp"
#include "ineq/random.hpp"

using ineq::Atom;
using ineq::DiscreteMeasure;
using ineq::IndexKind;

namespace {

const std::vector<IndexKind> all_kinds = {
    IndexKind::gini(), IndexKind::amato(), IndexKind::zenga(),
    IndexKind::atkinson(0.5)};

DiscreteMeasure random_positive_measure(std::mt19937_64& gen, std::size_t count,
                                        bool unit_weights) {
    std::vector<Atom> atoms;
    atoms.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        atoms.push_back({ineq::rng::lognormal(gen, 1.0),
                         unit_weights ? 1.0 : 0.2 + 3.0 * ineq::rng::uniform01(gen)});
    return DiscreteMeasure(std::move(atoms));
}

// query grid covering atoms, midpoints and both tails
std::vector<double> influence_grid(const DiscreteMeasure& m) {
    std::vector<double> grid;
    const auto atoms = m.atoms();
    grid.push_back(atoms.front().value / 2.0);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        grid.push_back(atoms[i].value);
        if (i + 1 < atoms.size())
            grid.push_back(0.5 * (atoms[i].value + atoms[i + 1].value));
    }
    grid.push_back(atoms.back().value * 1.5);
    return grid;
}

}  // namespace

TEST_CASE("gini fixtures") {
    const auto m = DiscreteMeasure::from_values({1, 2, 3});
    CHECK(ineq::gini_value(m) == doctest::Approx(5.0 / 9.0).epsilon(1e-15));

    CHECK(ineq::gini_influence(m, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(ineq::gini_influence(m, 2.0) == doctest::Approx(-1.0 / 27.0).epsilon(1e-14));
    CHECK(ineq::gini_influence(m, 3.0) == doctest::Approx(1.0 / 27.0).epsilon(1e-14));

    // equal population: ties put H = N at every atom and the functional
    // evaluates to 1, not 0
    const auto equal = DiscreteMeasure::from_values({5, 5, 5, 5});
    CHECK(ineq::gini_value(equal) == doctest::Approx(1.0).epsilon(1e-15));

    for (double lambda : {0.5, 3.0, 41.0}) {
        const auto scaled =
            DiscreteMeasure::from_values({lambda, 2 * lambda, 3 * lambda});
        CHECK(ineq::gini_value(scaled) == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(ineq::gini_value(DiscreteMeasure::from_values({-1, 2})),
                    std::domain_error);
}

TEST_CASE("amato fixtures") {
    const auto equal = DiscreteMeasure::from_values({7, 7, 7});
    CHECK(ineq::amato_value(equal) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(ineq::amato_influence(equal, 7.0) == doctest::Approx(0.0).epsilon(1e-14));

    const auto m = DiscreteMeasure::from_values({1, 3});
    const double expected = (std::sqrt(5.0) + std::sqrt(13.0)) / 4.0;
    CHECK(ineq::amato_value(m) == doctest::Approx(expected).epsilon(1e-15));

    // closed form vs numerical quotient at assorted u
    const auto comp = ineq::as_composition(IndexKind::amato());
    for (double u : {0.4, 1.0, 2.0, 3.0, 5.5}) {
        const double numeric = ineq::gateaux_numeric(comp, u, m, {1e-5, true});
        CHECK(ineq::amato_influence(m, u) == doctest::Approx(numeric).epsilon(1e-6));
    }
}

TEST_CASE("zenga fixtures") {
    CHECK(ineq::zenga_value(DiscreteMeasure::from_values({1, 2})) ==
          doctest::Approx(1.0).epsilon(1e-15));

    const auto m = DiscreteMeasure::from_values({1, 2, 3});
    CHECK(ineq::zenga_value(m) == doctest::Approx(29.0 / 30.0).epsilon(1e-15));

    const auto comp = ineq::as_composition(IndexKind::zenga());
    for (double u : {0.5, 1.0, 2.0, 3.0, 4.0}) {
        const double numeric = ineq::gateaux_numeric(comp, u, m, {1e-6, true});
        CHECK(std::fabs(ineq::zenga_influence(m, u) - numeric) <= 1e-6);
        const double engine = ineq::influence(comp, u, m);
        CHECK(std::fabs(ineq::zenga_influence(m, u) - engine) <=
              1e-10 * (1.0 + std::fabs(engine)));
    }

    CHECK_THROWS_AS(ineq::zenga_value(DiscreteMeasure::from_values({0, 1})),
                    std::domain_error);
    CHECK_THROWS_AS(ineq::zenga_value(DiscreteMeasure::from_values({-1, 2})),
                    std::domain_error);
}

TEST_CASE("atkinson fixtures") {
    const auto m = DiscreteMeasure::from_values({1, 4});
    CHECK(ineq::atkinson_value(m, 0.5) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(ineq::atkinson_influence(m, 1.0, 0.5) == doctest::Approx(0.03).epsilon(1e-13));
    CHECK(ineq::atkinson_influence(m, 4.0, 0.5) == doctest::Approx(-0.03).epsilon(1e-13));

    std::mt19937_64 gen(5);
    const auto random_m = random_positive_measure(gen, 50, true);
    CHECK(ineq::atkinson_value(random_m, 0.0) == doctest::Approx(0.0).epsilon(1e-13));
    for (double u : {0.5, 1.0, 2.0})
        CHECK(ineq::atkinson_influence(random_m, u, 0.0) == 0.0);

    const auto equal = DiscreteMeasure::from_values({3, 3, 3});
    for (double eps : {0.0, 0.3, 0.9})
        CHECK(ineq::atkinson_value(equal, eps) == doctest::Approx(0.0).epsilon(1e-13));

    CHECK_THROWS_AS(ineq::atkinson_value(m, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ineq::atkinson_value(m, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(ineq::atkinson_value(m, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(IndexKind::atkinson(1.0), std::invalid_argument);
    CHECK_THROWS_AS(ineq::atkinson_value(DiscreteMeasure::from_values({0, 1}), 0.5),
                    std::domain_error);
}

TEST_CASE("closed forms equal the engine route") {
    std::mt19937_64 gen(101);
    for (int rep = 0; rep < 8; ++rep) {
        const auto m = random_positive_measure(gen, 120, rep % 2 == 0);
        for (const IndexKind& kind : all_kinds) {
            const auto result = ineq::index_result(kind, m);
            const auto& comp = result.composition;
            CHECK(std::fabs(result.value - ineq::evaluate(comp, m)) <=
                  1e-12 * (1.0 + std::fabs(result.value)));
            for (double u : influence_grid(m)) {
                const double closed = result.influence_at(u);
                const double engine = ineq::influence(comp, u, m);
                CHECK(std::fabs(closed - engine) <= 1e-10 * (1.0 + std::fabs(closed)));
            }
        }
    }
}

TEST_CASE("closed-form influence agrees with the numerical quotient") {
    std::mt19937_64 gen(211);
    for (int rep = 0; rep < 3; ++rep) {
        const auto m = random_positive_measure(gen, 80, true);
        for (const IndexKind& kind : all_kinds) {
            const auto result = ineq::index_result(kind, m);
            const auto& comp = result.composition;
            for (double u : influence_grid(m)) {
                const double closed = result.influence_at(u);
                const double numeric = ineq::gateaux_numeric(comp, u, m, {1e-5, true});
                CHECK(std::fabs(closed - numeric) <= 1e-6 * (1.0 + std::fabs(closed)));
            }
        }
    }
}

TEST_CASE("degree-0 homogeneity in the weights") {
    std::mt19937_64 gen(307);
    const auto m = random_positive_measure(gen, 60, false);
    for (const IndexKind& kind : all_kinds) {
        const double base = ineq::index_value(kind, m);
        for (double c : {0.5, 2.0, 3.7}) {
            std::vector<Atom> scaled;
            for (const Atom& a : m.atoms()) scaled.push_back({a.value, c * a.weight});
            const double v = ineq::index_value(kind, DiscreteMeasure(scaled));
            CHECK(std::fabs(v - base) <= 1e-12 * (1.0 + std::fabs(base)));
        }
    }

    // k-fold replication of a unit-weight population is the same rescaling
    std::vector<double> values;
    for (int i = 0; i < 40; ++i) values.push_back(ineq::rng::lognormal(gen, 1.0));
    std::vector<double> replicated;
    for (int k = 0; k < 3; ++k)
        replicated.insert(replicated.end(), values.begin(), values.end());
    const auto one = DiscreteMeasure::from_values(values);
    const auto three = DiscreteMeasure::from_values(replicated);
    for (const IndexKind& kind : all_kinds) {
        const double a = ineq::index_value(kind, one);
        const double b = ineq::index_value(kind, three);
        CHECK(std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(a)));
    }
}

TEST_CASE("scale invariance in the values") {
    std::mt19937_64 gen(401);
    const auto m = random_positive_measure(gen, 60, false);
    for (const IndexKind& kind : all_kinds) {
        const double base = ineq::index_value(kind, m);
        for (double lambda : {0.25, 7.3}) {
            std::vector<Atom> scaled;
            for (const Atom& a : m.atoms())
                scaled.push_back({lambda * a.value, a.weight});
            const double v = ineq::index_value(kind, DiscreteMeasure(scaled));
            CHECK(std::fabs(v - base) <= 1e-12 * (1.0 + std::fabs(base)));
        }
    }
}

TEST_CASE("euler relation: the weighted influence integral vanishes") {
    std::mt19937_64 gen(503);
    for (int rep = 0; rep < 10; ++rep) {
        const auto m = random_positive_measure(gen, 100, rep % 2 == 0);
        const double n = m.mass();
        for (const IndexKind& kind : all_kinds) {
            const auto result = ineq::index_result(kind, m);
            double acc = 0.0;
            for (const Atom& a : m.atoms())
                acc += a.weight * result.influence_at(a.value);
            CHECK(std::fabs(acc) <= 1e-9 * (1.0 + n));
        }
    }
}

TEST_CASE("range spot checks") {
    std::mt19937_64 gen(601);
    for (int rep = 0; rep < 20; ++rep) {
        const auto m = random_positive_measure(gen, 50, true);
        CHECK(ineq::amato_value(m) >= std::sqrt(2.0) - 1e-12);
        for (double eps : {0.1, 0.5, 0.9}) {
            const double a = ineq::atkinson_value(m, eps);
            CHECK(a >= 0.0);
            CHECK(a < 1.0);
        }
    }
}

TEST_CASE("influence off the atom set is fully supported") {
    const auto m = DiscreteMeasure::from_values({1, 2, 3});
    // below the support, between atoms, above the support
    for (double u : {0.25, 1.5, 2.5, 9.0}) {
        for (const IndexKind& kind : all_kinds) {
            const double v = ineq::index_influence(kind, m, u);
            CHECK(std::isfinite(v));
            const double numeric =
                ineq::gateaux_numeric(ineq::as_composition(kind), u, m, {1e-6, true});
            CHECK(std::fabs(v - numeric) <= 1e-6 * (1.0 + std::fabs(v)));
        }
    }
}

TEST_CASE("validated composition builder follows the value preconditions") {
    const auto bad = DiscreteMeasure::from_values({0, 1});
    CHECK_THROWS_AS(ineq::as_composition(IndexKind::zenga(), bad), std::domain_error);
    CHECK_THROWS_AS(ineq::as_composition(IndexKind::atkinson(0.5), bad),
                    std::domain_error);
    const auto good = DiscreteMeasure::from_values({1, 2, 3});
    const auto comp = ineq::as_composition(IndexKind::gini(), good);
    CHECK(ineq::evaluate(comp, good) == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("index names") {
    CHECK(IndexKind::gini().name() == "gini");
    CHECK(IndexKind::amato().name() == "amato");
    CHECK(IndexKind::zenga().name() == "zenga");
    CHECK(IndexKind::atkinson(0.5).name() == "atkinson(eps=0.5)");
}
