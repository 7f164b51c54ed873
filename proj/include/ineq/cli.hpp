#ifndef INEQ_CLI_HPP
#define INEQ_CLI_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ineq/csv.hpp"
#include "ineq/indexes.hpp"
#include "ineq/montecarlo.hpp"
#include "ineq/survey.hpp"

// Command-line front end.
//
// Subcommands: compute, influence, estimate, simulate.  JSON output is the
// machine contract (schema "ineq-report/1", full double precision);
// human-readable output rounds to 6 significant digits.
//
// Exit codes: 0 success, 2 parse/usage error, 3 domain error,
// 4 oracle-check failure (influence --check-oracle beyond --tol).

namespace ineq::cli {

inline constexpr const char* report_schema = "ineq-report/1";

namespace cli_detail {

inline std::string human(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

inline std::string full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline IndexKind make_kind(const std::string& name, std::optional<double> epsilon) {
    if (name == "gini") return IndexKind::gini();
    if (name == "amato") return IndexKind::amato();
    if (name == "zenga") return IndexKind::zenga();
    if (name == "atkinson") {
        if (!epsilon)
            throw ParseError(0, "index 'atkinson' requires --epsilon");
        return IndexKind::atkinson(*epsilon);
    }
    throw ParseError(0, "unknown index '" + name + "'");
}

// precondition scan with the offending line in the message
inline void check_population_domain(IndexKind kind,
                                    const std::vector<PopulationRow>& rows) {
    const bool needs_positive = kind.family() == IndexFamily::zenga ||
                                kind.family() == IndexFamily::atkinson;
    const bool needs_nonnegative = kind.family() == IndexFamily::gini;
    for (const PopulationRow& row : rows) {
        if (needs_positive && !(row.y > 0.0))
            throw std::domain_error("line " + std::to_string(row.line) + ": y = " +
                                    human(row.y) + " but " + kind.name() +
                                    " requires positive values");
        if (needs_nonnegative && row.y < 0.0)
            throw std::domain_error("line " + std::to_string(row.line) + ": y = " +
                                    human(row.y) + " but " + kind.name() +
                                    " requires nonnegative values");
    }
}

inline void check_sample_domain(IndexKind kind, const std::vector<SampleRow>& rows) {
    const bool needs_positive = kind.family() == IndexFamily::zenga ||
                                kind.family() == IndexFamily::atkinson;
    const bool needs_nonnegative = kind.family() == IndexFamily::gini;
    for (const SampleRow& row : rows) {
        if (needs_positive && !(row.y > 0.0))
            throw std::domain_error("line " + std::to_string(row.line) + ": y = " +
                                    human(row.y) + " but " + kind.name() +
                                    " requires positive values");
        if (needs_nonnegative && row.y < 0.0)
            throw std::domain_error("line " + std::to_string(row.line) + ": y = " +
                                    human(row.y) + " but " + kind.name() +
                                    " requires nonnegative values");
    }
}

inline DiscreteMeasure measure_from_rows(const std::vector<PopulationRow>& rows) {
    std::vector<Atom> atoms;
    atoms.reserve(rows.size());
    for (const PopulationRow& row : rows) atoms.push_back({row.y, row.weight});
    return DiscreteMeasure(std::move(atoms));
}

inline nlohmann::json index_json(IndexKind kind) {
    nlohmann::json j;
    switch (kind.family()) {
        case IndexFamily::gini: j["index"] = "gini"; break;
        case IndexFamily::amato: j["index"] = "amato"; break;
        case IndexFamily::zenga: j["index"] = "zenga"; break;
        case IndexFamily::atkinson:
            j["index"] = "atkinson";
            j["epsilon"] = kind.epsilon();
            break;
    }
    return j;
}

struct ComputeOptions {
    std::string population_path;
    std::vector<std::string> index_names;
    std::optional<double> epsilon;
    bool json = false;
};

inline int run_compute(const ComputeOptions& opt, std::ostream& out) {
    const auto rows = read_population_csv_file(opt.population_path);
    std::vector<IndexKind> kinds;
    for (const std::string& name : opt.index_names)
        kinds.push_back(make_kind(name, opt.epsilon));
    for (const IndexKind& kind : kinds) check_population_domain(kind, rows);
    const DiscreteMeasure m = measure_from_rows(rows);

    nlohmann::json results = nlohmann::json::array();
    for (const IndexKind& kind : kinds) {
        const double value = index_value(kind, m);
        if (!opt.json) out << kind.name() << " = " << human(value) << "\n";
        nlohmann::json one = index_json(kind);
        one["value"] = value;
        results.push_back(one);
    }
    if (opt.json) {
        nlohmann::json report;
        report["schema"] = report_schema;
        report["command"] = "compute";
        report["input"] = opt.population_path;
        report["rows"] = rows.size();
        report["results"] = results;
        out << report.dump(2) << "\n";
    }
    return 0;
}

struct InfluenceOptions {
    std::string population_path;
    std::string index_name;
    std::optional<double> epsilon;
    std::optional<double> at;
    bool all_atoms = false;
    bool check_oracle = false;
    double step = 1e-5;
    double tol = 1e-6;
    bool json = false;
};

inline int run_influence(const InfluenceOptions& opt, std::ostream& out) {
    if (opt.at.has_value() == opt.all_atoms)
        throw ParseError(0, "influence needs exactly one of --at or --all-atoms");
    const auto rows = read_population_csv_file(opt.population_path);
    const IndexKind kind = make_kind(opt.index_name, opt.epsilon);
    check_population_domain(kind, rows);
    const DiscreteMeasure m = measure_from_rows(rows);
    const IndexResult result = index_result(kind, m);

    std::vector<double> points;
    if (opt.at) {
        points.push_back(*opt.at);
    } else {
        for (const Atom& a : m.atoms()) points.push_back(a.value);
    }

    nlohmann::json json_points = nlohmann::json::array();
    double max_gap = 0.0;
    if (!opt.json) {
        out << "u\tinfluence";
        if (opt.check_oracle) out << "\toracle\tgap";
        out << "\n";
    }
    for (double u : points) {
        const double value = result.influence_at(u);
        nlohmann::json p;
        p["u"] = u;
        p["influence"] = value;
        if (opt.check_oracle) {
            const double oracle =
                gateaux_numeric(result.composition, u, m, {opt.step, true});
            const double gap = std::fabs(value - oracle);
            max_gap = std::max(max_gap, gap);
            p["oracle"] = oracle;
            p["gap"] = gap;
            if (!opt.json)
                out << human(u) << "\t" << human(value) << "\t" << human(oracle)
                    << "\t" << human(gap) << "\n";
        } else if (!opt.json) {
            out << human(u) << "\t" << human(value) << "\n";
        }
        json_points.push_back(p);
    }

    if (opt.json) {
        nlohmann::json report = index_json(kind);
        report["schema"] = report_schema;
        report["command"] = "influence";
        report["input"] = opt.population_path;
        report["value"] = result.value;
        report["points"] = json_points;
        if (opt.check_oracle) {
            report["max_gap"] = max_gap;
            report["tol"] = opt.tol;
        }
        out << report.dump(2) << "\n";
    } else if (opt.check_oracle) {
        out << "max_gap = " << human(max_gap) << " (tol " << human(opt.tol) << ")\n";
    }
    return opt.check_oracle && max_gap > opt.tol ? 4 : 0;
}

struct EstimateOptions {
    std::string sample_path;
    std::string index_name;
    std::optional<double> epsilon;
    std::string design;
    std::optional<int> pop_size;
    double level = 0.95;
    bool json = false;
};

inline int run_estimate(const EstimateOptions& opt, std::ostream& out) {
    const auto rows = read_sample_csv_file(opt.sample_path);
    const IndexKind kind = make_kind(opt.index_name, opt.epsilon);
    check_sample_domain(kind, rows);
    const int n = static_cast<int>(rows.size());

    SampleData sample;
    if (opt.design == "srswor") {
        if (!opt.pop_size)
            throw std::domain_error(
                "srswor joint probabilities are underdetermined without --pop-size");
        const int big_n = *opt.pop_size;
        if (big_n < n)
            throw std::domain_error("sample has " + std::to_string(n) +
                                    " rows but --pop-size is only " +
                                    std::to_string(big_n));
        const double expected = static_cast<double>(n) / big_n;
        for (const SampleRow& row : rows)
            if (std::fabs(row.pi - expected) > 1e-9)
                throw std::domain_error(
                    "line " + std::to_string(row.line) + ": pi = " + human(row.pi) +
                    " inconsistent with srswor n=" + std::to_string(n) +
                    ", N=" + std::to_string(big_n) + " (expected " + human(expected) +
                    ")");
        sample.design = SamplingDesign::srswor(big_n, n);
        for (int i = 0; i < n; ++i)
            sample.units.push_back(
                {i, rows[static_cast<std::size_t>(i)].y, expected});
    } else if (opt.design == "poisson" || opt.design == "bernoulli") {
        if (opt.design == "bernoulli") {
            for (const SampleRow& row : rows)
                if (std::fabs(row.pi - rows.front().pi) > 1e-12)
                    throw std::domain_error("line " + std::to_string(row.line) +
                                            ": bernoulli requires a constant pi");
        }
        // only the sampled units and the independence rule enter the
        // variance, so the design is built over the sample itself
        std::vector<double> pi;
        for (const SampleRow& row : rows) pi.push_back(row.pi);
        sample.design = SamplingDesign::poisson(pi);
        for (int i = 0; i < n; ++i)
            sample.units.push_back({i, rows[static_cast<std::size_t>(i)].y,
                                    rows[static_cast<std::size_t>(i)].pi});
    } else if (opt.design == "stratified") {
        throw std::domain_error(
            "stratified joint probabilities are underdetermined by a flat sample "
            "file (no stratum information)");
    } else {
        throw ParseError(0, "unknown design '" + opt.design + "'");
    }

    const VarianceReport report = estimate_with_variance(kind, sample, opt.level);

    if (opt.json) {
        nlohmann::json j = index_json(kind);
        j["schema"] = report_schema;
        j["command"] = "estimate";
        j["input"] = opt.sample_path;
        j["design"] = opt.design;
        if (opt.pop_size) j["pop_size"] = *opt.pop_size;
        j["n"] = report.n_effective;
        j["estimate"] = report.estimate;
        j["variance"] = report.variance;
        j["raw_variance"] = report.raw_variance;
        j["std_error"] = report.std_error;
        j["ci"] = {report.ci_lower, report.ci_upper};
        j["level"] = report.level;
        j["method"] = to_string(report.method);
        out << j.dump(2) << "\n";
    } else {
        out << "estimate = " << human(report.estimate) << "\n"
            << "std_error = " << human(report.std_error) << "\n"
            << "ci" << human(100.0 * report.level) << " = ["
            << human(report.ci_lower) << ", " << human(report.ci_upper) << "]\n"
            << "method = " << to_string(report.method) << "\n";
    }
    return 0;
}

inline PopulationSpec population_from_json(const nlohmann::json& j) {
    if (j.contains("values"))
        return PopulationSpec::inline_values_of(
            j.at("values").get<std::vector<double>>());
    const std::string generator = j.at("generator").get<std::string>();
    const int size = j.at("size").get<int>();
    const std::uint64_t seed = j.at("seed").get<std::uint64_t>();
    if (generator == "lognormal")
        return PopulationSpec::lognormal_of(size, j.value("sigma", 1.0), seed);
    if (generator == "pareto")
        return PopulationSpec::pareto_of(size, j.at("alpha").get<double>(), seed);
    if (generator == "uniform")
        return PopulationSpec::uniform_of(size, j.value("lo", 0.0), j.value("hi", 1.0),
                                          seed);
    throw ParseError(0, "unknown population generator '" + generator + "'");
}

inline DesignSpec design_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "srswor") return DesignSpec::srswor_of(j.at("n").get<int>());
    if (kind == "bernoulli") return DesignSpec::bernoulli_of(j.at("p").get<double>());
    if (kind == "poisson")
        return DesignSpec::poisson_of(j.at("pi").get<std::vector<double>>());
    if (kind == "stratified")
        return DesignSpec::stratified_of(
            j.at("strata_sizes").get<std::vector<int>>(),
            j.at("n_per_stratum").get<std::vector<int>>());
    throw ParseError(0, "unknown design kind '" + kind + "'");
}

inline IndexKind index_from_json(const nlohmann::json& j) {
    if (j.is_string()) return make_kind(j.get<std::string>(), std::nullopt);
    const std::string kind = j.at("kind").get<std::string>();
    std::optional<double> epsilon;
    if (j.contains("epsilon")) epsilon = j.at("epsilon").get<double>();
    return make_kind(kind, epsilon);
}

inline SimulationConfig config_from_json(const nlohmann::json& j) {
    SimulationConfig config;
    config.population = population_from_json(j.at("population"));
    config.design = design_from_json(j.at("design"));
    config.index = index_from_json(j.at("index"));
    config.replicates = j.at("replicates").get<int>();
    config.level = j.value("level", 0.95);
    config.master_seed = j.at("master_seed").get<std::uint64_t>();
    const std::string z_at = j.value("linearize_at", "empirical");
    if (z_at == "population")
        config.linearize_at_population = true;
    else if (z_at != "empirical")
        throw ParseError(0, "linearize_at must be 'empirical' or 'population'");
    return config;
}

struct SimulateOptions {
    std::string config_path;
    std::string per_replicate_path;
    int threads = 1;
    std::optional<std::uint64_t> seed_override;
};

inline void write_per_replicate_csv(const SimulationReport& report,
                                    const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::domain_error("cannot open output file: " + path);
    out << "replicate,estimate,variance,raw_variance,std_error,ci_lower,ci_upper,"
           "covered,degenerate\n";
    for (const ReplicateRow& row : report.per_replicate) {
        out << row.replicate << ',' << full(row.estimate) << ',' << full(row.variance)
            << ',' << full(row.raw_variance) << ',' << full(row.std_error) << ','
            << full(row.ci_lower) << ',' << full(row.ci_upper) << ','
            << (row.covered ? 1 : 0) << ',' << (row.degenerate ? 1 : 0) << "\n";
    }
}

inline int run_simulate(const SimulateOptions& opt, std::ostream& out) {
    SimulationConfig config;
    try {
        auto in = open_input_file(opt.config_path);
        const nlohmann::json j = nlohmann::json::parse(in);
        config = config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("malformed config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(0, std::string("malformed config: ") + e.what());
    }
    if (opt.seed_override) config.master_seed = *opt.seed_override;

    SimulationReport report;
    try {
        report = run(config, opt.threads);
    } catch (const std::invalid_argument& e) {
        throw ParseError(0, std::string("malformed config: ") + e.what());
    }

    if (!opt.per_replicate_path.empty())
        write_per_replicate_csv(report, opt.per_replicate_path);

    nlohmann::json j;
    j["schema"] = report_schema;
    j["command"] = "simulate";
    j["config"] = report.fingerprint;
    j["true_value"] = report.true_value;
    j["mean_estimate"] = report.mean_estimate;
    j["empirical_variance"] = report.empirical_variance;
    j["mean_linearized_variance"] = report.mean_linearized_variance;
    j["variance_ratio"] = report.variance_ratio;
    j["coverage"] = report.coverage;
    j["replicates"] = report.replicates;
    j["degenerate_count"] = report.degenerate_count;
    j["timing_seconds"] = report.timing_seconds;
    out << j.dump(2) << "\n";
    return 0;
}

}  // namespace cli_detail

/// Parse and run one command.  `args` excludes the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out,
                   std::ostream& err) {
    using namespace cli_detail;

    CLI::App app{
        "ineq: inequality indexes, influence functions and design-based "
        "variance estimation"};
    app.require_subcommand(1);

    const std::vector<std::string> index_choices = {"gini", "amato", "zenga",
                                                    "atkinson"};

    ComputeOptions compute;
    CLI::App* compute_cmd =
        app.add_subcommand("compute", "Compute index values for a population file");
    compute_cmd->add_option("population", compute.population_path, "population CSV")
        ->required();
    compute_cmd->add_option("--index", compute.index_names, "index (repeatable)")
        ->required()
        ->check(CLI::IsMember(index_choices));
    double compute_eps = 0.0;
    CLI::Option* compute_eps_opt =
        compute_cmd->add_option("--epsilon", compute_eps, "atkinson epsilon in [0,1)");
    compute_cmd->add_flag("--json", compute.json, "emit a JSON report");

    InfluenceOptions influence;
    CLI::App* influence_cmd = app.add_subcommand(
        "influence", "Evaluate the influence function of an index");
    influence_cmd->add_option("population", influence.population_path, "population CSV")
        ->required();
    influence_cmd->add_option("--index", influence.index_name, "index")
        ->required()
        ->check(CLI::IsMember(index_choices));
    double influence_eps = 0.0;
    CLI::Option* influence_eps_opt =
        influence_cmd->add_option("--epsilon", influence_eps, "atkinson epsilon");
    double influence_at = 0.0;
    CLI::Option* influence_at_opt =
        influence_cmd->add_option("--at", influence_at, "query point u");
    influence_cmd->add_flag("--all-atoms", influence.all_atoms,
                            "query at every population value");
    influence_cmd->add_flag("--check-oracle", influence.check_oracle,
                            "compare against the numerical derivative");
    influence_cmd->add_option("--step", influence.step,
                              "finite-difference mass step (default 1e-5)");
    influence_cmd->add_option("--tol", influence.tol,
                              "max allowed |closed - oracle| gap (default 1e-6)");
    influence_cmd->add_flag("--json", influence.json, "emit a JSON report");

    EstimateOptions estimate;
    CLI::App* estimate_cmd = app.add_subcommand(
        "estimate", "Plug-in estimate with linearized variance from a sample file");
    estimate_cmd->add_option("sample", estimate.sample_path, "sample CSV (y,pi)")
        ->required();
    estimate_cmd->add_option("--index", estimate.index_name, "index")
        ->required()
        ->check(CLI::IsMember(index_choices));
    double estimate_eps = 0.0;
    CLI::Option* estimate_eps_opt =
        estimate_cmd->add_option("--epsilon", estimate_eps, "atkinson epsilon");
    estimate_cmd
        ->add_option("--design", estimate.design,
                     "sampling design the sample came from")
        ->required()
        ->check(CLI::IsMember({"srswor", "poisson", "bernoulli", "stratified"}));
    int estimate_pop_size = 0;
    CLI::Option* estimate_pop_opt = estimate_cmd->add_option(
        "--pop-size", estimate_pop_size, "population size N (srswor)");
    estimate_cmd->add_option("--level", estimate.level,
                             "confidence level (default 0.95)");
    estimate_cmd->add_flag("--json", estimate.json, "emit a JSON report");

    SimulateOptions simulate;
    CLI::App* simulate_cmd = app.add_subcommand(
        "simulate", "Replicated-sampling experiment from a JSON config");
    simulate_cmd->add_option("config", simulate.config_path, "simulation config JSON")
        ->required();
    simulate_cmd->add_option("--per-replicate", simulate.per_replicate_path,
                             "write the replicate table to this CSV");
    simulate_cmd->add_option("--threads", simulate.threads,
                             "worker threads (does not affect results)");
    std::uint64_t simulate_seed = 0;
    CLI::Option* simulate_seed_opt = simulate_cmd->add_option(
        "--seed", simulate_seed, "override the config's master_seed");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (compute_cmd->parsed()) {
            if (compute_eps_opt->count() > 0) compute.epsilon = compute_eps;
            return run_compute(compute, out);
        }
        if (influence_cmd->parsed()) {
            if (influence_eps_opt->count() > 0) influence.epsilon = influence_eps;
            if (influence_at_opt->count() > 0) influence.at = influence_at;
            return run_influence(influence, out);
        }
        if (estimate_cmd->parsed()) {
            if (estimate_eps_opt->count() > 0) estimate.epsilon = estimate_eps;
            if (estimate_pop_opt->count() > 0) estimate.pop_size = estimate_pop_size;
            return run_estimate(estimate, out);
        }
        if (simulate_cmd->parsed()) {
            if (simulate_seed_opt->count() > 0) simulate.seed_override = simulate_seed;
            return run_simulate(simulate, out);
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    err << "error: no command\n";
    return 2;
}

}  // namespace ineq::cli

#endif  // INEQ_CLI_HPP
