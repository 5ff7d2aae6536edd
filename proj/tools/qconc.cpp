// Copyright (c) 2026 the qconc authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: schmidt, concentrate, shared, superdense, purify,
// verify. JSON in, JSON/CSV/pretty out, all randomness seeded. Exit codes:
// 0 success, 2 input error, 3 domain error (rank deficiency, annihilation),
// 4 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qconc/qconc.hpp"

namespace {

using qconc::Json;

struct GlobalOptions {
    std::uint64_t seed = 42;
    double tol = 1e-9;
    std::size_t trials = 10000;
    std::string format = "json";
    std::string out_path;
};

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qconc::InvalidInputError("cannot open file: " + path);
    try {
        Json j;
        in >> j;
        return j;
    } catch (const Json::parse_error& e) {
        throw qconc::InvalidInputError("malformed JSON in " + path + ": " + e.what());
    }
}

void flatten(const Json& j, const std::string& prefix, std::ostream& os) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items())
            flatten(value, prefix.empty() ? key : prefix + "." + key, os);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten(j[i], prefix + "[" + std::to_string(i) + "]", os);
    } else {
        os << prefix << "," << j.dump() << "\n";
    }
}

void print_pretty(const Json& j, std::ostream& os, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object() || (value.is_array() && !value.empty() && value[0].is_array())
                || (value.is_array() && !value.empty() && value[0].is_object())) {
                os << pad << key << ":\n";
                print_pretty(value, os, indent + 1);
            } else {
                os << pad << key << ": " << value.dump() << "\n";
            }
        }
    } else if (j.is_array()) {
        for (const auto& item : j) {
            if (item.is_object() || item.is_array()) {
                os << pad << "-\n";
                print_pretty(item, os, indent + 1);
            } else {
                os << pad << "- " << item.dump() << "\n";
            }
        }
    } else {
        os << pad << j.dump() << "\n";
    }
}

void emit(const Json& report, const GlobalOptions& g) {
    std::ostringstream body;
    if (g.format == "json") {
        body << report.dump(2) << "\n";
    } else if (g.format == "csv") {
        body << "key,value\n";
        flatten(report, "", body);
    } else {
        print_pretty(report, body, 0);
    }
    if (g.out_path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(g.out_path);
        if (!out) throw qconc::InvalidInputError("cannot write file: " + g.out_path);
        out << body.str();
    }
}

qconc::Party parse_side(const std::string& side) {
    if (side == "alice" || side == "Alice") return qconc::Party::Alice;
    if (side == "bob" || side == "Bob") return qconc::Party::Bob;
    throw qconc::InvalidInputError("side must be 'alice' or 'bob'");
}

Json cmd_schmidt(const std::string& state_path, const GlobalOptions& g) {
    const qconc::PureBipartiteState s = qconc::state_from_json(load_json_file(state_path), g.tol);
    const qconc::SchmidtForm f = qconc::schmidt_decompose(s);
    return Json{{"command", "schmidt"},
                {"dimA", s.dim_a()},
                {"dimB", s.dim_b()},
                {"lambda", f.coeffs},
                {"schmidtRank", f.rank()},
                {"entropyBits", qconc::entanglement_entropy(f.coeffs)},
                {"marginalAlice", qconc::matrix_to_json(qconc::marginal(s, qconc::Party::Alice).matrix())},
                {"marginalBob", qconc::matrix_to_json(qconc::marginal(s, qconc::Party::Bob).matrix())}};
}

Json cmd_concentrate(const std::string& state_path, const GlobalOptions& g) {
    const qconc::PureBipartiteState s = qconc::state_from_json(load_json_file(state_path), g.tol);
    const qconc::ConcentrationResult r = qconc::concentrate(s);
    const qconc::ProbeDilation dilation = qconc::dilate(r.filter);
    std::size_t fired = 0;
    for (std::size_t t = 0; t < g.trials; ++t) {
        const auto m = qconc::simulate_measurement(dilation, s, qconc::derive_stream(g.seed, t));
        if (m.outcome == dilation.success_outcome()) ++fired;
    }
    return Json{{"command", "concentrate"},
                {"gammaMax", qconc::gamma_max(s)},
                {"analyticProbability", r.success_probability},
                {"monteCarlo",
                 Json{{"trials", g.trials},
                      {"successes", fired},
                      {"frequency",
                       static_cast<double>(fired) / static_cast<double>(g.trials)},
                      {"seed", g.seed}}},
                {"outputMaximallyEntangled",
                 qconc::is_maximally_entangled(r.output_state, qconc::kMaximalityTol)},
                {"filter", qconc::operation_to_json(r.filter)},
                {"outputState", qconc::state_to_json(r.output_state)}};
}

Json cmd_shared(const std::string& path1, const std::string& path2, const std::string& side,
                std::size_t falsify_budget, const GlobalOptions& g) {
    const qconc::PureBipartiteState s1 = qconc::state_from_json(load_json_file(path1), g.tol);
    const qconc::PureBipartiteState s2 = qconc::state_from_json(load_json_file(path2), g.tol);
    const qconc::Party party = parse_side(side);
    const auto v = qconc::shared_concentrator(s1, s2, party, g.tol);
    Json report{{"command", "shared"},
                {"side", qconc::to_string(party)},
                {"decision", v.concentratable ? "Concentratable" : "Impossible"},
                {"marginalDistance", v.marginal_distance}};
    if (v.concentratable) {
        report["filter"] = qconc::operation_to_json(*v.filter);
        report["verification"] = Json{{"probability1", v.probability_1},
                                      {"probability2", v.probability_2},
                                      {"output1Maximal", v.output_1_maximal},
                                      {"output2Maximal", v.output_2_maximal}};
    } else {
        report["witness"] = Json{{"side", qconc::to_string(party)},
                                 {"marginalDistance", v.marginal_distance}};
        report["crossFilterDeviation"] = v.cross_output_deviation;
    }
    if (falsify_budget > 0) {
        const auto f = qconc::proposition_falsifier(s1, s2, falsify_budget, g.seed);
        report["falsifier"] = qconc::falsifier_report_to_json(f);
    }
    return report;
}

Json cmd_superdense(double lambda2, const GlobalOptions& g) {
    if (lambda2 <= 0.0 || lambda2 > 0.5)
        throw qconc::InvalidInputError("lambda2 must lie in (0, 0.5]");
    const qconc::PureBipartiteState s = qconc::state_from_lambda2(lambda2);
    const qconc::BatchResult r = qconc::run_batch(s, g.trials, g.seed);
    return Json{{"command", "superdense"},
                {"lambda2", lambda2},
                {"analyticProbability", qconc::success_probability(s)},
                {"trials", r.trials},
                {"successes", r.successes},
                {"successRate", r.success_rate},
                {"errorsGivenSuccess", r.errors_given_success},
                {"seed", g.seed}};
}

Json cmd_purify(const std::string& state_path, double werner_p, bool have_werner,
                std::size_t budget, const GlobalOptions& g) {
    const qconc::DensityMatrix rho = [&] {
        if (have_werner) return qconc::werner_state(werner_p);
        return qconc::density_from_json(load_json_file(state_path), g.tol);
    }();
    const auto r = qconc::purification_falsifier(rho, budget, g.seed);
    Json report = qconc::falsifier_report_to_json(r);
    report["command"] = "purify";
    report["inputFraction"] = qconc::fully_entangled_fraction(rho, 1000, g.seed);
    if (have_werner) report["wernerP"] = werner_p;
    return report;
}

int cmd_verify(bool full, const GlobalOptions& g) {
    qconc::selfcheck::CheckOptions opts{.seed = g.seed, .quick = !full};
    const auto results = qconc::selfcheck::run_all_checks(opts);
    bool all_pass = true;
    if (g.format == "pretty") {
        std::ostringstream table;
        for (const auto& r : results) {
            char line[512];
            std::snprintf(line, sizeof(line), "%s  %-68s %8.2fs  %s\n",
                          r.pass ? "  ok" : "FAIL", r.name.c_str(), r.seconds,
                          r.detail.c_str());
            table << line;
            all_pass = all_pass && r.pass;
        }
        table << (all_pass ? "verification passed" : "verification FAILED") << " ("
              << results.size() << " invariants, " << (full ? "full" : "quick") << " mode)\n";
        if (g.out_path.empty()) {
            std::cout << table.str();
        } else {
            std::ofstream out(g.out_path);
            out << table.str();
        }
    } else {
        Json checks = Json::array();
        for (const auto& r : results) {
            checks.push_back(Json{{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
            all_pass = all_pass && r.pass;
        }
        emit(Json{{"command", "verify"},
                  {"mode", full ? "full" : "quick"},
                  {"allPass", all_pass},
                  {"checks", checks}},
             g);
    }
    return all_pass ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bipartite entanglement concentration toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--seed", g.seed, "seed for every random stream")->capture_default_str();
    app.add_option("--tol", g.tol, "numerical tolerance for input validation")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--trials", g.trials, "Monte Carlo trial count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "pretty"}))
        ->capture_default_str();
    app.add_option("--out", g.out_path, "write the report to a file instead of stdout");

    std::string state_path, state_path_2, side = "alice";
    std::size_t falsify_budget = 0;
    double lambda2 = 0.25;
    double werner_p = 0.5;
    std::size_t budget = 100000;
    bool full = false, quick = false;

    CLI::App* schmidt = app.add_subcommand("schmidt", "Schmidt spectrum, rank, entropy, marginals");
    schmidt->add_option("state", state_path, "state JSON file")->required();

    CLI::App* conc = app.add_subcommand(
        "concentrate", "optimal filter, its success probability and a Monte Carlo run");
    conc->add_option("state", state_path, "state JSON file")->required();

    CLI::App* shared = app.add_subcommand(
        "shared", "decide whether one filter concentrates both states");
    shared->add_option("state1", state_path, "first state JSON file")->required();
    shared->add_option("state2", state_path_2, "second state JSON file")->required();
    shared->add_option("--side", side, "which party filters: alice or bob")
        ->capture_default_str();
    shared->add_option("--falsify", falsify_budget,
                       "also run the randomized search with this budget");

    CLI::App* dense = app.add_subcommand(
        "superdense", "probabilistic dense coding batch over a tilted qubit pair");
    dense->add_option("--lambda2", lambda2, "smaller Schmidt coefficient, in (0, 0.5]")
        ->required();

    CLI::App* purify = app.add_subcommand(
        "purify", "randomized search for single-pair purification of a mixed state");
    purify->add_option("state", state_path, "density JSON file");
    CLI::Option* werner_opt =
        purify->add_option("--werner", werner_p, "use the Werner state with this p");
    purify->add_option("--budget", budget, "search budget")->capture_default_str();

    CLI::App* verify = app.add_subcommand("verify", "run every module's invariant suite");
    verify->add_flag("--full", full, "documented sample counts (slow)");
    verify->add_flag("--quick", quick, "reduced counts (default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (schmidt->parsed()) {
            emit(cmd_schmidt(state_path, g), g);
        } else if (conc->parsed()) {
            emit(cmd_concentrate(state_path, g), g);
        } else if (shared->parsed()) {
            emit(cmd_shared(state_path, state_path_2, side, falsify_budget, g), g);
        } else if (dense->parsed()) {
            emit(cmd_superdense(lambda2, g), g);
        } else if (purify->parsed()) {
            const bool have_werner = werner_opt->count() > 0;
            if (!have_werner && state_path.empty())
                throw qconc::InvalidInputError("purify needs a density file or --werner p");
            if (have_werner && !state_path.empty())
                throw qconc::InvalidInputError("purify takes either a density file or --werner, "
                                               "not both");
            emit(cmd_purify(state_path, werner_p, have_werner, budget, g), g);
        } else if (verify->parsed()) {
            return cmd_verify(full && !quick, g);
        }
    } catch (const qconc::InvalidInputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const qconc::RankDeficiencyError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const qconc::AnnihilationError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const qconc::NumericalFailureError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
