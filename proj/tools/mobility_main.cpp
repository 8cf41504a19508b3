#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mobility/intersection.hpp"
#include "mobility/mechanism.hpp"
#include "mobility/results.hpp"
#include "mobility/scenario_json.hpp"
#include "mobility/solver.hpp"
#include "mobility/team_json.hpp"
#include "mobility/team_simulation.hpp"

namespace {

using nlohmann::json;
using namespace mobility;

std::string canonical_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

struct PlannerFlags {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double equity_gmax = 0.0;
    double co_traveler_penalty = 0.0;
    CLI::Option* omega1_opt = nullptr;
    CLI::Option* omega2_opt = nullptr;
    CLI::Option* gmax_opt = nullptr;
    CLI::Option* penalty_opt = nullptr;

    void attach(CLI::App* app) {
        omega1_opt = app->add_option("--omega1", omega1, "inconvenience weight");
        omega2_opt = app->add_option("--omega2", omega2, "operating-cost weight");
        gmax_opt = app->add_option("--equity-gmax", equity_gmax,
                                   "equity bound on the inconvenience Gini (1 disables)");
        penalty_opt = app->add_option("--co-traveler-penalty", co_traveler_penalty,
                                      "money charge per co-traveler beyond tolerance");
    }

    market::PlannerConfig apply(market::PlannerConfig config,
                                std::map<std::string, std::string>& overrides) const {
        if (*omega1_opt) {
            config.omega1 = omega1;
            overrides["omega1"] = canonical_number(omega1);
        }
        if (*omega2_opt) {
            config.omega2 = omega2;
            overrides["omega2"] = canonical_number(omega2);
        }
        if (*gmax_opt) {
            config.equity_gmax = equity_gmax;
            overrides["equity_gmax"] = canonical_number(equity_gmax);
        }
        if (*penalty_opt) {
            config.co_traveler_penalty = co_traveler_penalty;
            overrides["co_traveler_penalty"] = canonical_number(co_traveler_penalty);
        }
        return config;
    }
};

int cmd_solve(const std::string& scenario_path, const PlannerFlags& flags,
              const std::string& payment_mode, std::uint64_t seed, const std::string& out_path,
              int workers) {
    const std::string bytes = cli::read_file(scenario_path);
    const auto scenario = network::load_scenario(scenario_path);

    cli::RunManifest manifest;
    manifest.command = "solve";
    manifest.input_path = scenario_path;
    manifest.master_seed = seed;
    manifest.input_hash = cli::fnv1a64_hex(bytes);
    const auto config = flags.apply(scenario.planner, manifest.overrides);
    manifest.overrides["payment_mode"] = payment_mode;

    const auto rule = mechanism::PaymentRule::parse(payment_mode);
    const auto partition = network::partition_subclasses(scenario.travelers);
    const auto results = solver::solve_all(scenario, config, workers);

    json subclasses = json::array();
    double total_objective = 0.0;
    double total_welfare = 0.0;
    for (std::size_t k = 0; k < results.size(); ++k) {
        json entry{{"index", k},
                   {"travelers", partition.subclasses[k]},
                   {"solve", cli::solve_result_to_json(results[k])}};
        if (results[k].status == solver::SolveStatus::optimal) {
            const auto payments =
                mechanism::clarke_payments(partition.subclasses[k], scenario, config, rule);
            const auto outcome = market::evaluate_outcome(
                results[k].assignment, payments.payments(), scenario, config);
            entry["outcome"] = cli::outcome_to_json(outcome);
            entry["payments"] = cli::payments_to_json(payments);
            total_objective += outcome.objective;
            total_welfare += outcome.welfare;
            std::cout << "subclass " << k << " (objective " << outcome.objective << ")\n"
                      << cli::format_outcome_table(outcome) << "\n";
        } else {
            std::cout << "subclass " << k
                      << ": infeasible (the equity bound excludes every assignment)\n\n";
        }
        subclasses.push_back(std::move(entry));
    }

    const json doc{{"schema", cli::kResultsSchema},
                   {"manifest", manifest.to_json()},
                   {"subclasses", subclasses},
                   {"totals", {{"objective", total_objective}, {"welfare", total_welfare}}}};
    cli::write_atomic(out_path, doc.dump(2) + "\n");
    return 0;
}

int cmd_verify(const std::string& scenario_path, const std::string& property,
               const PlannerFlags& flags, const std::string& payment_mode,
               std::uint64_t seed, std::size_t misreport_points, const std::string& out_path) {
    const std::string bytes = cli::read_file(scenario_path);
    const auto scenario = network::load_scenario(scenario_path);

    cli::RunManifest manifest;
    manifest.command = "verify";
    manifest.input_path = scenario_path;
    manifest.master_seed = seed;
    manifest.input_hash = cli::fnv1a64_hex(bytes);
    const auto config = flags.apply(scenario.planner, manifest.overrides);
    manifest.overrides["payment_mode"] = payment_mode;
    manifest.overrides["property"] = property;

    const auto rule = mechanism::PaymentRule::parse(payment_mode);
    mechanism::PropertyReport report;
    if (property == "ic") {
        mechanism::MisreportGrid grid;
        grid.max_points = misreport_points;
        report = mechanism::verify_incentive_compatibility(scenario, config, grid, seed, rule);
    } else if (property == "ir") {
        report = mechanism::verify_individual_rationality(scenario, config, rule);
    } else if (property == "wbb") {
        report = mechanism::verify_weak_budget_balance(scenario, config, rule);
    } else {
        throw Error("unknown property '" + property + "' (expected ic, ir or wbb)");
    }

    const json doc{{"schema", cli::kResultsSchema},
                   {"manifest", manifest.to_json()},
                   {"report", cli::report_to_json(report)}};
    cli::write_atomic(out_path, doc.dump(2) + "\n");

    std::cout << property << ": " << report.verdict() << " (" << report.instances_tested
              << " cells tested";
    if (report.property == mechanism::MechanismProperty::weak_budget_balance)
        std::cout << ", aggregate surplus " << report.aggregate_surplus;
    std::cout << ")\n";
    for (const auto& w : report.witnesses)
        std::cout << "  witness: traveler " << w.traveler << ", " << w.description
                  << ", gain " << w.utility_gain << "\n";
    return report.violated() ? 2 : 0;
}

int cmd_coordinate(const std::string& model_path, bool intersection,
                   coordination::IntersectionParams params, int episodes,
                   std::uint64_t seed, const std::string& out_path,
                   const std::string& traj_path_flag, int workers) {
    coordination::TeamModel model;
    cli::RunManifest manifest;
    manifest.command = "coordinate";
    manifest.master_seed = seed;

    if (intersection) {
        model = coordination::build_intersection_scenario(params);
        manifest.input_path = "intersection";
        manifest.overrides["cells"] = std::to_string(params.cells);
        manifest.overrides["delay"] = std::to_string(params.delay);
        manifest.overrides["noise"] = canonical_number(params.noise);
        manifest.overrides["horizon"] = std::to_string(model.horizon);
        manifest.input_hash =
            cli::fnv1a64_hex(coordination::serialize_team_model(model).dump());
    } else {
        const std::string bytes = cli::read_file(model_path);
        model = coordination::load_team_model(model_path);
        manifest.input_path = model_path;
        manifest.input_hash = cli::fnv1a64_hex(bytes);
    }
    manifest.overrides["episodes"] = std::to_string(episodes);
    if (!traj_path_flag.empty()) manifest.overrides["traj_log"] = traj_path_flag;

    const auto strategy = coordination::solve_planning(model);
    const auto stats = coordination::simulate_team(model, strategy, episodes, seed, workers);

    // The default log name is a function of the manifest, so the results
    // bytes never depend on where --out points.
    const std::string traj_name =
        "traj-" + cli::fnv1a64_hex(manifest.to_json().dump()).substr(8) + ".jsonl";
    const std::string traj_path =
        traj_path_flag.empty()
            ? (std::filesystem::path(out_path).parent_path() / traj_name).string()
            : traj_path_flag;
    const std::string traj_reference = traj_path_flag.empty() ? traj_name : traj_path_flag;
    std::string traj;
    for (std::size_t e = 0; e < stats.episodes.size(); ++e) {
        for (const auto& step : stats.episodes[e].steps) {
            json names_u = json::array();
            json names_y = json::array();
            for (int k = 0; k < model.member_count(); ++k) {
                names_u.push_back(model.members[k].actions[step.decisions[k]]);
                names_y.push_back(model.members[k].observations[step.observations[k]]);
            }
            const json line{{"episode", e},
                            {"t", step.t},
                            {"x", model.states[step.state]},
                            {"u", names_u},
                            {"y", names_y},
                            {"cost", step.cost}};
            traj += line.dump() + "\n";
        }
    }
    cli::write_atomic(traj_path, traj);

    const json doc{{"schema", cli::kResultsSchema},
                   {"manifest", manifest.to_json()},
                   {"value", strategy.value},
                   {"episodes", episodes},
                   {"mean_cost", stats.mean_cost},
                   {"standard_error", stats.standard_error},
                   {"collision_episodes", stats.collision_episodes},
                   {"trajectory_log", traj_reference}};
    cli::write_atomic(out_path, doc.dump(2) + "\n");

    std::cout << "planned value " << strategy.value << ", empirical mean " << stats.mean_cost
              << " +- " << stats.standard_error << " over " << episodes << " episodes, "
              << stats.collision_episodes << " collision episodes\n";
    return 0;
}

int cmd_report(const std::string& results_path) {
    json doc;
    try {
        doc = json::parse(cli::read_file(results_path));
    } catch (const json::exception& e) {
        throw ParseError("results file '" + results_path + "': " + e.what());
    }
    if (doc.value("schema", "") != cli::kResultsSchema)
        throw ParseError("results file does not carry schema " +
                         std::string(cli::kResultsSchema));

    const std::string command = doc["manifest"].value("command", "");
    std::cout << "command: " << command << "\n"
              << "input:   " << doc["manifest"].value("input_path", "") << " ("
              << doc["manifest"].value("input_hash", "") << ")\n";
    if (command == "solve") {
        for (const auto& entry : doc["subclasses"]) {
            std::cout << "subclass " << entry["index"] << " travelers " << entry["travelers"]
                      << ": " << entry["solve"]["status"].get<std::string>();
            if (entry.contains("outcome"))
                std::cout << ", objective " << entry["outcome"]["objective"]
                          << ", welfare " << entry["outcome"]["welfare"];
            std::cout << "\n";
            if (entry.contains("outcome")) {
                for (const auto& row : entry["outcome"]["per_traveler"])
                    std::cout << "  traveler " << row["traveler"] << " -> service "
                              << row["service"] << ", payment " << row["payment"]
                              << ", utility " << row["utility"] << "\n";
            }
        }
    } else if (command == "verify") {
        const auto& report = doc["report"];
        std::cout << report["property"].get<std::string>() << ": "
                  << report["verdict"].get<std::string>() << " ("
                  << report["instances_tested"] << " cells)\n";
        for (const auto& w : report["witnesses"])
            std::cout << "  witness: traveler " << w["traveler"] << ", "
                      << w["description"].get<std::string>() << "\n";
    } else if (command == "coordinate") {
        std::cout << "planned value " << doc["value"] << ", empirical mean "
                  << doc["mean_cost"] << " +- " << doc["standard_error"] << ", collisions "
                  << doc["collision_episodes"] << "\n";
    } else {
        throw ParseError("results file carries an unknown command '" + command + "'");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"socially optimal mobility toolkit"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "assign services, price them, report outcomes");
    std::string scenario_path;
    solve->add_option("scenario", scenario_path, "scenario JSON file")->required();
    PlannerFlags solve_flags;
    solve_flags.attach(solve);
    std::string payment_mode = "clarke-floored";
    solve->add_option("--payment-mode", payment_mode, "clarke or clarke-floored")
        ->check(CLI::IsMember({"clarke", "clarke-floored"}));
    std::uint64_t seed = 0;
    solve->add_option("--seed", seed, "master seed");
    std::string out_path = "results.json";
    solve->add_option("--out", out_path, "results file path");
    int workers = 1;
    solve->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

    // verify
    auto* verify = app.add_subcommand("verify", "check a mechanism property empirically");
    std::string verify_scenario;
    verify->add_option("scenario", verify_scenario, "scenario JSON file")->required();
    std::string property;
    verify->add_option("property", property, "ic, ir or wbb")->required();
    PlannerFlags verify_flags;
    verify_flags.attach(verify);
    std::string verify_payment_mode = "clarke";
    verify->add_option("--payment-mode", verify_payment_mode, "clarke or clarke-floored")
        ->check(CLI::IsMember({"clarke", "clarke-floored"}));
    std::uint64_t verify_seed = 0;
    verify->add_option("--seed", verify_seed, "master seed");
    std::size_t misreport_points = 0;
    verify->add_option("--misreport-points", misreport_points,
                       "subsample size of the misreport grid (0 = full grid)");
    std::string verify_out = "verify.json";
    verify->add_option("--out", verify_out, "results file path");

    // coordinate
    auto* coordinate =
        app.add_subcommand("coordinate", "solve and simulate a delayed-sharing team");
    std::string model_path;
    auto* model_opt = coordinate->add_option("model", model_path, "team model JSON file");
    bool intersection = false;
    auto* intersection_opt = coordinate->add_flag(
        "--intersection", intersection, "build the two-vehicle intersection scenario");
    coordination::IntersectionParams params;
    coordinate->add_option("--cells", params.cells, "cells per approach");
    coordinate->add_option("--delay", params.delay, "sharing delay");
    coordinate->add_option("--noise", params.noise, "second member's observation noise");
    coordinate->add_option("--horizon", params.horizon, "decision epochs (0 = 2*cells)");
    coordinate->add_option("--collision-penalty", params.collision_penalty,
                           "collision cost (0 = 1000*horizon)");
    int episodes = 1000;
    coordinate->add_option("--episodes", episodes, "episode count")
        ->check(CLI::PositiveNumber);
    std::uint64_t coordinate_seed = 0;
    coordinate->add_option("--seed", coordinate_seed, "master seed");
    std::string coordinate_out = "coordination.json";
    coordinate->add_option("--out", coordinate_out, "results file path");
    std::string traj_path;
    coordinate->add_option("--traj-log", traj_path, "trajectory log path");
    int coordinate_workers = 1;
    coordinate->add_option("--workers", coordinate_workers, "worker threads")
        ->check(CLI::PositiveNumber);
    model_opt->excludes(intersection_opt);

    // report
    auto* report = app.add_subcommand("report", "render a results file");
    std::string results_path;
    report->add_option("results", results_path, "results JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed())
            return cmd_solve(scenario_path, solve_flags, payment_mode, seed, out_path, workers);
        if (verify->parsed())
            return cmd_verify(verify_scenario, property, verify_flags, verify_payment_mode,
                              verify_seed, misreport_points, verify_out);
        if (coordinate->parsed()) {
            if (!intersection && model_path.empty())
                throw Error("coordinate needs a model file or --intersection");
            return cmd_coordinate(model_path, intersection, params, episodes, coordinate_seed,
                                  coordinate_out, traj_path, coordinate_workers);
        }
        if (report->parsed()) return cmd_report(results_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
