#include <cmath>
#include <iostream>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rehab/adaptation.hpp"
#include "rehab/batch.hpp"
#include "rehab/dsl.hpp"
#include "rehab/numfmt.hpp"
#include "rehab/runner.hpp"
#include "rehab/trace_io.hpp"

namespace {

using rehab::format_double;

struct RunArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::string rulebase;
    std::vector<std::uint64_t> seeds;
    bool seed_set = false;
    std::uint64_t seed = 0;
    int jobs = 1;
};

int cmd_run(const RunArgs& args) {
    rehab::SessionConfig cfg = rehab::load_config_file(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (!args.rulebase.empty()) cfg.rulebase_path = args.rulebase;

    if (args.seeds.empty()) {
        const rehab::RunSummary summary = rehab::run_to_dir(cfg, args.out_dir);
        rehab::print_summary(std::cout, summary);
        return 0;
    }
    const auto summaries =
        rehab::sweep_seeds(cfg, args.seeds, args.jobs, args.out_dir);
    for (std::size_t i = 0; i < args.seeds.size(); ++i) {
        std::cout << "== seed " << args.seeds[i] << " ==\n";
        rehab::print_summary(std::cout, summaries[i]);
    }
    return 0;
}

struct InferArgs {
    std::string rulebase;
    std::vector<std::string> assignments;
    std::string format = "text";
};

int cmd_infer(const InferArgs& args) {
    const rehab::RuleBase rb = args.rulebase.empty()
                                   ? rehab::default_rulebase()
                                   : rehab::load_rulebase_file(args.rulebase);
    rehab::InputValues inputs;
    // Unassigned variables default to the low end of their universe.
    for (const rehab::LinguisticVariable& var : rb.inputs) {
        inputs[var.name] = var.lo;
    }
    for (const std::string& a : args.assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) {
            throw rehab::ConfigError("assignment '" + a + "' is not name=value");
        }
        const std::string name = a.substr(0, eq);
        if (rb.find_input(name) == nullptr) {
            throw rehab::ConfigError("unknown variable '" + name + "'");
        }
        try {
            inputs[name] = std::stod(a.substr(eq + 1));
        } catch (const std::exception&) {
            throw rehab::ConfigError("assignment '" + a + "' has no numeric value");
        }
    }

    const rehab::InferenceResult res = rehab::infer(rb, inputs);
    const bool classifiable =
        rb.output.name == "GameProgress" && rb.output.lo == 0.0 && rb.output.hi == 80.0;
    const char* action = classifiable ? rehab::action_name(rehab::classify(res.crisp))
                                      : "";

    if (args.format == "json") {
        nlohmann::ordered_json j;
        j["crisp"] = res.crisp;
        if (classifiable) j["action"] = action;
        j["firing_strengths"] = res.firing_strengths;
        nlohmann::ordered_json acts;
        for (const auto& [label, level] : res.term_activations) acts[label] = level;
        j["term_activations"] = acts;
        std::cout << j.dump(2) << "\n";
    } else if (args.format == "csv") {
        std::cout << "rule,strength\n";
        for (std::size_t i = 0; i < res.firing_strengths.size(); ++i) {
            std::cout << (i + 1) << "," << format_double(res.firing_strengths[i])
                      << "\n";
        }
        std::cout << "crisp," << format_double(res.crisp) << "\n";
        if (classifiable) std::cout << "action," << action << "\n";
    } else {
        for (std::size_t i = 0; i < res.firing_strengths.size(); ++i) {
            if (res.firing_strengths[i] == 0.0) continue;
            std::cout << "rule " << (i + 1) << ": strength "
                      << format_double(res.firing_strengths[i]) << "\n";
        }
        std::cout << "crisp: " << format_double(res.crisp) << "\n";
        if (classifiable) std::cout << "action: " << action << "\n";
    }
    return 0;
}

struct IkArgs {
    double l1 = 0.0, l2 = 0.0, l3 = 0.0;
    double x = 0.0, y = 0.0, z = 0.0;
    std::string branch = "up";
};

int cmd_ik(const IkArgs& args) {
    const rehab::ArmGeometry geom{args.l1, args.l2, args.l3};
    const rehab::Point3 target{args.x, args.y, args.z};
    const auto branch = (args.branch == "down") ? rehab::ElbowBranch::Down
                                                : rehab::ElbowBranch::Up;
    const rehab::JointAngles q = rehab::solve_ik(geom, target, branch);
    const rehab::Point3 back = rehab::forward_kinematics(geom, q);
    const double residual = rehab::norm(back - target);
    constexpr double kDeg = 180.0 / std::numbers::pi;
    std::cout << "theta1: " << format_double(q.theta1 * kDeg) << " deg\n"
              << "theta2: " << format_double(q.theta2 * kDeg) << " deg\n"
              << "theta3: " << format_double(q.theta3 * kDeg) << " deg\n"
              << "fk_residual: " << format_double(residual) << " m\n";
    return 0;
}

int cmd_check_rules(const std::string& path) {
    const rehab::RuleBase rb = rehab::load_rulebase_file(path);
    const auto diags = rehab::validate(rb);
    for (const rehab::Diagnostic& d : diags) {
        const char* kind = "";
        switch (d.kind) {
            case rehab::DiagnosticKind::CoverageGap: kind = "coverage-gap"; break;
            case rehab::DiagnosticKind::UnreachableTerm: kind = "unreachable-term"; break;
            case rehab::DiagnosticKind::VacuousRule: kind = "vacuous-rule"; break;
        }
        std::cout << kind << ": " << d.message << "\n";
    }
    std::cout << rb.inputs.size() << " input variable(s), " << rb.rules.size()
              << " rule(s), " << diags.size() << " diagnostic(s)\n";
    return 0;
}

struct MetricsArgs {
    std::string trace_path;
    std::string reference_path;
    std::string events_path;
    std::vector<std::string> active;
    std::string format = "text";
};

int cmd_metrics(const MetricsArgs& args) {
    rehab::SessionTrace trace;
    trace.frames = rehab::load_frames_csv(args.trace_path);
    trace.reference = rehab::load_frames_csv(args.reference_path);
    if (!args.events_path.empty()) {
        trace.events = rehab::load_events_jsonl(args.events_path);
    }

    std::set<std::string> active(args.active.begin(), args.active.end());
    if (active.empty()) {
        for (const std::string& name : rehab::fuzzy_input_names()) {
            // Timing metrics need events; leave them out unless provided.
            if (args.events_path.empty() && (name == "T.E_C" || name == "T.E_R")) {
                continue;
            }
            active.insert(name);
        }
    }

    const rehab::FuzzyInputVector inputs = rehab::build_fuzzy_inputs(trace, active);
    const auto pedal = rehab::pedal_dominance(trace);

    if (args.format == "json") {
        nlohmann::ordered_json j;
        nlohmann::ordered_json vals;
        for (const auto& [name, value] : inputs) vals[name] = value;
        j["inputs"] = vals;
        j["pedal_avg"] = pedal.first;
        j["pedal_dominance"] = rehab::dominance_name(pedal.second);
        std::cout << j.dump(2) << "\n";
    } else if (args.format == "csv") {
        std::cout << "name,value\n";
        for (const auto& [name, value] : inputs) {
            std::cout << name << "," << format_double(value) << "\n";
        }
        std::cout << "pedal_avg," << format_double(pedal.first) << "\n";
        std::cout << "pedal_dominance," << rehab::dominance_name(pedal.second) << "\n";
    } else {
        for (const auto& [name, value] : inputs) {
            std::cout << name << ": " << format_double(value) << "\n";
        }
        std::cout << "pedal: " << format_double(pedal.first) << " ("
                  << rehab::dominance_name(pedal.second) << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rehabctl: fuzzy adaptive-difficulty session toolkit"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "simulate a session from a JSON config");
    run->add_option("config", run_args.config_path, "session config JSON")->required();
    run->add_option("--out", run_args.out_dir, "output directory (default: out)");
    run->add_option("--rulebase", run_args.rulebase, "override rulebase path");
    auto* seed_opt = run->add_option("--seed", run_args.seed, "override config seed");
    run->add_option("--seeds", run_args.seeds,
                    "run one session per seed into <out>/seed_<s>/")
        ->delimiter(',');
    run->add_option("--jobs", run_args.jobs, "parallel sessions for --seeds");

    InferArgs infer_args;
    CLI::App* infer = app.add_subcommand("infer", "evaluate a rulebase on crisp inputs");
    infer->add_option("--rulebase", infer_args.rulebase,
                      "rulebase path (default: shipped rules)");
    infer->add_option("assignments", infer_args.assignments,
                      "name=value input assignments");
    infer->add_option("--format", infer_args.format, "text|json|csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));

    IkArgs ik_args;
    CLI::App* ik = app.add_subcommand("ik", "solve inverse kinematics for one target");
    ik->add_option("l1", ik_args.l1, "base link length, m")->required();
    ik->add_option("l2", ik_args.l2, "upper arm length, m")->required();
    ik->add_option("l3", ik_args.l3, "forearm length, m")->required();
    ik->add_option("x", ik_args.x, "target x, m")->required();
    ik->add_option("y", ik_args.y, "target y, m")->required();
    ik->add_option("z", ik_args.z, "target z, m")->required();
    ik->add_option("--branch", ik_args.branch, "up|down elbow branch")
        ->check(CLI::IsMember({"up", "down"}));

    std::string check_path;
    CLI::App* check = app.add_subcommand("check-rules", "parse and review a rulebase");
    check->add_option("rules", check_path, ".frules file")->required();

    MetricsArgs metrics_args;
    CLI::App* metrics =
        app.add_subcommand("metrics", "compute fuzzy inputs from trace CSVs");
    metrics->add_option("trace", metrics_args.trace_path, "player frames CSV")
        ->required();
    metrics->add_option("reference", metrics_args.reference_path,
                        "instructor frames CSV")
        ->required();
    metrics->add_option("--events", metrics_args.events_path,
                        "events JSONL (enables timing metrics)");
    metrics->add_option("--active", metrics_args.active, "metric names to compute")
        ->delimiter(',');
    metrics->add_option("--format", metrics_args.format, "text|json|csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            run_args.seed_set = seed_opt->count() > 0;
            return cmd_run(run_args);
        }
        if (infer->parsed()) return cmd_infer(infer_args);
        if (ik->parsed()) return cmd_ik(ik_args);
        if (check->parsed()) return cmd_check_rules(check_path);
        if (metrics->parsed()) return cmd_metrics(metrics_args);
    } catch (const rehab::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const rehab::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
