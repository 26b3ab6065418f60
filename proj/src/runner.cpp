#include "rehab/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rehab/dsl.hpp"
#include "rehab/numfmt.hpp"
#include "rehab/trace_io.hpp"

namespace rehab {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    return out;
}

}  // namespace

RunSummary run_to_dir(const SessionConfig& config, const std::string& out_dir) {
    const SessionResult result = run_session(config);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    auto frames_out = open_out(dir / "frames.csv");
    auto reference_out = open_out(dir / "reference.csv");
    auto events_out = open_out(dir / "events.jsonl");
    auto decisions_out = open_out(dir / "decisions.jsonl");

    // Per-task traces start at t = 0; shift each task into a single session
    // timeline, one frame period apart.
    const double frame_dt = 1.0 / config.frame_rate_hz;
    double offset = 0.0;
    std::vector<MotionFrame> all_frames;
    std::vector<MotionFrame> all_reference;
    RunSummary summary;
    summary.tasks_requested = config.tasks;

    for (std::size_t k = 0; k < result.traces.size(); ++k) {
        const SessionTrace& trace = result.traces[k];
        const DecisionRecord& rec = result.decisions[k];

        for (MotionFrame f : trace.frames) {
            f.t += offset;
            all_frames.push_back(f);
        }
        for (MotionFrame f : trace.reference) {
            f.t += offset;
            all_reference.push_back(f);
        }
        write_events_jsonl(events_out, static_cast<int>(k), offset, trace.events);
        write_decision_jsonl(decisions_out, static_cast<int>(k), offset, rec);

        TaskSummary ts;
        ts.task = static_cast<int>(k) + 1;
        ts.action = rec.action;
        ts.crisp = rec.crisp;
        ts.level_after = rec.after.level;
        const auto pedal = pedal_dominance(trace);
        ts.pedal_avg = pedal.first;
        ts.dominance = pedal.second;
        summary.tasks.push_back(ts);

        summary.final_level = rec.after.level;
        if (rec.action == AdaptAction::Harmfulness) {
            summary.halted = true;
            summary.halted_task = ts.task;
        }
        offset += trace.frames.back().t + frame_dt;
    }

    write_frames_csv(frames_out, all_frames);
    write_frames_csv(reference_out, all_reference);
    return summary;
}

void print_summary(std::ostream& out, const RunSummary& summary) {
    out << "task  action          crisp    level  pedal_avg  dominance\n";
    char line[128];
    for (const TaskSummary& ts : summary.tasks) {
        std::snprintf(line, sizeof line, "%-4d  %-14s  %7.3f  %-5d  %9.3f  %s\n",
                      ts.task, action_name(ts.action), ts.crisp, ts.level_after,
                      ts.pedal_avg, dominance_name(ts.dominance));
        out << line;
    }
    out << "session: " << summary.tasks.size() << " of " << summary.tasks_requested
        << " task(s) run, final level " << summary.final_level;
    if (summary.halted) {
        out << ", halted at task " << summary.halted_task;
    }
    out << "\n";
}

std::vector<RunSummary> sweep_seeds(const SessionConfig& config,
                                    const std::vector<std::uint64_t>& seeds,
                                    int jobs, const std::string& out_root) {
    std::vector<RunSummary> summaries(seeds.size());
    // Exceptions cannot cross the parallel loop; record them and rethrow the
    // first one (by seed order) with its category preserved.
    enum class FailKind { None, Config, Domain, Other };
    std::vector<FailKind> fail_kind(seeds.size(), FailKind::None);
    std::vector<std::string> fail_msg(seeds.size());

    if (jobs < 1) jobs = 1;
    const int n = static_cast<int>(seeds.size());
#ifdef _OPENMP
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
#endif
    for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        SessionConfig cfg = config;
        cfg.seed = seeds[idx];
        const std::string dir = out_root + "/seed_" + std::to_string(cfg.seed);
        try {
            summaries[idx] = run_to_dir(cfg, dir);
        } catch (const ConfigError& e) {
            fail_kind[idx] = FailKind::Config;
            fail_msg[idx] = e.what();
        } catch (const DomainError& e) {
            fail_kind[idx] = FailKind::Domain;
            fail_msg[idx] = e.what();
        } catch (const std::exception& e) {
            fail_kind[idx] = FailKind::Other;
            fail_msg[idx] = e.what();
        }
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (fail_kind[i] == FailKind::None) continue;
        const std::string msg = "seed " + std::to_string(seeds[i]) + ": " + fail_msg[i];
        switch (fail_kind[i]) {
            case FailKind::Config: throw ConfigError(msg);
            case FailKind::Domain: throw DomainError(msg);
            default: throw Error(msg);
        }
    }
    return summaries;
}

}  // namespace rehab
