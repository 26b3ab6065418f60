#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rehab/simulator.hpp"

namespace rehab {

struct TaskSummary {
    int task = 0;  // 1-based
    AdaptAction action = AdaptAction::Repetition;
    double crisp = 0.0;
    int level_after = 0;
    double pedal_avg = 0.0;
    Dominance dominance = Dominance::Neutral;
};

struct RunSummary {
    std::vector<TaskSummary> tasks;
    int tasks_requested = 0;
    int final_level = 0;
    bool halted = false;
    int halted_task = 0;  // 1-based, valid when halted
};

// Executes the session and writes frames.csv, reference.csv, events.jsonl
// and decisions.jsonl under out_dir (created if missing). Timestamps in the
// files are session-global: task k's frames start one frame period after
// task k-1 ends.
RunSummary run_to_dir(const SessionConfig& config, const std::string& out_dir);

void print_summary(std::ostream& out, const RunSummary& summary);

// One run per seed, written to <out_root>/seed_<seed>/; `jobs` > 1 runs
// seeds concurrently (each seed's output is independent of scheduling).
std::vector<RunSummary> sweep_seeds(const SessionConfig& config,
                                    const std::vector<std::uint64_t>& seeds,
                                    int jobs, const std::string& out_root);

}  // namespace rehab
