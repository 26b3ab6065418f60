#pragma once

#include <array>
#include <string>

#include "rehab/fuzzy.hpp"
#include "rehab/metrics.hpp"

namespace rehab {

enum class AdaptAction { Progression, Repetition, Simplification, Harmfulness };

const char* action_name(AdaptAction a);

enum class Handedness { Left, Right };

struct JointRangeLimit {
    double min_deg = -180.0;
    double max_deg = 180.0;
};

struct DifficultyState {
    int level = 0;
    double spawn_radius_min = 20.0;  // cm
    double spawn_radius_max = 40.0;  // cm
    int iterations = 5;              // targets per task
    double basket_size = 1.0;        // scale factor
    double fruit_size = 1.0;         // scale factor
    double fruit_speed = 10.0;       // cm/s
    Handedness handedness = Handedness::Right;
    std::array<JointRangeLimit, 3> joint_limits{};  // indexed by Joint
    bool halted = false;
};

// Update multipliers applied by adapt(); all tunable from session config.
struct AdaptRates {
    double progress_radius_factor = 1.1;
    double progress_speed_factor = 1.1;
    int progress_iterations = 2;
    double simplify_radius_factor = 0.9;
    double simplify_fruit_factor = 1.1;
    double simplify_speed_factor = 0.9;
};

// The 13 input variables plus the GameProgress output. Inputs partition each
// universe with uniformly spaced peaks and feet at the neighboring peaks
// (boundary terms degenerate), so memberships at any point sum to 1. Output
// terms peak at the band centers 10/30/50/70 with feet one band-width out,
// placing each term's centroid exactly at its peak.
std::vector<LinguisticVariable> default_variables();

// Canonical text of the shipped rulebase (identical to assets/default.frules).
const std::string& default_rulebase_text();

// Parses default_rulebase_text(). Structure: one low-weight rule per
// (variable, term) grading that input alone, a full-weight all-VG rule, and
// a full-weight any-H rule so a single harmful input dominates the average.
RuleBase default_rulebase();

// [0,20) Progression, [20,40) Repetition, [40,60) Simplification,
// [60,80] Harmfulness; band edges go to the higher-severity action.
// Out-of-range crisp throws DomainError.
AdaptAction classify(double crisp);

DifficultyState adapt(const DifficultyState& d, AdaptAction action,
                      const AdaptRates& rates = {});

struct DecisionRecord {
    FuzzyInputVector inputs;
    double crisp = 0.0;
    AdaptAction action = AdaptAction::Repetition;
    DifficultyState before;
    DifficultyState after;
    double timestamp = 0.0;  // last frame time of the evaluated trace
};

// build_fuzzy_inputs -> infer -> classify -> adapt. Rules are restricted to
// the active variables first: antecedent OR-groups touching an inactive
// variable are removed, and rules left with no groups are dropped.
DecisionRecord run_controller(const SessionTrace& trace, const DifficultyState& d,
                              const RuleBase& rb,
                              const std::set<std::string>& active_set,
                              const AdaptRates& rates = {});

// The active-variable restriction by itself, exposed for tests and the CLI.
RuleBase restrict_to_active(const RuleBase& rb,
                            const std::set<std::string>& active_set);

}  // namespace rehab
