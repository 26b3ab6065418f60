#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "rehab/adaptation.hpp"
#include "rehab/kinematics.hpp"
#include "rehab/metrics.hpp"

namespace rehab {

// Synthetic impairment model applied on top of the instructor trajectory.
struct PlayerProfile {
    double noise_std = 0.0;           // deg, Gaussian jitter per chain angle
    double position_noise_std = 0.0;  // cm, Gaussian jitter per position axis
    double slowdown = 1.0;            // >= 1, time dilation of all movement
    std::array<double, 3> range_limit = {180.0, 180.0, 180.0};  // deg, |angle| cap
    double tremor_amplitude = 0.0;    // deg
    double tremor_frequency = 0.0;    // Hz
    double posture_drift = 0.0;       // deg/s added to head and spine tilt
    double pedal_bias = 0.0;          // [-1, 1]
    std::uint64_t seed = 0;
};

struct TargetSpec {
    Point3 position;              // meters, world frame
    double collect_time = 4.0;    // prescribed spawn-to-collect, seconds
    double release_time = 2.0;    // prescribed reach-to-collect, seconds
};

struct TaskSpec {
    std::vector<TargetSpec> targets;
    ArmGeometry geometry;
    double grasp_radius = 5.0;  // cm, "reached" / "collected" proximity
};

// Samples `iterations` targets volume-uniformly in the intersection of the
// spawn shell [spawn_radius_min, spawn_radius_max] (cm, centered on the
// shoulder) with the reachable annulus, mirrored to the handed side (Right
// keeps y <= 0). Targets whose reference pose violates the difficulty's
// joint limits are resampled. Deterministic given rng_seed.
TaskSpec spawn_targets(const DifficultyState& d, const ArmGeometry& geom,
                       std::uint64_t rng_seed, double collect_time = 4.0,
                       double release_time = 2.0, double grasp_radius = 5.0);

// Instructor trajectory: per target, joint-space linear ramp from the rest
// pose (0,0,0) to the IK pose over collect_time - release_time seconds, then
// back to rest over release_time (depositing into the basket at the rest
// hand position). Segments are separated by one frame. Zero tilts, neutral
// pedal.
//
// Frame fields derive from the chain angles:
//   shoulder orientation (deg) = (theta1, theta2, 0)
//   elbow orientation          = (0, theta3, 0)         local flexion
//   wrist orientation          = (theta1, theta2 + theta3, 0)
//   positions (cm)             = chain joint positions * 100
std::vector<MotionFrame> reference_trajectory(const TaskSpec& task,
                                              double frame_rate_hz = 30.0);

// Player trace: the reference plan time-dilated by `slowdown`, with Gaussian
// angle/position noise, sinusoidal tremor, per-joint range clamping, posture
// drift on the tilts, and biased pedal. Task events fire at the first frame
// at or after the dilated plan time with the hand inside the grasp radius of
// the target (reached) or basket (collected); events that never satisfy the
// test stay incomplete. Deterministic given profile.seed.
SessionTrace simulate_player(const PlayerProfile& profile,
                             const std::vector<MotionFrame>& reference,
                             const TaskSpec& task, double frame_rate_hz = 30.0);

struct SessionConfig {
    PlayerProfile player_profile;
    DifficultyState difficulty;
    int tasks = 3;
    double frame_rate_hz = 30.0;
    std::string rulebase_path;  // empty: shipped default rulebase
    std::set<std::string> active_inputs;  // empty set means all 13
    std::uint64_t seed = 0;
    ArmGeometry arm;
    AdaptRates adapt_rates;
    double target_collect_time = 4.0;
    double target_release_time = 2.0;
    double grasp_radius = 5.0;  // cm
};

struct SessionResult {
    std::vector<SessionTrace> traces;      // one per executed task
    std::vector<DecisionRecord> decisions;  // parallel to traces
};

// Task loop: spawn -> reference -> simulate -> run_controller -> adapt,
// stopping after a Harmfulness decision. Errors gain "task N" and stage
// context. The rulebase is loaded from rulebase_path or the shipped default.
SessionResult run_session(const SessionConfig& config);

// As above with a caller-supplied rulebase (saves reparsing in sweeps).
SessionResult run_session(const SessionConfig& config, const RuleBase& rb);

}  // namespace rehab
