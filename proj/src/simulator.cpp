#include "rehab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rehab/dsl.hpp"
#include "rehab/rng.hpp"

namespace rehab {

namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;
constexpr double kRadPerDeg = std::numbers::pi / 180.0;

void validate_profile(const PlayerProfile& p) {
    if (p.noise_std < 0.0 || p.position_noise_std < 0.0 ||
        p.tremor_amplitude < 0.0 || p.tremor_frequency < 0.0 ||
        p.posture_drift < 0.0) {
        throw ConfigError("player profile magnitudes must be non-negative");
    }
    if (p.slowdown < 1.0) {
        throw ConfigError("player profile slowdown must be >= 1");
    }
    for (double limit : p.range_limit) {
        if (limit < 0.0) throw ConfigError("player range limits must be >= 0 degrees");
    }
    if (p.pedal_bias < -1.0 || p.pedal_bias > 1.0) {
        throw ConfigError("pedal bias must lie in [-1, 1]");
    }
}

void validate_difficulty(const DifficultyState& d) {
    if (d.level < 0) throw ConfigError("difficulty level must be >= 0");
    if (d.iterations < 1) throw ConfigError("difficulty iterations must be >= 1");
    if (d.spawn_radius_min < 0.0 || d.spawn_radius_min > d.spawn_radius_max) {
        throw ConfigError("spawn radii must satisfy 0 <= min <= max");
    }
    if (d.basket_size <= 0.0 || d.fruit_size <= 0.0) {
        throw ConfigError("basket and fruit sizes must be positive");
    }
    if (d.fruit_speed < 0.0) throw ConfigError("fruit speed must be >= 0");
    for (const JointRangeLimit& l : d.joint_limits) {
        if (l.min_deg > l.max_deg) {
            throw ConfigError("difficulty joint limits must satisfy min <= max");
        }
    }
}

void validate_geometry(const ArmGeometry& g) {
    if (g.l1 <= 0.0 || g.l2 <= 0.0 || g.l3 <= 0.0) {
        throw ConfigError("arm link lengths must be positive");
    }
}

// Per-target phase boundaries as frame indices, so plan times land exactly
// on the sampling grid.
struct Segment {
    std::int64_t spawn_f = 0;
    std::int64_t reach_f = 0;
    std::int64_t collect_f = 0;
    JointAngles q_target;
};

std::vector<Segment> build_schedule(const TaskSpec& task, double fps) {
    if (fps <= 0.0) throw ConfigError("frame rate must be positive");
    if (task.targets.empty()) throw ConfigError("task has no targets");
    if (task.grasp_radius <= 0.0) throw ConfigError("grasp radius must be positive");
    std::vector<Segment> sched;
    sched.reserve(task.targets.size());
    std::int64_t cursor = 0;
    for (const TargetSpec& target : task.targets) {
        if (!(target.collect_time > target.release_time && target.release_time > 0.0)) {
            throw ConfigError("target times must satisfy collect > release > 0");
        }
        const auto seg_frames = std::llround(target.collect_time * fps);
        const auto reach_frames =
            std::llround((target.collect_time - target.release_time) * fps);
        if (reach_frames < 1 || seg_frames - reach_frames < 1) {
            throw ConfigError("frame rate too low to sample the target phases");
        }
        Segment seg;
        seg.spawn_f = cursor;
        seg.reach_f = cursor + reach_frames;
        seg.collect_f = cursor + seg_frames;
        seg.q_target = solve_ik(task.geometry, target.position);
        sched.push_back(seg);
        cursor = seg.collect_f + 1;  // one-frame gap before the next spawn
    }
    return sched;
}

JointAngles lerp_angles(const JointAngles& a, const JointAngles& b, double s) {
    return {a.theta1 + s * (b.theta1 - a.theta1),
            a.theta2 + s * (b.theta2 - a.theta2),
            a.theta3 + s * (b.theta3 - a.theta3)};
}

// Plan pose at time tau (seconds): ramp rest -> target -> rest per segment,
// rest inside the inter-segment gaps and beyond the last segment.
JointAngles plan_angles(const std::vector<Segment>& sched, double fps, double tau) {
    const JointAngles rest{};
    for (const Segment& seg : sched) {
        const double t_spawn = static_cast<double>(seg.spawn_f) / fps;
        const double t_reach = static_cast<double>(seg.reach_f) / fps;
        const double t_collect = static_cast<double>(seg.collect_f) / fps;
        if (tau < t_spawn) return rest;
        if (tau <= t_reach) {
            return lerp_angles(rest, seg.q_target, (tau - t_spawn) / (t_reach - t_spawn));
        }
        if (tau <= t_collect) {
            return lerp_angles(seg.q_target, rest,
                               (tau - t_reach) / (t_collect - t_reach));
        }
    }
    return rest;
}

// Shared frame assembly so reference and player traces touch bit-identical
// code paths. Angles arrive in degrees.
MotionFrame make_frame(double t, const ArmGeometry& geom,
                       const std::array<double, 3>& angles_deg) {
    MotionFrame f;
    f.t = t;
    const JointAngles q{angles_deg[0] * kRadPerDeg, angles_deg[1] * kRadPerDeg,
                        angles_deg[2] * kRadPerDeg};
    const ChainPose pose = chain_pose(geom, q);
    f.joint(Joint::Shoulder).orientation = {angles_deg[0], angles_deg[1], 0.0};
    f.joint(Joint::Elbow).orientation = {0.0, angles_deg[2], 0.0};
    f.joint(Joint::Wrist).orientation = {angles_deg[0],
                                         angles_deg[1] + angles_deg[2], 0.0};
    f.joint(Joint::Shoulder).position = 100.0 * pose.shoulder;
    f.joint(Joint::Elbow).position = 100.0 * pose.elbow;
    f.joint(Joint::Wrist).position = 100.0 * pose.hand;
    return f;
}

std::array<double, 3> plan_angles_deg(const std::vector<Segment>& sched, double fps,
                                      double tau) {
    const JointAngles q = plan_angles(sched, fps, tau);
    return {q.theta1 * kDegPerRad, q.theta2 * kDegPerRad, q.theta3 * kDegPerRad};
}

}  // namespace

TaskSpec spawn_targets(const DifficultyState& d, const ArmGeometry& geom,
                       std::uint64_t rng_seed, double collect_time,
                       double release_time, double grasp_radius) {
    validate_difficulty(d);
    validate_geometry(geom);

    const double inner = std::max(d.spawn_radius_min / 100.0,
                                  std::abs(geom.l2 - geom.l3));
    const double outer = std::min(d.spawn_radius_max / 100.0, geom.l2 + geom.l3);
    if (inner > outer) {
        throw ConfigError("spawn shell does not intersect the reachable workspace");
    }

    TaskSpec task;
    task.geometry = geom;
    task.grasp_radius = grasp_radius;
    Rng rng(rng_seed);
    const double inner3 = inner * inner * inner;
    const double outer3 = outer * outer * outer;

    for (int i = 0; i < d.iterations; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
            const double r = std::cbrt(inner3 + rng.uniform01() * (outer3 - inner3));
            const double cz = rng.uniform(-1.0, 1.0);
            const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double s = std::sqrt(std::max(0.0, 1.0 - cz * cz));
            Point3 dir{s * std::cos(phi), s * std::sin(phi), cz};
            dir.y = (d.handedness == Handedness::Right) ? -std::abs(dir.y)
                                                        : std::abs(dir.y);
            const Point3 p{r * dir.x, r * dir.y, geom.l1 + r * dir.z};
            if (p.x == 0.0 && p.y == 0.0) continue;
            if (!reachable(geom, p)) continue;
            JointAngles q;
            try {
                q = solve_ik(geom, p);
            } catch (const DomainError&) {
                continue;
            }
            const double deg[3] = {q.theta1 * kDegPerRad, q.theta2 * kDegPerRad,
                                   q.theta3 * kDegPerRad};
            bool within = true;
            for (int k = 0; k < 3; ++k) {
                if (deg[k] < d.joint_limits[k].min_deg ||
                    deg[k] > d.joint_limits[k].max_deg) {
                    within = false;
                    break;
                }
            }
            if (!within) continue;
            task.targets.push_back({p, collect_time, release_time});
            placed = true;
        }
        if (!placed) {
            throw ConfigError(
                "could not sample a reachable target within the difficulty's "
                "joint limits");
        }
    }
    return task;
}

std::vector<MotionFrame> reference_trajectory(const TaskSpec& task,
                                              double frame_rate_hz) {
    const std::vector<Segment> sched = build_schedule(task, frame_rate_hz);
    const std::int64_t last = sched.back().collect_f;
    std::vector<MotionFrame> frames;
    frames.reserve(static_cast<std::size_t>(last + 1));
    for (std::int64_t i = 0; i <= last; ++i) {
        const double t = static_cast<double>(i) / frame_rate_hz;
        frames.push_back(
            make_frame(t, task.geometry, plan_angles_deg(sched, frame_rate_hz, t)));
    }
    return frames;
}

SessionTrace simulate_player(const PlayerProfile& profile,
                             const std::vector<MotionFrame>& reference,
                             const TaskSpec& task, double frame_rate_hz) {
    validate_profile(profile);
    if (reference.empty()) {
        throw ConfigError("reference trajectory is empty");
    }
    const std::vector<Segment> sched = build_schedule(task, frame_rate_hz);

    SessionTrace trace;
    trace.reference = reference;

    const std::int64_t ref_last = static_cast<std::int64_t>(reference.size()) - 1;
    const std::int64_t player_last =
        std::llround(profile.slowdown * static_cast<double>(ref_last));
    Rng rng(profile.seed);
    trace.frames.reserve(static_cast<std::size_t>(player_last + 1));

    for (std::int64_t i = 0; i <= player_last; ++i) {
        const double t = static_cast<double>(i) / frame_rate_hz;
        std::array<double, 3> angles =
            plan_angles_deg(sched, frame_rate_hz, t / profile.slowdown);

        // Fixed draw count per frame (3 angles + 9 position axes + 1 pedal)
        // keeps streams aligned across profiles that differ only in scales.
        std::array<double, 3> angle_noise;
        for (double& z : angle_noise) z = rng.normal();
        std::array<double, 9> pos_noise;
        for (double& z : pos_noise) z = rng.normal();
        const double pedal_noise = rng.normal();

        for (int k = 0; k < 3; ++k) {
            double a = angles[k] + profile.noise_std * angle_noise[k];
            if (profile.tremor_amplitude > 0.0) {
                a += profile.tremor_amplitude *
                     std::sin(2.0 * std::numbers::pi * profile.tremor_frequency * t +
                              2.0 * std::numbers::pi * k / 3.0);
            }
            angles[k] = std::clamp(a, -profile.range_limit[k], profile.range_limit[k]);
        }

        MotionFrame f = make_frame(t, task.geometry, angles);
        for (int j = 0; j < 3; ++j) {
            Point3& p = f.joints[j].position;
            p.x += profile.position_noise_std * pos_noise[3 * j + 0];
            p.y += profile.position_noise_std * pos_noise[3 * j + 1];
            p.z += profile.position_noise_std * pos_noise[3 * j + 2];
        }
        f.head_tilt = profile.posture_drift * t;
        f.spine_tilt = profile.posture_drift * t;
        // Pedal jitter is proportional to the bias so a neutral profile
        // leaves the pedal exactly neutral.
        f.pedal = std::clamp(
            profile.pedal_bias + 0.05 * profile.pedal_bias * pedal_noise, -1.0, 1.0);
        trace.frames.push_back(f);
    }

    // Event detection, gated on the dilated plan: the first frame at or
    // after the planned instant with the hand inside the grasp radius.
    const Point3 basket_cm =
        100.0 * forward_kinematics(task.geometry, JointAngles{});
    auto hand_near = [&](const MotionFrame& f, const Point3& goal_cm) {
        return norm(f.joint(Joint::Wrist).position - goal_cm) <= task.grasp_radius;
    };
    for (std::size_t j = 0; j < sched.size(); ++j) {
        const Segment& seg = sched[j];
        TaskEvent ev;
        ev.object_id = static_cast<int>(j);
        ev.t_spawned =
            profile.slowdown * (static_cast<double>(seg.spawn_f) / frame_rate_hz);
        ev.target_collect_time = task.targets[j].collect_time;
        ev.target_release_time = task.targets[j].release_time;

        const Point3 target_cm = 100.0 * task.targets[j].position;
        const double want_reach =
            profile.slowdown * (static_cast<double>(seg.reach_f) / frame_rate_hz);
        for (const MotionFrame& f : trace.frames) {
            if (f.t < want_reach) continue;
            if (hand_near(f, target_cm)) {
                ev.t_reached = f.t;
                break;
            }
        }
        if (ev.t_reached.has_value()) {
            const double want_collect =
                profile.slowdown *
                (static_cast<double>(seg.collect_f) / frame_rate_hz);
            const double gate = std::max(want_collect, *ev.t_reached);
            for (const MotionFrame& f : trace.frames) {
                if (f.t < gate) continue;
                if (hand_near(f, basket_cm)) {
                    ev.t_collected = f.t;
                    break;
                }
            }
        }
        trace.events.push_back(ev);
    }
    return trace;
}

namespace {

template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (Error& e) {
        e.add_context(stage);
        throw;
    }
}

}  // namespace

SessionResult run_session(const SessionConfig& config, const RuleBase& rb) {
    if (config.tasks < 1) throw ConfigError("session needs at least one task");
    validate_profile(config.player_profile);
    validate_difficulty(config.difficulty);
    validate_geometry(config.arm);

    std::set<std::string> active = config.active_inputs;
    if (active.empty()) {
        active.insert(fuzzy_input_names().begin(), fuzzy_input_names().end());
    }

    SessionResult result;
    DifficultyState d = config.difficulty;
    for (int k = 0; k < config.tasks; ++k) {
        try {
            const std::uint64_t spawn_seed =
                mix_seed(config.seed, config.player_profile.seed,
                         2 * static_cast<std::uint64_t>(k));
            const std::uint64_t player_seed =
                mix_seed(config.seed, config.player_profile.seed,
                         2 * static_cast<std::uint64_t>(k) + 1);

            const TaskSpec task = with_stage("spawning targets", [&] {
                return spawn_targets(d, config.arm, spawn_seed,
                                     config.target_collect_time,
                                     config.target_release_time, config.grasp_radius);
            });
            const std::vector<MotionFrame> ref = with_stage("reference trajectory", [&] {
                return reference_trajectory(task, config.frame_rate_hz);
            });
            PlayerProfile prof = config.player_profile;
            prof.seed = player_seed;
            SessionTrace trace = with_stage("simulating player", [&] {
                return simulate_player(prof, ref, task, config.frame_rate_hz);
            });
            DecisionRecord rec = with_stage("controller", [&] {
                return run_controller(trace, d, rb, active, config.adapt_rates);
            });
            d = rec.after;
            result.traces.push_back(std::move(trace));
            result.decisions.push_back(std::move(rec));
            if (result.decisions.back().action == AdaptAction::Harmfulness) break;
        } catch (Error& e) {
            e.add_context("task " + std::to_string(k + 1));
            throw;
        }
    }
    return result;
}

SessionResult run_session(const SessionConfig& config) {
    const RuleBase rb = config.rulebase_path.empty()
                            ? default_rulebase()
                            : load_rulebase_file(config.rulebase_path);
    return run_session(config, rb);
}

}  // namespace rehab
