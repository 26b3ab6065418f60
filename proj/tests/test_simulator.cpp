#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rehab/runner.hpp"
#include "rehab/simulator.hpp"
#include "rehab/trace_io.hpp"

using namespace rehab;

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

DifficultyState basic_difficulty(int iterations = 5) {
    DifficultyState d;
    d.spawn_radius_min = 20.0;
    d.spawn_radius_max = 40.0;
    d.iterations = iterations;
    return d;
}

bool frames_identical(const MotionFrame& a, const MotionFrame& b) {
    if (a.t != b.t || a.head_tilt != b.head_tilt || a.spine_tilt != b.spine_tilt ||
        a.pedal != b.pedal) {
        return false;
    }
    for (int j = 0; j < 3; ++j) {
        const JointPose& pa = a.joints[j];
        const JointPose& pb = b.joints[j];
        if (pa.orientation.x != pb.orientation.x ||
            pa.orientation.y != pb.orientation.y ||
            pa.orientation.z != pb.orientation.z ||
            pa.position.x != pb.position.x || pa.position.y != pb.position.y ||
            pa.position.z != pb.position.z) {
            return false;
        }
    }
    return true;
}

template <typename E>
std::string message_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const E& e) {
        return e.what();
    }
    return {};
}

// Unique scratch directory, removed on scope exit.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("rehab_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("targets spawn inside the handed shell") {
    const ArmGeometry geom;
    const DifficultyState d = basic_difficulty();
    const TaskSpec task = spawn_targets(d, geom, 11);
    REQUIRE(task.targets.size() == 5);
    for (const TargetSpec& target : task.targets) {
        const Point3 rel = target.position - Point3{0.0, 0.0, geom.l1};
        const double r = norm(rel);
        CHECK(r >= 0.2);
        CHECK(r <= 0.4);
        CHECK(target.position.y <= 0.0);  // right-handed session
        CHECK(reachable(geom, target.position));
        CHECK_NOTHROW(solve_ik(geom, target.position));
    }

    SUBCASE("left-handed sessions mirror the shell") {
        DifficultyState left = d;
        left.handedness = Handedness::Left;
        const TaskSpec mirrored = spawn_targets(left, geom, 11);
        for (const TargetSpec& target : mirrored.targets) {
            CHECK(target.position.y >= 0.0);
        }
    }
    SUBCASE("the same seed reproduces targets exactly") {
        const TaskSpec again = spawn_targets(d, geom, 11);
        REQUIRE(again.targets.size() == task.targets.size());
        for (size_t i = 0; i < task.targets.size(); ++i) {
            CHECK(again.targets[i].position.x == task.targets[i].position.x);
            CHECK(again.targets[i].position.y == task.targets[i].position.y);
            CHECK(again.targets[i].position.z == task.targets[i].position.z);
        }
        const TaskSpec other = spawn_targets(d, geom, 12);
        bool any_differs = false;
        for (size_t i = 0; i < task.targets.size(); ++i) {
            if (other.targets[i].position.x != task.targets[i].position.x) {
                any_differs = true;
            }
        }
        CHECK(any_differs);
    }
    SUBCASE("joint limits filter the samples") {
        DifficultyState limited = d;
        limited.joint_limits[0] = {-10.0, 10.0};  // shoulder yaw, degrees
        const TaskSpec filtered = spawn_targets(limited, geom, 11);
        for (const TargetSpec& target : filtered.targets) {
            const JointAngles q = solve_ik(geom, target.position);
            CHECK(std::abs(q.theta1 * kDeg) <= 10.0 + 1e-9);
        }
    }
    SUBCASE("a shell outside the workspace is rejected") {
        DifficultyState far = d;
        far.spawn_radius_min = 60.0;
        far.spawn_radius_max = 70.0;
        CHECK_THROWS_AS(spawn_targets(far, geom, 11), ConfigError);
    }
    SUBCASE("unsatisfiable joint limits exhaust the sampler") {
        DifficultyState impossible = d;
        // Right-handed spawns keep y <= 0, so yaw never lands near +90 deg.
        impossible.joint_limits[0] = {89.0, 89.5};
        CHECK_THROWS_AS(spawn_targets(impossible, geom, 11), ConfigError);
    }
    SUBCASE("difficulty validation happens first") {
        DifficultyState bad = d;
        bad.spawn_radius_min = 50.0;  // min above max
        CHECK_THROWS_AS(spawn_targets(bad, geom, 11), ConfigError);
        ArmGeometry flat;
        flat.l2 = 0.0;
        CHECK_THROWS_AS(spawn_targets(d, flat, 11), ConfigError);
    }
}

TEST_CASE("the reference trajectory ramps out and back per target") {
    const ArmGeometry geom;
    TaskSpec task = spawn_targets(basic_difficulty(1), geom, 21);
    REQUIRE(task.targets.size() == 1);
    const std::vector<MotionFrame> ref = reference_trajectory(task, 30.0);

    // collect 4 s at 30 Hz: frames 0..120 inclusive.
    REQUIRE(ref.size() == 121);
    for (size_t i = 1; i < ref.size(); ++i) CHECK(ref[i].t > ref[i - 1].t);
    CHECK(ref.front().t == 0.0);
    CHECK(ref.back().t == 4.0);

    const Point3 rest_hand = 100.0 * forward_kinematics(geom, JointAngles{});
    CHECK(norm(ref.front().joint(Joint::Wrist).position - rest_hand) < 1e-9);
    CHECK(norm(ref.back().joint(Joint::Wrist).position - rest_hand) < 1e-9);

    // The hand meets the target at the reach frame (collect - release = 2 s).
    const Point3 target_cm = 100.0 * task.targets[0].position;
    CHECK(norm(ref[60].joint(Joint::Wrist).position - target_cm) < 1e-6);

    // Joint-space ramps are linear: halfway in time is halfway in angle.
    const double full = ref[60].joint(Joint::Wrist).orientation.y;
    CHECK(ref[30].joint(Joint::Wrist).orientation.y ==
          doctest::Approx(0.5 * full).epsilon(1e-9));

    for (const MotionFrame& f : ref) {
        CHECK(f.head_tilt == 0.0);
        CHECK(f.spine_tilt == 0.0);
        CHECK(f.pedal == 0.0);
    }

    SUBCASE("segments chain with a one-frame gap") {
        TaskSpec two = spawn_targets(basic_difficulty(2), geom, 21);
        const std::vector<MotionFrame> r2 = reference_trajectory(two, 30.0);
        CHECK(r2.size() == 242);  // 121 frames per target, second starts at 121
        const Point3 second_cm = 100.0 * two.targets[1].position;
        CHECK(norm(r2[121 + 60].joint(Joint::Wrist).position - second_cm) < 1e-6);
    }
    SUBCASE("too coarse a frame rate cannot sample the phases") {
        const std::string msg = message_of<ConfigError>(
            [&] { reference_trajectory(task, 0.2); });
        CHECK(msg.find("frame rate too low") != std::string::npos);
    }
    SUBCASE("target times must be ordered") {
        TaskSpec bad = task;
        bad.targets[0].collect_time = 1.0;
        bad.targets[0].release_time = 2.0;
        CHECK_THROWS_AS(reference_trajectory(bad, 30.0), ConfigError);
        bad.targets[0].release_time = 0.0;
        CHECK_THROWS_AS(reference_trajectory(bad, 30.0), ConfigError);
    }
}

TEST_CASE("an unimpaired player reproduces the reference bit for bit") {
    const ArmGeometry geom;
    const TaskSpec task = spawn_targets(basic_difficulty(2), geom, 5);
    const std::vector<MotionFrame> ref = reference_trajectory(task, 30.0);
    PlayerProfile identity;
    identity.seed = 99;
    const SessionTrace trace = simulate_player(identity, ref, task, 30.0);

    REQUIRE(trace.frames.size() == ref.size());
    for (size_t i = 0; i < ref.size(); ++i) {
        CAPTURE(i);
        CHECK(frames_identical(trace.frames[i], ref[i]));
    }

    REQUIRE(trace.events.size() == 2);
    const TaskEvent& first = trace.events[0];
    CHECK(first.object_id == 0);
    CHECK(first.t_spawned == 0.0);
    REQUIRE(first.completed());
    CHECK(*first.t_reached == 2.0);
    CHECK(*first.t_collected == 4.0);
    const TaskEvent& second = trace.events[1];
    REQUIRE(second.completed());
    CHECK(*second.t_reached - second.t_spawned == doctest::Approx(2.0).epsilon(1e-12));

    SUBCASE("derived inputs all sit at zero") {
        const std::set<std::string> all(fuzzy_input_names().begin(),
                                        fuzzy_input_names().end());
        for (const auto& [name, value] : build_fuzzy_inputs(trace, all)) {
            INFO(name);
            CHECK(std::abs(value) <= 1e-12);
        }
    }
}

TEST_CASE("slowdown dilates the whole performance") {
    const ArmGeometry geom;
    const TaskSpec task = spawn_targets(basic_difficulty(1), geom, 5);
    const std::vector<MotionFrame> ref = reference_trajectory(task, 30.0);
    PlayerProfile slow;
    slow.slowdown = 2.0;
    const SessionTrace trace = simulate_player(slow, ref, task, 30.0);

    CHECK(trace.frames.size() == 241);  // twice the reference span
    REQUIRE(trace.events.size() == 1);
    REQUIRE(trace.events[0].completed());
    CHECK(*trace.events[0].t_reached == 4.0);
    CHECK(*trace.events[0].t_collected == 8.0);

    const auto [collect_err, release_err] = time_errors(trace.events);
    CHECK(collect_err == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(release_err == doctest::Approx(2.0).epsilon(1e-9));

    SUBCASE("a slowdown below one is rejected") {
        PlayerProfile bad;
        bad.slowdown = 0.5;
        CHECK_THROWS_AS(simulate_player(bad, ref, task, 30.0), ConfigError);
    }
    SUBCASE("negative noise is rejected") {
        PlayerProfile bad;
        bad.noise_std = -1.0;
        CHECK_THROWS_AS(simulate_player(bad, ref, task, 30.0), ConfigError);
    }
    SUBCASE("an empty reference is rejected") {
        CHECK_THROWS_AS(simulate_player(slow, {}, task, 30.0), ConfigError);
    }
}

TEST_CASE("player simulation is deterministic in the profile seed") {
    const ArmGeometry geom;
    const TaskSpec task = spawn_targets(basic_difficulty(1), geom, 7);
    const std::vector<MotionFrame> ref = reference_trajectory(task, 30.0);
    PlayerProfile noisy;
    noisy.noise_std = 1.5;
    noisy.position_noise_std = 0.5;
    noisy.seed = 31;

    const SessionTrace a = simulate_player(noisy, ref, task, 30.0);
    const SessionTrace b = simulate_player(noisy, ref, task, 30.0);
    REQUIRE(a.frames.size() == b.frames.size());
    for (size_t i = 0; i < a.frames.size(); ++i) {
        CHECK(frames_identical(a.frames[i], b.frames[i]));
    }

    PlayerProfile reseeded = noisy;
    reseeded.seed = 32;
    const SessionTrace c = simulate_player(reseeded, ref, task, 30.0);
    bool any_differs = false;
    for (size_t i = 0; i < a.frames.size(); ++i) {
        if (!frames_identical(a.frames[i], c.frames[i])) any_differs = true;
    }
    CHECK(any_differs);
}

TEST_CASE("more jitter means a larger orientation error") {
    const ArmGeometry geom;
    const TaskSpec task = spawn_targets(basic_difficulty(1), geom, 13);
    const std::vector<MotionFrame> ref = reference_trajectory(task, 30.0);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        PlayerProfile mild;
        mild.noise_std = 0.5;
        mild.seed = seed;
        PlayerProfile rough = mild;
        rough.noise_std = 2.0;
        const double e_mild =
            orientation_error(simulate_player(mild, ref, task, 30.0), Joint::Wrist);
        const double e_rough =
            orientation_error(simulate_player(rough, ref, task, 30.0), Joint::Wrist);
        CHECK(e_rough > e_mild);
    }
}

TEST_CASE("tremor, drift and pedal bias shape the trace") {
    const ArmGeometry geom;
    const TaskSpec task = spawn_targets(basic_difficulty(1), geom, 13);
    const std::vector<MotionFrame> ref = reference_trajectory(task, 30.0);

    PlayerProfile shaky;
    shaky.tremor_amplitude = 5.0;
    shaky.tremor_frequency = 4.0;
    shaky.posture_drift = 2.0;
    shaky.pedal_bias = 0.4;
    const SessionTrace trace = simulate_player(shaky, ref, task, 30.0);

    CHECK(orientation_error(trace, Joint::Wrist) > 1.0);
    const auto [head, spine] = tilt_errors(trace);
    CHECK(head == doctest::Approx(2.0 * 2.0));  // drift * mean t over 4 s
    CHECK(spine == head);
    const auto [pedal_avg, dominance] = pedal_dominance(trace);
    CHECK(pedal_avg == doctest::Approx(0.4).epsilon(0.1));
    CHECK(dominance == Dominance::Right);
}

TEST_CASE("a full session progresses while the player keeps up") {
    SessionConfig config;
    config.difficulty = basic_difficulty(2);
    config.tasks = 3;
    config.seed = 42;
    const SessionResult result = run_session(config);

    REQUIRE(result.traces.size() == 3);
    REQUIRE(result.decisions.size() == 3);
    for (int k = 0; k < 3; ++k) {
        const DecisionRecord& rec = result.decisions[k];
        CHECK(rec.action == AdaptAction::Progression);
        CHECK(rec.crisp == doctest::Approx(10.0));
        CHECK(rec.after.level == k + 1);
        CHECK_FALSE(rec.after.halted);
    }
    // Each progression adds two targets per task.
    CHECK(result.traces[0].events.size() == 2);
    CHECK(result.traces[1].events.size() == 4);
    CHECK(result.traces[2].events.size() == 6);
    CHECK(result.decisions[2].after.spawn_radius_max ==
          doctest::Approx(40.0 * 1.1 * 1.1 * 1.1));
}

TEST_CASE("an overwhelmed player halts the session") {
    SessionConfig config;
    config.tasks = 2;
    config.seed = 3;
    config.player_profile.range_limit = {0.0, 0.0, 0.0};
    config.difficulty = basic_difficulty(3);
    config.difficulty.spawn_radius_min = 5.5;
    config.difficulty.spawn_radius_max = 8.0;
    // The frozen player never completes an event, so the timing inputs have
    // no value; grade on the kinematic and posture channels only.
    config.active_inputs = {"O.E_W", "O.E_E", "O.E_S",  "P.E_W",  "P.E_E",
                            "P.E_S", "AV.E_W", "AV.E_E", "AV.E_S", "T.E_H",
                            "T.E_S"};
    const SessionResult result = run_session(config);

    REQUIRE(result.decisions.size() == 1);  // halted after the first task
    CHECK(result.decisions[0].action == AdaptAction::Harmfulness);
    CHECK(result.decisions[0].after.halted);
    for (const TaskEvent& ev : result.traces[0].events) {
        CHECK_FALSE(ev.completed());
    }
}

TEST_CASE("session errors carry the task and stage") {
    SessionConfig config;
    config.tasks = 1;
    config.difficulty.spawn_radius_min = 60.0;
    config.difficulty.spawn_radius_max = 70.0;
    const std::string msg =
        message_of<ConfigError>([&] { run_session(config); });
    CHECK(msg.find("task 1") != std::string::npos);
    CHECK(msg.find("spawning targets") != std::string::npos);

    SessionConfig none;
    none.tasks = 0;
    CHECK_THROWS_AS(run_session(none), ConfigError);
}

TEST_CASE("session configs parse with strict keys") {
    SUBCASE("an empty object keeps every default") {
        const SessionConfig cfg = parse_config_json("{}");
        CHECK(cfg.tasks == 3);
        CHECK(cfg.frame_rate_hz == 30.0);
        CHECK(cfg.player_profile.slowdown == 1.0);
        CHECK(cfg.difficulty.iterations == 5);
        CHECK(cfg.arm.l2 == 0.30);
        CHECK(cfg.active_inputs.empty());
        CHECK(cfg.grasp_radius == 5.0);
    }
    SUBCASE("fields land in the right places") {
        const SessionConfig cfg = parse_config_json(R"({
            "player_profile": {"noise_std": 1.5, "slowdown": 2.0,
                               "range_limit": [10, 20, 30], "seed": 7},
            "difficulty": {"level": 2, "iterations": 4, "handedness": "Left",
                           "joint_limits": [[-90, 90], [-45, 45], [0, 150]]},
            "tasks": 5,
            "frame_rate_hz": 60.0,
            "active_inputs": ["O.E_W", "T.E_C"],
            "seed": 1234,
            "arm": {"l1": 0.9, "l2": 0.35, "l3": 0.3},
            "adapt_rates": {"progress_iterations": 3},
            "target_collect_time": 5.0,
            "target_release_time": 2.5,
            "grasp_radius": 4.0
        })");
        CHECK(cfg.player_profile.noise_std == 1.5);
        CHECK(cfg.player_profile.slowdown == 2.0);
        CHECK(cfg.player_profile.range_limit[2] == 30.0);
        CHECK(cfg.player_profile.seed == 7);
        CHECK(cfg.difficulty.level == 2);
        CHECK(cfg.difficulty.handedness == Handedness::Left);
        CHECK(cfg.difficulty.joint_limits[1].min_deg == -45.0);
        CHECK(cfg.difficulty.joint_limits[2].max_deg == 150.0);
        CHECK(cfg.tasks == 5);
        CHECK(cfg.frame_rate_hz == 60.0);
        CHECK(cfg.active_inputs == std::set<std::string>{"O.E_W", "T.E_C"});
        CHECK(cfg.seed == 1234);
        CHECK(cfg.arm.l1 == 0.9);
        CHECK(cfg.adapt_rates.progress_iterations == 3);
        CHECK(cfg.adapt_rates.progress_radius_factor == 1.1);
        CHECK(cfg.target_collect_time == 5.0);
        CHECK(cfg.target_release_time == 2.5);
        CHECK(cfg.grasp_radius == 4.0);
    }
    SUBCASE("typos are rejected, not ignored") {
        const std::string msg = message_of<ConfigError>(
            [] { parse_config_json(R"({"palyer_profile": {}})"); });
        CHECK(msg.find("unknown key 'palyer_profile'") != std::string::npos);
        CHECK_THROWS_AS(parse_config_json(R"({"player_profile": {"slowness": 2}})"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config_json(R"({"arm": {"l4": 1}})"), ConfigError);
    }
    SUBCASE("bad values are config errors") {
        CHECK_THROWS_AS(parse_config_json("not json"), ConfigError);
        CHECK_THROWS_AS(parse_config_json(R"({"tasks": "three"})"), ConfigError);
        CHECK_THROWS_AS(
            parse_config_json(R"({"difficulty": {"handedness": "Ambidextrous"}})"),
            ConfigError);
        CHECK_THROWS_AS(
            parse_config_json(R"({"player_profile": {"range_limit": [1, 2]}})"),
            ConfigError);
        CHECK_THROWS_AS(
            parse_config_json(R"({"difficulty": {"joint_limits": [[0, 1]]}})"),
            ConfigError);
        CHECK_THROWS_AS(parse_config_json(R"({"active_inputs": "O.E_W"})"),
                        ConfigError);
    }
}

TEST_CASE("frame CSVs round-trip exactly") {
    std::vector<MotionFrame> frames;
    std::mt19937_64 gen(2718);
    std::uniform_real_distribution<double> dist(-250.0, 250.0);
    double t = 0.0;
    for (int i = 0; i < 50; ++i) {
        t += 0.01 + std::abs(dist(gen)) * 1e-4;
        MotionFrame f;
        f.t = t;
        for (auto& jp : f.joints) {
            jp.orientation = {dist(gen), dist(gen), dist(gen)};
            jp.position = {dist(gen) / 3.0, dist(gen) / 7.0, dist(gen)};
        }
        f.head_tilt = std::abs(dist(gen)) * 0.1;
        f.spine_tilt = std::abs(dist(gen)) * 0.1;
        f.pedal = dist(gen) / 250.0;
        frames.push_back(f);
    }

    std::ostringstream out;
    write_frames_csv(out, frames);
    std::istringstream in(out.str());
    const std::vector<MotionFrame> back = read_frames_csv(in);
    REQUIRE(back.size() == frames.size());
    for (size_t i = 0; i < frames.size(); ++i) {
        CAPTURE(i);
        CHECK(frames_identical(back[i], frames[i]));
    }

    // Serialization is canonical: rewriting the parsed frames gives the
    // same bytes.
    std::ostringstream again;
    write_frames_csv(again, back);
    CHECK(again.str() == out.str());
}

TEST_CASE("frame CSV parsing reports the offending line") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return read_frames_csv(in);
    };
    const std::string header =
        "t,wrist_ox,wrist_oy,wrist_oz,wrist_px,wrist_py,wrist_pz,"
        "elbow_ox,elbow_oy,elbow_oz,elbow_px,elbow_py,elbow_pz,"
        "shoulder_ox,shoulder_oy,shoulder_oz,shoulder_px,shoulder_py,shoulder_pz,"
        "head_tilt,spine_tilt,pedal\n";
    const std::string row = "0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0\n";
    const std::string row2 = "1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0\n";

    CHECK_NOTHROW(parse(header + row + row2));
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("bogus\n" + row), ParseError);
    CHECK_THROWS_AS(parse(header), ParseError);  // no rows

    try {
        parse(header + row + "1,2,3\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("22 columns") != std::string::npos);
    }
    try {
        parse(header + "0,0,zero,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 3);
    }
    // Windows line endings parse fine.
    std::string crlf = header + row + row2;
    std::string with_cr;
    for (char c : crlf) {
        if (c == '\n') with_cr += '\r';
        with_cr += c;
    }
    CHECK(parse(with_cr).size() == 2);
    // Time must move forward.
    CHECK_THROWS_AS(parse(header + row + row), ParseError);
}

TEST_CASE("event logs round-trip through JSONL") {
    std::vector<TaskEvent> events;
    TaskEvent done;
    done.object_id = 0;
    done.t_spawned = 0.0;
    done.t_reached = 2.25;
    done.t_collected = 4.125;
    done.target_collect_time = 4.0;
    done.target_release_time = 2.0;
    events.push_back(done);
    TaskEvent open;
    open.object_id = 1;
    open.t_spawned = 4.5;
    open.target_collect_time = 4.0;
    open.target_release_time = 2.0;
    events.push_back(open);

    std::ostringstream out;
    write_events_jsonl(out, 2, 10.0, events);
    std::istringstream in(out.str());
    const std::vector<TaskEvent> back = read_events_jsonl(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].object_id == 0);
    CHECK(back[0].t_spawned == 10.0);  // offset applied on write
    REQUIRE(back[0].t_reached.has_value());
    CHECK(*back[0].t_reached == 12.25);
    CHECK(*back[0].t_collected == 14.125);
    CHECK(back[0].target_collect_time == 4.0);
    CHECK(back[1].object_id == 1);
    CHECK_FALSE(back[1].t_reached.has_value());
    CHECK_FALSE(back[1].t_collected.has_value());

    SUBCASE("bad records report their line") {
        std::istringstream bad("{\"object_id\": 0}\n");
        CHECK_THROWS_AS(read_events_jsonl(bad), ParseError);
        std::istringstream garbled(out.str() + "not json\n");
        try {
            read_events_jsonl(garbled);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
}

TEST_CASE("a session run writes the full file set") {
    SessionConfig config;
    config.difficulty = basic_difficulty(1);
    config.tasks = 2;
    config.seed = 5;

    TempDir dir("run");
    const RunSummary summary = run_to_dir(config, dir.path.string());
    CHECK(summary.tasks.size() == 2);
    CHECK(summary.tasks_requested == 2);
    CHECK(summary.final_level == 2);
    CHECK_FALSE(summary.halted);
    for (const TaskSummary& ts : summary.tasks) {
        CHECK(ts.action == AdaptAction::Progression);
        CHECK(ts.dominance == Dominance::Neutral);
    }

    for (const char* name :
         {"frames.csv", "reference.csv", "events.jsonl", "decisions.jsonl"}) {
        CAPTURE(name);
        CHECK(std::filesystem::exists(dir.path / name));
    }

    // Frames from both tasks share one strictly increasing timeline.
    const std::vector<MotionFrame> frames =
        load_frames_csv((dir.path / "frames.csv").string());
    for (size_t i = 1; i < frames.size(); ++i) {
        CHECK(frames[i].t > frames[i - 1].t);
    }
    // Task 1 earns a Progression, so task 2 runs with 1 + 2 = 3 iterations.
    const std::vector<TaskEvent> events =
        load_events_jsonl((dir.path / "events.jsonl").string());
    REQUIRE(events.size() == 4);
    for (size_t i = 1; i < events.size(); ++i) {
        CHECK(events[i].t_spawned > events[i - 1].t_spawned);
    }

    std::ifstream decisions(dir.path / "decisions.jsonl");
    int lines = 0;
    std::string line;
    while (std::getline(decisions, line)) ++lines;
    CHECK(lines == 2);

    SUBCASE("repeat runs are byte-identical") {
        TempDir other("run_again");
        run_to_dir(config, other.path.string());
        for (const char* name :
             {"frames.csv", "reference.csv", "events.jsonl", "decisions.jsonl"}) {
            CAPTURE(name);
            CHECK(slurp(dir.path / name) == slurp(other.path / name));
        }
    }
}

TEST_CASE("seed sweeps match standalone runs") {
    SessionConfig config;
    config.difficulty = basic_difficulty(1);
    config.tasks = 1;

    TempDir dir("sweep");
    const std::vector<std::uint64_t> seeds{4, 9, 16};
    const std::vector<RunSummary> swept =
        sweep_seeds(config, seeds, 2, dir.path.string());
    REQUIRE(swept.size() == 3);

    for (size_t i = 0; i < seeds.size(); ++i) {
        const std::filesystem::path seed_dir =
            dir.path / ("seed_" + std::to_string(seeds[i]));
        REQUIRE(std::filesystem::exists(seed_dir / "frames.csv"));

        TempDir solo("solo");
        SessionConfig cfg = config;
        cfg.seed = seeds[i];
        const RunSummary direct = run_to_dir(cfg, solo.path.string());
        CHECK(direct.final_level == swept[i].final_level);
        REQUIRE(direct.tasks.size() == swept[i].tasks.size());
        for (size_t k = 0; k < direct.tasks.size(); ++k) {
            CHECK(direct.tasks[k].action == swept[i].tasks[k].action);
            CHECK(direct.tasks[k].crisp == swept[i].tasks[k].crisp);
        }
        CHECK(slurp(seed_dir / "frames.csv") == slurp(solo.path / "frames.csv"));
        CHECK(slurp(seed_dir / "decisions.jsonl") ==
              slurp(solo.path / "decisions.jsonl"));
    }
}
