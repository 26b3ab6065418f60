#include "rehab/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "rehab/numfmt.hpp"

namespace rehab {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* kFrameHeader =
    "t,"
    "wrist_ox,wrist_oy,wrist_oz,wrist_px,wrist_py,wrist_pz,"
    "elbow_ox,elbow_oy,elbow_oz,elbow_px,elbow_py,elbow_pz,"
    "shoulder_ox,shoulder_oy,shoulder_oz,shoulder_px,shoulder_py,shoulder_pz,"
    "head_tilt,spine_tilt,pedal";

double parse_field(const std::string& field, int line, int column) {
    double v = 0.0;
    const char* first = field.c_str();
    const char* last = first + field.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ParseError(line, column, "malformed number '" + field + "'");
    }
    return v;
}

}  // namespace

void write_frames_csv(std::ostream& out, const std::vector<MotionFrame>& frames) {
    out << kFrameHeader << '\n';
    std::string row;
    for (const MotionFrame& f : frames) {
        row.clear();
        row += format_double(f.t);
        for (const JointPose& jp : f.joints) {
            for (double v : {jp.orientation.x, jp.orientation.y, jp.orientation.z,
                             jp.position.x, jp.position.y, jp.position.z}) {
                row += ',';
                row += format_double(v);
            }
        }
        row += ',';
        row += format_double(f.head_tilt);
        row += ',';
        row += format_double(f.spine_tilt);
        row += ',';
        row += format_double(f.pedal);
        row += '\n';
        out << row;
    }
}

std::vector<MotionFrame> read_frames_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(1, 1, "empty frames CSV");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kFrameHeader) {
        throw ParseError(1, 1, "unexpected frames CSV header");
    }

    std::vector<MotionFrame> frames;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 22) {
            throw ParseError(line_no, 1,
                             "expected 22 columns, got " + std::to_string(fields.size()));
        }
        MotionFrame f;
        int col = 0;
        auto next = [&] {
            const int here = col++;
            return parse_field(fields[here], line_no, here + 1);
        };
        f.t = next();
        for (JointPose& jp : f.joints) {
            jp.orientation.x = next();
            jp.orientation.y = next();
            jp.orientation.z = next();
            jp.position.x = next();
            jp.position.y = next();
            jp.position.z = next();
        }
        f.head_tilt = next();
        f.spine_tilt = next();
        f.pedal = next();
        if (!frames.empty() && f.t <= frames.back().t) {
            throw ParseError(line_no, 1, "frame timestamps must be strictly increasing");
        }
        frames.push_back(f);
    }
    if (frames.empty()) {
        throw ParseError(line_no, 1, "frames CSV has a header but no rows");
    }
    return frames;
}

std::vector<MotionFrame> load_frames_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open trace file '" + path + "'");
    try {
        return read_frames_csv(in);
    } catch (Error& e) {
        e.add_context(path);
        throw;
    }
}

void write_events_jsonl(std::ostream& out, int task, double time_offset,
                        const std::vector<TaskEvent>& events) {
    for (const TaskEvent& ev : events) {
        ordered_json j;
        j["task"] = task;
        j["object_id"] = ev.object_id;
        j["t_spawned"] = ev.t_spawned + time_offset;
        if (ev.t_reached.has_value()) {
            j["t_reached"] = *ev.t_reached + time_offset;
        } else {
            j["t_reached"] = nullptr;
        }
        if (ev.t_collected.has_value()) {
            j["t_collected"] = *ev.t_collected + time_offset;
        } else {
            j["t_collected"] = nullptr;
        }
        j["target_collect_time"] = ev.target_collect_time;
        j["target_release_time"] = ev.target_release_time;
        out << j.dump() << '\n';
    }
}

namespace {

ordered_json difficulty_json(const DifficultyState& d) {
    ordered_json j;
    j["level"] = d.level;
    j["spawn_radius_min"] = d.spawn_radius_min;
    j["spawn_radius_max"] = d.spawn_radius_max;
    j["iterations"] = d.iterations;
    j["basket_size"] = d.basket_size;
    j["fruit_size"] = d.fruit_size;
    j["fruit_speed"] = d.fruit_speed;
    j["handedness"] = (d.handedness == Handedness::Left) ? "Left" : "Right";
    j["halted"] = d.halted;
    return j;
}

}  // namespace

void write_decision_jsonl(std::ostream& out, int task, double time_offset,
                          const DecisionRecord& rec) {
    ordered_json j;
    j["task"] = task;
    j["timestamp"] = rec.timestamp + time_offset;
    j["crisp"] = rec.crisp;
    j["action"] = action_name(rec.action);
    ordered_json inputs;
    for (const auto& [name, value] : rec.inputs) inputs[name] = value;
    j["inputs"] = inputs;
    j["difficulty_before"] = difficulty_json(rec.before);
    j["difficulty_after"] = difficulty_json(rec.after);
    out << j.dump() << '\n';
}

std::vector<TaskEvent> read_events_jsonl(std::istream& in) {
    std::vector<TaskEvent> events;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            TaskEvent ev;
            ev.object_id = j.at("object_id").get<int>();
            ev.t_spawned = j.at("t_spawned").get<double>();
            if (j.contains("t_reached") && !j.at("t_reached").is_null()) {
                ev.t_reached = j.at("t_reached").get<double>();
            }
            if (j.contains("t_collected") && !j.at("t_collected").is_null()) {
                ev.t_collected = j.at("t_collected").get<double>();
            }
            ev.target_collect_time = j.at("target_collect_time").get<double>();
            ev.target_release_time = j.at("target_release_time").get<double>();
            events.push_back(ev);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, 1, std::string("bad event record: ") + e.what());
        }
    }
    return events;
}

std::vector<TaskEvent> load_events_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open events file '" + path + "'");
    try {
        return read_events_jsonl(in);
    } catch (Error& e) {
        e.add_context(path);
        throw;
    }
}

namespace {

using njson = nlohmann::json;

void check_keys(const njson& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

PlayerProfile parse_profile(const njson& j) {
    check_keys(j,
               {"noise_std", "position_noise_std", "slowdown", "range_limit",
                "tremor_amplitude", "tremor_frequency", "posture_drift",
                "pedal_bias", "seed"},
               "player_profile");
    PlayerProfile p;
    p.noise_std = j.value("noise_std", p.noise_std);
    p.position_noise_std = j.value("position_noise_std", p.position_noise_std);
    p.slowdown = j.value("slowdown", p.slowdown);
    if (j.contains("range_limit")) {
        const auto& arr = j.at("range_limit");
        if (!arr.is_array() || arr.size() != 3) {
            throw ConfigError("player_profile.range_limit must be an array of 3 numbers");
        }
        for (int k = 0; k < 3; ++k) p.range_limit[k] = arr.at(k).get<double>();
    }
    p.tremor_amplitude = j.value("tremor_amplitude", p.tremor_amplitude);
    p.tremor_frequency = j.value("tremor_frequency", p.tremor_frequency);
    p.posture_drift = j.value("posture_drift", p.posture_drift);
    p.pedal_bias = j.value("pedal_bias", p.pedal_bias);
    p.seed = j.value("seed", p.seed);
    return p;
}

DifficultyState parse_difficulty(const njson& j) {
    check_keys(j,
               {"level", "spawn_radius_min", "spawn_radius_max", "iterations",
                "basket_size", "fruit_size", "fruit_speed", "handedness",
                "joint_limits"},
               "difficulty");
    DifficultyState d;
    d.level = j.value("level", d.level);
    d.spawn_radius_min = j.value("spawn_radius_min", d.spawn_radius_min);
    d.spawn_radius_max = j.value("spawn_radius_max", d.spawn_radius_max);
    d.iterations = j.value("iterations", d.iterations);
    d.basket_size = j.value("basket_size", d.basket_size);
    d.fruit_size = j.value("fruit_size", d.fruit_size);
    d.fruit_speed = j.value("fruit_speed", d.fruit_speed);
    if (j.contains("handedness")) {
        const std::string h = j.at("handedness").get<std::string>();
        if (h == "Left") {
            d.handedness = Handedness::Left;
        } else if (h == "Right") {
            d.handedness = Handedness::Right;
        } else {
            throw ConfigError("difficulty.handedness must be 'Left' or 'Right'");
        }
    }
    if (j.contains("joint_limits")) {
        const auto& arr = j.at("joint_limits");
        if (!arr.is_array() || arr.size() != 3) {
            throw ConfigError("difficulty.joint_limits must be 3 [min, max] pairs");
        }
        for (int k = 0; k < 3; ++k) {
            const auto& pair = arr.at(k);
            if (!pair.is_array() || pair.size() != 2) {
                throw ConfigError("difficulty.joint_limits must be 3 [min, max] pairs");
            }
            d.joint_limits[k] = {pair.at(0).get<double>(), pair.at(1).get<double>()};
        }
    }
    return d;
}

AdaptRates parse_rates(const njson& j) {
    check_keys(j,
               {"progress_radius_factor", "progress_speed_factor",
                "progress_iterations", "simplify_radius_factor",
                "simplify_fruit_factor", "simplify_speed_factor"},
               "adapt_rates");
    AdaptRates r;
    r.progress_radius_factor = j.value("progress_radius_factor", r.progress_radius_factor);
    r.progress_speed_factor = j.value("progress_speed_factor", r.progress_speed_factor);
    r.progress_iterations = j.value("progress_iterations", r.progress_iterations);
    r.simplify_radius_factor = j.value("simplify_radius_factor", r.simplify_radius_factor);
    r.simplify_fruit_factor = j.value("simplify_fruit_factor", r.simplify_fruit_factor);
    r.simplify_speed_factor = j.value("simplify_speed_factor", r.simplify_speed_factor);
    return r;
}

}  // namespace

SessionConfig parse_config_json(const std::string& text) {
    njson j;
    try {
        j = njson::parse(text);
    } catch (const njson::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        check_keys(j,
                   {"player_profile", "difficulty", "tasks", "frame_rate_hz",
                    "rulebase_path", "active_inputs", "seed", "arm", "adapt_rates",
                    "target_collect_time", "target_release_time", "grasp_radius"},
                   "config");
        SessionConfig cfg;
        if (j.contains("player_profile")) {
            cfg.player_profile = parse_profile(j.at("player_profile"));
        }
        if (j.contains("difficulty")) {
            cfg.difficulty = parse_difficulty(j.at("difficulty"));
        }
        cfg.tasks = j.value("tasks", cfg.tasks);
        cfg.frame_rate_hz = j.value("frame_rate_hz", cfg.frame_rate_hz);
        cfg.rulebase_path = j.value("rulebase_path", cfg.rulebase_path);
        if (j.contains("active_inputs")) {
            const auto& arr = j.at("active_inputs");
            if (!arr.is_array()) {
                throw ConfigError("active_inputs must be an array of variable names");
            }
            for (const auto& name : arr) {
                cfg.active_inputs.insert(name.get<std::string>());
            }
        }
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("arm")) {
            const auto& a = j.at("arm");
            check_keys(a, {"l1", "l2", "l3"}, "arm");
            cfg.arm.l1 = a.value("l1", cfg.arm.l1);
            cfg.arm.l2 = a.value("l2", cfg.arm.l2);
            cfg.arm.l3 = a.value("l3", cfg.arm.l3);
        }
        if (j.contains("adapt_rates")) {
            cfg.adapt_rates = parse_rates(j.at("adapt_rates"));
        }
        cfg.target_collect_time = j.value("target_collect_time", cfg.target_collect_time);
        cfg.target_release_time = j.value("target_release_time", cfg.target_release_time);
        cfg.grasp_radius = j.value("grasp_radius", cfg.grasp_radius);
        return cfg;
    } catch (const njson::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

SessionConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_json(buf.str());
    } catch (Error& e) {
        e.add_context(path);
        throw;
    }
}

}  // namespace rehab
