#include "rehab/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace rehab {

namespace {

// Absolute angular difference wrapped into [0, 180] degrees.
double angle_diff_deg(double a, double b) {
    return std::abs(std::remainder(a - b, 360.0));
}

const MotionFrame& nearest_frame(const std::vector<MotionFrame>& frames, double t) {
    auto it = std::lower_bound(frames.begin(), frames.end(), t,
                               [](const MotionFrame& f, double v) { return f.t < v; });
    if (it == frames.begin()) return *it;
    if (it == frames.end()) return frames.back();
    const auto prev = std::prev(it);
    // Ties break toward the earlier frame.
    return (t - prev->t <= it->t - t) ? *prev : *it;
}

struct Overlap {
    double lo;
    double hi;
    std::vector<double> timestamps;  // union of both streams' stamps in [lo, hi]
};

Overlap overlap_window(const SessionTrace& trace) {
    if (trace.frames.empty() || trace.reference.empty()) {
        throw DomainError("trace requires non-empty player and reference frames");
    }
    Overlap ov;
    ov.lo = std::max(trace.frames.front().t, trace.reference.front().t);
    ov.hi = std::min(trace.frames.back().t, trace.reference.back().t);
    if (ov.lo > ov.hi) {
        throw DomainError("player and reference traces do not overlap in time");
    }
    for (const MotionFrame& f : trace.frames) {
        if (f.t >= ov.lo && f.t <= ov.hi) ov.timestamps.push_back(f.t);
    }
    for (const MotionFrame& f : trace.reference) {
        if (f.t >= ov.lo && f.t <= ov.hi) ov.timestamps.push_back(f.t);
    }
    std::sort(ov.timestamps.begin(), ov.timestamps.end());
    ov.timestamps.erase(std::unique(ov.timestamps.begin(), ov.timestamps.end()),
                        ov.timestamps.end());
    if (ov.timestamps.empty()) {
        throw DomainError("no frames inside the overlap window");
    }
    return ov;
}

double aligned_mean(const SessionTrace& trace,
                    double (*delta)(const MotionFrame&, const MotionFrame&, Joint),
                    Joint joint) {
    const Overlap ov = overlap_window(trace);
    double sum = 0.0;
    for (double t : ov.timestamps) {
        sum += delta(nearest_frame(trace.frames, t),
                     nearest_frame(trace.reference, t), joint);
    }
    return sum / static_cast<double>(ov.timestamps.size());
}

// Mean angular speed (deg/s) of a joint's orientation triple over frames
// with t in [lo, hi]: finite-difference speeds at interval midpoints, then a
// trapezoidal mean. A single interval is its own mean.
double mean_angular_speed(const std::vector<MotionFrame>& frames, Joint joint,
                          double lo, double hi) {
    std::vector<AngularVelocitySample> samples;
    const MotionFrame* prev = nullptr;
    for (const MotionFrame& f : frames) {
        if (f.t < lo || f.t > hi) continue;
        if (prev != nullptr) {
            const double dt = f.t - prev->t;
            if (dt <= 0.0) {
                throw DomainError("frame timestamps must be strictly increasing");
            }
            const Point3& a = prev->joint(joint).orientation;
            const Point3& b = f.joint(joint).orientation;
            const double dx = std::remainder(b.x - a.x, 360.0);
            const double dy = std::remainder(b.y - a.y, 360.0);
            const double dz = std::remainder(b.z - a.z, 360.0);
            samples.push_back({0.5 * (prev->t + f.t),
                               std::sqrt(dx * dx + dy * dy + dz * dz) / dt});
        }
        prev = &f;
    }
    if (samples.empty()) {
        throw DomainError("need at least two frames in the overlap window");
    }
    if (samples.size() == 1) return samples.front().v;
    return average_angular_velocity(samples);
}

double clamp90(double v) { return std::clamp(v, 0.0, 90.0); }

}  // namespace

const std::vector<std::string>& fuzzy_input_names() {
    static const std::vector<std::string> kNames = {
        "O.E_W", "O.E_E", "O.E_S", "P.E_W", "P.E_E", "P.E_S",
        "AV.E_W", "AV.E_E", "AV.E_S", "T.E_H", "T.E_S", "T.E_C", "T.E_R"};
    return kNames;
}

double orientation_error(const SessionTrace& trace, Joint joint) {
    return aligned_mean(
        trace,
        [](const MotionFrame& p, const MotionFrame& r, Joint j) {
            const Point3& a = p.joint(j).orientation;
            const Point3& b = r.joint(j).orientation;
            const double worst = std::max({angle_diff_deg(a.x, b.x),
                                           angle_diff_deg(a.y, b.y),
                                           angle_diff_deg(a.z, b.z)});
            return clamp90(worst);
        },
        joint);
}

double position_error(const SessionTrace& trace, Joint joint) {
    return aligned_mean(
        trace,
        [](const MotionFrame& p, const MotionFrame& r, Joint j) {
            return clamp90(norm(p.joint(j).position - r.joint(j).position));
        },
        joint);
}

double angular_velocity_error(const SessionTrace& trace, Joint joint) {
    const Overlap ov = overlap_window(trace);
    const double player = mean_angular_speed(trace.frames, joint, ov.lo, ov.hi);
    const double ref = mean_angular_speed(trace.reference, joint, ov.lo, ov.hi);
    return clamp90(std::abs(player - ref));
}

std::pair<double, double> tilt_errors(const SessionTrace& trace) {
    if (trace.frames.empty()) {
        throw DomainError("tilt errors need a non-empty trace");
    }
    double head = 0.0;
    double spine = 0.0;
    for (const MotionFrame& f : trace.frames) {
        head += f.head_tilt;
        spine += f.spine_tilt;
    }
    const double n = static_cast<double>(trace.frames.size());
    return {std::clamp(head / n, 0.0, 32.0), std::clamp(spine / n, 0.0, 36.0)};
}

std::pair<double, double> time_errors(const std::vector<TaskEvent>& events) {
    double collect = 0.0;
    double release = 0.0;
    int completed = 0;
    for (const TaskEvent& e : events) {
        if (!e.completed()) continue;
        ++completed;
        collect += std::abs((*e.t_collected - e.t_spawned) - e.target_collect_time);
        release += std::abs((*e.t_collected - *e.t_reached) - e.target_release_time);
    }
    if (completed == 0) {
        throw DomainError("no completed task events to derive timing errors from");
    }
    const double n = static_cast<double>(completed);
    return {std::clamp(collect / n, 0.0, 6.0), std::clamp(release / n, 0.0, 6.0)};
}

std::pair<double, Dominance> pedal_dominance(const SessionTrace& trace) {
    if (trace.frames.empty()) {
        throw DomainError("pedal dominance needs a non-empty trace");
    }
    double sum = 0.0;
    for (const MotionFrame& f : trace.frames) sum += f.pedal;
    const double avg = sum / static_cast<double>(trace.frames.size());
    constexpr double kDeadBand = 0.05;
    Dominance d = Dominance::Neutral;
    if (avg < -kDeadBand) d = Dominance::Left;
    if (avg > kDeadBand) d = Dominance::Right;
    return {avg, d};
}

FuzzyInputVector build_fuzzy_inputs(const SessionTrace& trace,
                                    const std::set<std::string>& active_set) {
    for (const std::string& name : active_set) {
        const auto& known = fuzzy_input_names();
        if (std::find(known.begin(), known.end(), name) == known.end()) {
            throw ConfigError("unknown fuzzy input '" + name + "'");
        }
    }

    FuzzyInputVector out;
    auto want = [&active_set](const char* name) { return active_set.count(name) != 0; };
    auto compute = [&out](const char* name, auto&& fn) {
        try {
            out[name] = fn();
        } catch (Error& e) {
            e.add_context(std::string("computing ") + name);
            throw;
        }
    };

    const struct {
        const char* orient;
        const char* pos;
        const char* av;
        Joint joint;
    } kJointMetrics[] = {
        {"O.E_W", "P.E_W", "AV.E_W", Joint::Wrist},
        {"O.E_E", "P.E_E", "AV.E_E", Joint::Elbow},
        {"O.E_S", "P.E_S", "AV.E_S", Joint::Shoulder},
    };
    for (const auto& m : kJointMetrics) {
        if (want(m.orient)) {
            compute(m.orient, [&] { return orientation_error(trace, m.joint); });
        }
        if (want(m.pos)) {
            compute(m.pos, [&] { return position_error(trace, m.joint); });
        }
        if (want(m.av)) {
            compute(m.av, [&] { return angular_velocity_error(trace, m.joint); });
        }
    }
    if (want("T.E_H") || want("T.E_S")) {
        std::pair<double, double> tilts;
        try {
            tilts = tilt_errors(trace);
        } catch (Error& e) {
            e.add_context("computing tilt errors");
            throw;
        }
        if (want("T.E_H")) out["T.E_H"] = tilts.first;
        if (want("T.E_S")) out["T.E_S"] = tilts.second;
    }
    if (want("T.E_C") || want("T.E_R")) {
        std::pair<double, double> times;
        try {
            times = time_errors(trace.events);
        } catch (Error& e) {
            e.add_context("computing timing errors");
            throw;
        }
        if (want("T.E_C")) out["T.E_C"] = times.first;
        if (want("T.E_R")) out["T.E_R"] = times.second;
    }
    return out;
}

}  // namespace rehab
