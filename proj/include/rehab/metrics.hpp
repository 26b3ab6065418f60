#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rehab/errors.hpp"
#include "rehab/kinematics.hpp"

namespace rehab {

enum class Joint : int { Wrist = 0, Elbow = 1, Shoulder = 2 };

inline const char* joint_name(Joint j) {
    switch (j) {
        case Joint::Wrist: return "wrist";
        case Joint::Elbow: return "elbow";
        default: return "shoulder";
    }
}

struct JointPose {
    Point3 orientation;  // Euler angles, degrees per axis
    Point3 position;     // centimeters
};

struct MotionFrame {
    double t = 0.0;  // seconds
    std::array<JointPose, 3> joints{};  // indexed by Joint
    double head_tilt = 0.0;   // degrees, >= 0
    double spine_tilt = 0.0;  // degrees, >= 0
    double pedal = 0.0;       // [-1, 1]

    JointPose& joint(Joint j) { return joints[static_cast<int>(j)]; }
    const JointPose& joint(Joint j) const { return joints[static_cast<int>(j)]; }
};

struct TaskEvent {
    int object_id = 0;
    double t_spawned = 0.0;
    std::optional<double> t_reached;
    std::optional<double> t_collected;
    double target_collect_time = 0.0;  // prescribed spawn-to-collect, seconds
    double target_release_time = 0.0;  // prescribed reach-to-collect, seconds

    bool completed() const { return t_reached.has_value() && t_collected.has_value(); }
};

struct SessionTrace {
    std::vector<MotionFrame> frames;     // player, strictly increasing t
    std::vector<TaskEvent> events;
    std::vector<MotionFrame> reference;  // instructor, strictly increasing t
};

// Crisp fuzzy inputs by variable name; only active metrics are present.
using FuzzyInputVector = std::map<std::string, double>;

// The 13 input names, in declaration order.
const std::vector<std::string>& fuzzy_input_names();

// Mean over aligned frames of the per-axis-max absolute angular difference,
// wrapped to [0,180] and clamped to 90. Streams are aligned on the union of
// their timestamps inside the overlap window, each matched to its nearest
// frame, which keeps the metric symmetric in (player, reference).
double orientation_error(const SessionTrace& trace, Joint joint);

// Mean Euclidean distance between aligned joint positions, cm, clamped to 90.
double position_error(const SessionTrace& trace, Joint joint);

// |mean angular speed player - mean angular speed reference| in deg/s over
// the overlap window, clamped to 90. Speeds are finite differences of the
// orientation triple; their mean is trapezoidal.
double angular_velocity_error(const SessionTrace& trace, Joint joint);

// (mean head tilt clamped to [0,32], mean spine tilt clamped to [0,36]).
std::pair<double, double> tilt_errors(const SessionTrace& trace);

// Mean |actual - prescribed| collection and release durations over completed
// events, seconds, clamped to [0,6]. Throws when no event completed.
std::pair<double, double> time_errors(const std::vector<TaskEvent>& events);

enum class Dominance { Left, Neutral, Right };

inline const char* dominance_name(Dominance d) {
    switch (d) {
        case Dominance::Left: return "Left";
        case Dominance::Neutral: return "Neutral";
        default: return "Right";
    }
}

// Mean pedal value and its sign with a +/-0.05 neutral dead band. Negative
// mean reads as left-foot dominant.
std::pair<double, Dominance> pedal_dominance(const SessionTrace& trace);

// Computes exactly the metrics named in active_set (must be a subset of
// fuzzy_input_names()); errors gain the failing metric's name as context.
FuzzyInputVector build_fuzzy_inputs(const SessionTrace& trace,
                                    const std::set<std::string>& active_set);

}  // namespace rehab
