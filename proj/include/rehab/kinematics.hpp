#pragma once

#include <vector>

#include "rehab/errors.hpp"

namespace rehab {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Point3 operator*(double s, Point3 p) { return {s * p.x, s * p.y, s * p.z}; }

double norm(Point3 p);

// Link lengths in meters: l1 vertical base offset, l2 upper arm, l3 forearm.
struct ArmGeometry {
    double l1 = 1.0;
    double l2 = 0.30;
    double l3 = 0.25;
};

// Shoulder yaw, shoulder pitch, elbow flexion. Radians, each in (-pi, pi].
struct JointAngles {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double theta3 = 0.0;
};

enum class ElbowBranch { Up, Down };  // Up: theta3 >= 0 (default)

// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

// Hand position of the chain: yaw about z at the base, pitch at the shoulder
// (which sits at height l1), flexion at the elbow.
Point3 forward_kinematics(const ArmGeometry& geom, const JointAngles& q);

// Positions of shoulder, elbow and hand; used by the simulator to emit full
// per-joint traces.
struct ChainPose {
    Point3 shoulder;
    Point3 elbow;
    Point3 hand;
};
ChainPose chain_pose(const ArmGeometry& geom, const JointAngles& q);

// True iff the target lies inside the annular shell reachable by the two
// moving links about the shoulder point (0, 0, l1).
bool reachable(const ArmGeometry& geom, const Point3& target);

// Closed-form inverse kinematics. Throws UnreachableError when the target is
// outside the annulus and SingularError on the shoulder axis (x = y = 0,
// where yaw is undefined).
JointAngles solve_ik(const ArmGeometry& geom, const Point3& target,
                     ElbowBranch elbow = ElbowBranch::Up);

struct AngularVelocitySample {
    double t = 0.0;  // seconds, strictly increasing within a series
    double v = 0.0;  // radians / second
};

// Trapezoidal mean of v over [first.t, last.t]. Exact for piecewise-linear v.
// Throws DomainError on fewer than two samples or non-increasing timestamps.
double average_angular_velocity(const std::vector<AngularVelocitySample>& samples);

}  // namespace rehab
