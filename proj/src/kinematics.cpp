#include "rehab/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rehab {

namespace {

constexpr double kPi = std::numbers::pi;

// Tolerance for snapping |c3| to 1 at the workspace boundary, where rounding
// in the target coordinates can push the cosine marginally past the unit
// interval.
constexpr double kCosineSnap = 1e-12;

}  // namespace

double norm(Point3 p) { return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z); }

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

Point3 forward_kinematics(const ArmGeometry& geom, const JointAngles& q) {
    const double radial = geom.l2 * std::cos(q.theta2) +
                          geom.l3 * std::cos(q.theta2 + q.theta3);
    return {std::cos(q.theta1) * radial,
            std::sin(q.theta1) * radial,
            geom.l1 + geom.l2 * std::sin(q.theta2) +
                geom.l3 * std::sin(q.theta2 + q.theta3)};
}

ChainPose chain_pose(const ArmGeometry& geom, const JointAngles& q) {
    ChainPose pose;
    pose.shoulder = {0.0, 0.0, geom.l1};
    pose.elbow = {std::cos(q.theta1) * geom.l2 * std::cos(q.theta2),
                  std::sin(q.theta1) * geom.l2 * std::cos(q.theta2),
                  geom.l1 + geom.l2 * std::sin(q.theta2)};
    pose.hand = forward_kinematics(geom, q);
    return pose;
}

bool reachable(const ArmGeometry& geom, const Point3& target) {
    const double dx = target.x;
    const double dy = target.y;
    const double dz = target.z - geom.l1;
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    return std::abs(geom.l2 - geom.l3) <= r && r <= geom.l2 + geom.l3;
}

JointAngles solve_ik(const ArmGeometry& geom, const Point3& target,
                     ElbowBranch elbow) {
    const double x = target.x;
    const double y = target.y;
    const double dz = target.z - geom.l1;

    if (x == 0.0 && y == 0.0) {
        throw SingularError("target on the shoulder axis, yaw undefined");
    }

    double c3 = (x * x + y * y + dz * dz - geom.l2 * geom.l2 -
                 geom.l3 * geom.l3) /
                (2.0 * geom.l2 * geom.l3);
    if (std::abs(c3) > 1.0) {
        if (std::abs(c3) <= 1.0 + kCosineSnap) {
            c3 = (c3 > 0.0) ? 1.0 : -1.0;
        } else {
            throw UnreachableError("target outside the reachable shell (cos elbow = " +
                                   std::to_string(c3) + ")");
        }
    }

    double s3 = std::sqrt(1.0 - c3 * c3);
    if (elbow == ElbowBranch::Down) s3 = -s3;

    JointAngles q;
    q.theta1 = wrap_angle(std::atan2(y, x));
    q.theta3 = wrap_angle(std::atan2(s3, c3));
    q.theta2 = wrap_angle(std::atan2(dz, std::sqrt(x * x + y * y)) -
                          std::atan2(geom.l3 * s3, geom.l2 + geom.l3 * c3));
    return q;
}

double average_angular_velocity(const std::vector<AngularVelocitySample>& samples) {
    if (samples.size() < 2) {
        throw DomainError("average angular velocity needs at least two samples");
    }
    double integral = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double dt = samples[i].t - samples[i - 1].t;
        if (dt <= 0.0) {
            throw DomainError("angular velocity timestamps must be strictly increasing");
        }
        integral += 0.5 * (samples[i].v + samples[i - 1].v) * dt;
    }
    return integral / (samples.back().t - samples.front().t);
}

}  // namespace rehab
