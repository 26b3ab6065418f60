#include "rehab/batch.hpp"

#include <algorithm>
#include <cstdint>

namespace rehab {

std::vector<double> infer_batch_serial(const RuleBase& rb,
                                       const std::vector<InputValues>& batch) {
    std::vector<double> out(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        out[i] = infer(rb, batch[i]).crisp;
    }
    return out;
}

std::vector<double> infer_batch_parallel(const RuleBase& rb,
                                         const std::vector<InputValues>& batch) {
    std::vector<double> out(batch.size());
    const auto n = static_cast<std::int64_t>(batch.size());
#pragma omp parallel for
    for (std::int64_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] =
            infer(rb, batch[static_cast<std::size_t>(i)]).crisp;
    }
    return out;
}

namespace {

double roundtrip_residual(const ArmGeometry& geom, const Point3& target,
                          ElbowBranch elbow) {
    return norm(forward_kinematics(geom, solve_ik(geom, target, elbow)) - target);
}

}  // namespace

double ik_roundtrip_max_residual_serial(const ArmGeometry& geom,
                                        const std::vector<Point3>& targets,
                                        ElbowBranch elbow) {
    double worst = 0.0;
    for (const Point3& p : targets) {
        worst = std::max(worst, roundtrip_residual(geom, p, elbow));
    }
    return worst;
}

double ik_roundtrip_max_residual_parallel(const ArmGeometry& geom,
                                          const std::vector<Point3>& targets,
                                          ElbowBranch elbow) {
    double worst = 0.0;
    const auto n = static_cast<std::int64_t>(targets.size());
#pragma omp parallel for reduction(max : worst)
    for (std::int64_t i = 0; i < n; ++i) {
        worst = std::max(worst,
                         roundtrip_residual(geom, targets[static_cast<std::size_t>(i)],
                                            elbow));
    }
    return worst;
}

}  // namespace rehab
