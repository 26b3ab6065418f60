#pragma once

#include <vector>

#include "rehab/fuzzy.hpp"
#include "rehab/kinematics.hpp"

namespace rehab {

// Batch kernels used by the property suites and the seed sweep. Each has a
// serial reference implementation and an OpenMP variant; the parallel form
// must reproduce the serial result bitwise (per-element work is independent
// and no reductions reorder floating-point sums).

std::vector<double> infer_batch_serial(const RuleBase& rb,
                                       const std::vector<InputValues>& batch);
std::vector<double> infer_batch_parallel(const RuleBase& rb,
                                         const std::vector<InputValues>& batch);

// Max |FK(IK(target)) - target| over the batch, meters.
double ik_roundtrip_max_residual_serial(const ArmGeometry& geom,
                                        const std::vector<Point3>& targets,
                                        ElbowBranch elbow);
double ik_roundtrip_max_residual_parallel(const ArmGeometry& geom,
                                          const std::vector<Point3>& targets,
                                          ElbowBranch elbow);

}  // namespace rehab
