#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rehab/adaptation.hpp"
#include "rehab/batch.hpp"
#include "rehab/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename F>
double time_best_of(int reps, F&& body) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto start = Clock::now();
        body();
        const double dt = seconds_since(start);
        if (dt < best) best = dt;
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s) {
    std::printf("%-24s serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n",
                name, serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif

    rehab::Rng rng(42);

    // Inference over a batch of random input vectors on the shipped rules.
    const rehab::RuleBase rb = rehab::default_rulebase();
    std::vector<rehab::InputValues> batch(20000);
    for (auto& inputs : batch) {
        for (const rehab::LinguisticVariable& var : rb.inputs) {
            inputs[var.name] = rng.uniform(var.lo, var.hi);
        }
    }
    std::vector<double> out_serial, out_parallel;
    const double infer_serial = time_best_of(
        3, [&] { out_serial = rehab::infer_batch_serial(rb, batch); });
    const double infer_parallel = time_best_of(
        3, [&] { out_parallel = rehab::infer_batch_parallel(rb, batch); });
    bool same = out_serial == out_parallel;
    report("infer_batch", infer_serial, infer_parallel);

    // Inverse kinematics round trips on random reachable targets.
    const rehab::ArmGeometry geom;
    std::vector<rehab::Point3> targets;
    targets.reserve(2000000);
    while (targets.size() < 2000000) {
        const rehab::Point3 p{rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6),
                              rng.uniform(0.4, 1.6)};
        if (rehab::reachable(geom, p) && !(p.x == 0.0 && p.y == 0.0)) {
            targets.push_back(p);
        }
    }
    double res_serial = 0.0, res_parallel = 0.0;
    const double ik_serial = time_best_of(3, [&] {
        res_serial = rehab::ik_roundtrip_max_residual_serial(
            geom, targets, rehab::ElbowBranch::Up);
    });
    const double ik_parallel = time_best_of(3, [&] {
        res_parallel = rehab::ik_roundtrip_max_residual_parallel(
            geom, targets, rehab::ElbowBranch::Up);
    });
    same = same && res_serial == res_parallel;
    report("ik_roundtrip", ik_serial, ik_parallel);

    std::printf("serial/parallel results %s\n", same ? "identical" : "DIFFER");
    return same ? 0 : 1;
}
