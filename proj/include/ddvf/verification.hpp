#pragma once

#include <string>
#include <vector>

#include "ddvf/transport.hpp"

namespace ddvf {

/// Outcome of one self-check run by `ddvf --verify`.
struct VerificationResult {
    std::string name;
    bool passed = false;
    double value = 0.0;      // measured quantity (error or observed order)
    double threshold = 0.0;  // pass limit for `value`
    std::string detail;
};

/// Darcy patch test: p = 1 - x on the whole boundary, mu = k = 1, no source.
/// Max nodal error of v = (1, 0) and p = 1 - x must be <= 1e-10.
VerificationResult flow_patch_test();

/// Manufactured transport solution u = exp(-t) cos(pi x) cos(pi y) advected by
/// a solenoidal cellular flow. Returns L2 errors at the final time.
struct ConvergenceStudy {
    std::vector<int> meshes;
    std::vector<double> dts;
    std::vector<double> errors;
    std::vector<double> orders;  // log2 of successive error ratios
};

ConvergenceStudy spatial_convergence(StabilizationScheme scheme, const std::vector<int>& meshes);
ConvergenceStudy temporal_convergence(StabilizationScheme scheme, int mesh, const std::vector<int>& step_counts);

VerificationResult spatial_convergence_check();   // SUPG, 16/32/64, dt ~ h^2, order >= 1.9
VerificationResult temporal_convergence_check();  // SUPG, 64^2, dt halving, order >= 0.9

std::vector<VerificationResult> run_verification_suite();

} // namespace ddvf
