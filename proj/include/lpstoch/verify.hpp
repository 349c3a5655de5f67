#pragma once

#include "lpstoch/systems.hpp"

namespace lpstoch {

/// Worker count: LPSTOCH_THREADS if set, else the OpenMP default (1 without
/// OpenMP).
int resolve_threads();

/// Deterministic pairwise summation.
double pairwise_sum(const double* v, long n);

struct EnsembleConfig {
    double T = 1.0;
    double h = 1e-3;
    long trials = 100;
    int slices = 10;
    std::uint64_t seed = 0;
    StepperConfig step;
};

/// Runs `trials` independent reduced integrations, trial i driven by the
/// path seeded with derive_seed(seed, i), and aggregates the McSpec
/// observable at evenly spaced time slices. The result is bitwise
/// independent of the thread count.
EnsembleReport monte_carlo(const SystemPair& sys, const McSpec& mc, const EnsembleConfig& cfg);
EnsembleReport monte_carlo(const SystemPair& sys, const EnsembleConfig& cfg);

/// Serial reference implementation of the same kernel (kept for testing and
/// benchmarked against the parallel one).
EnsembleReport monte_carlo_serial(const SystemPair& sys, const McSpec& mc,
                                  const EnsembleConfig& cfg);

struct CompareConfig {
    double T = 1.0;
    double h0 = 2e-3;  // coarsest level
    int levels = 4;
    int paths = 1;
    std::uint64_t seed = 0;
    bool with_noise = true;
    StepperConfig step;
    bool unreduced_reference = false;  // reference from the projected unreduced solve
};

/// Integrates the reduced and unreduced forms on the same driving path at
/// each dyadic level. Per level it reports the same-level discrepancy
/// between the two forms and the error of the projected unreduced solve
/// against a one-level-finer reduced reference on the coupled path; the
/// strong order is fitted to the latter.
ConvergenceReport compare_reduced_unreduced(const SystemPair& sys, const CompareConfig& cfg);

/// Max over t of | |mubar_t|^2 - |mubar_0|^2 | / |mubar_0|^2 along one noisy
/// trajectory.
double check_casimir(const SystemPair& sys, double T, double h, std::uint64_t seed,
                     const StepperConfig& step = {});

/// Worst mixed absolute/relative deviation between every supplied analytic
/// partial (Lagrangians, noise fields, connection coefficients) and central
/// finite differences at `points` seeded sample states.
double check_gradients(const SystemPair& sys, std::uint64_t seed = 0, int points = 100);

/// The check suite behind `lpstoch check`: gradient fidelity, curvature
/// antisymmetry, fiber consistency, conservation laws, action invariance and
/// reduced/unreduced action agreement, orthogonality drift.
std::vector<CheckResult> run_system_checks(const SystemPair& sys, std::uint64_t seed = 0);

}  // namespace lpstoch
