#include <doctest.h>

#include <cmath>

#include "lpstoch/reports.hpp"
#include "lpstoch/stepper.hpp"

using namespace lpstoch;

namespace {

// scalar dY = Y dX^0 no-op; channel layout decided per test via lambdas
Increment scalar_inc(const State& s, double coeff) {
    Increment inc = Increment::zero_like(s, 0);
    inc.flat(0) = coeff;
    return inc;
}

}  // namespace

TEST_CASE("zero field leaves the state unchanged") {
    State s;
    s.flat = Vec::Constant(3, 1.5);
    auto f = [](const State& st, int) { return Increment::zero_like(st, 0); };
    const DrivingPath p = make_time_brownian(1, 1e-2, 10, 1);
    const auto traj = integrate(f, s, p, StepperConfig{});
    CHECK((traj.states.back().flat - s.flat).norm() == 0.0);
}

TEST_CASE("degenerate steps are identity maps") {
    State s;
    s.flat = Vec::Constant(1, 2.0);
    auto f = [](const State& st, int) { return scalar_inc(st, 1.0); };
    Mat inc = Mat::Zero(3, 2);
    const DrivingPath p = make_custom(inc, 1.0);
    StepperConfig cfg;
    for (auto scheme : {Scheme::EulerHeun, Scheme::Midpoint}) {
        cfg.scheme = scheme;
        auto [sn, applied] = strat_step(f, s, p.increments.row(0).transpose(), cfg);
        CHECK(sn.flat(0) == 2.0);
        CHECK(applied.flat.norm() == 0.0);
    }
}

TEST_CASE("Heun is second order on smooth linear dynamics") {
    // dY = a Y dt, exact e^{aT}
    const double a = 1.3, T = 1.0;
    auto f = [a](const State& st, int j) {
        Increment inc = Increment::zero_like(st, 0);
        if (j == 0) inc.flat(0) = a * st.flat(0);
        return inc;
    };
    auto run = [&](int N) {
        State s;
        s.flat = Vec::Constant(1, 1.0);
        const DrivingPath p = make_time_brownian(0, T / N, N, 0);
        return integrate(f, s, p, StepperConfig{}).states.back().flat(0);
    };
    const double e1 = std::abs(run(100) - std::exp(a * T));
    const double e2 = std::abs(run(200) - std::exp(a * T));
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
    CHECK(std::abs(run(1000) - std::exp(a * T)) / std::exp(a * T) < 1e-5);
}

TEST_CASE("Stratonovich consistency: dY = Y dW against exp(W_T)") {
    // strong error fitted over 4 dyadic levels, 200 coupled paths
    auto f = [](const State& st, int j) {
        Increment inc = Increment::zero_like(st, 0);
        if (j == 1) inc.flat(0) = st.flat(0);
        return inc;
    };
    const int levels = 4, paths = 200;
    const int Nfine = 64 << (levels - 1);
    std::vector<double> err(levels, 0.0);
    for (int p = 0; p < paths; ++p) {
        const DrivingPath fine = make_time_brownian(derive_seed(2024, p), 1.0 / Nfine, Nfine, 1);
        const double WT = fine.increments.col(1).sum();
        const double exact = std::exp(WT);
        for (int l = 0; l < levels; ++l) {
            const DrivingPath pl = coarsen(fine, 1 << (levels - 1 - l));
            State s;
            s.flat = Vec::Constant(1, 1.0);
            const double yT = integrate(f, s, pl, StepperConfig{}).states.back().flat(0);
            err[l] += std::abs(yT - exact) / paths;
        }
    }
    std::vector<std::pair<double, double>> fit;
    for (int l = 0; l < levels; ++l) fit.emplace_back(1.0 / (64 << l), err[l]);
    const double order = fit_loglog_order(fit);
    CHECK(order > 0.8);
    CHECK(order < 1.2);
}

TEST_CASE("midpoint solves the implicit equation") {
    // linear test equation: midpoint is A-stable and second order
    const double a = -2.0, T = 1.0;
    auto f = [a](const State& st, int j) {
        Increment inc = Increment::zero_like(st, 0);
        if (j == 0) inc.flat(0) = a * st.flat(0);
        return inc;
    };
    StepperConfig cfg;
    cfg.scheme = Scheme::Midpoint;
    State s;
    s.flat = Vec::Constant(1, 1.0);
    const int N = 200;
    const DrivingPath p = make_time_brownian(0, T / N, N, 0);
    const double yT = integrate(f, s, p, cfg).states.back().flat(0);
    CHECK(yT == doctest::Approx(std::exp(a * T)).epsilon(1e-4));
    // explicit check of the midpoint fixed point on one step
    auto [s1, inc] = strat_step(f, s, p.increments.row(0).transpose(), cfg);
    const double h = T / N;
    const double ymid = 0.5 * (s.flat(0) + s1.flat(0));
    CHECK(s1.flat(0) - s.flat(0) == doctest::Approx(a * ymid * h).epsilon(1e-10));
}

TEST_CASE("midpoint reports non-convergence with the step index") {
    // stiff quadratic blowup with a huge step defeats the fixed point
    auto f = [](const State& st, int) {
        Increment inc = Increment::zero_like(st, 0);
        inc.flat(0) = st.flat(0) * st.flat(0);
        return inc;
    };
    StepperConfig cfg;
    cfg.scheme = Scheme::Midpoint;
    cfg.newton_max_iter = 5;
    State s;
    s.flat = Vec::Constant(1, 10.0);
    Mat inc = Mat::Constant(1, 1, 10.0);
    const DrivingPath p = make_custom(inc, 10.0);
    CHECK_THROWS_AS(
        (void)integrate(f, s, p, cfg), IntegrationError);
    try {
        (void)integrate(f, s, p, cfg);
    } catch (const IntegrationError& e) {
        CHECK(e.step() == 0);
    }
}

TEST_CASE("group components stay on the manifold") {
    const GroupSpec spec = GroupSpec::so3();
    State s;
    s.flat = Vec::Zero(0);
    s.group.push_back(GroupElement::identity(spec));
    auto f = [](const State& st, int j) {
        Increment inc = Increment::zero_like(st, 0);
        inc.algebra[0] = Vec(Vec3(0.3, j == 0 ? 1.0 : -0.4, 0.2));
        return inc;
    };
    const DrivingPath p = make_time_brownian(3, 1e-2, 2000, 1);
    const auto traj = integrate(f, s, p, StepperConfig{});
    for (const auto& st : traj.states) CHECK(st.group[0].ortho_defect() <= kOrthoTol);
}

TEST_CASE("identical paths give identical trajectories") {
    auto f = [](const State& st, int j) {
        Increment inc = Increment::zero_like(st, 0);
        inc.flat(0) = j == 0 ? -st.flat(0) : 0.5 * st.flat(0);
        return inc;
    };
    State s;
    s.flat = Vec::Constant(1, 1.0);
    const DrivingPath p = make_time_brownian(77, 1e-3, 500, 1);
    const auto t1 = integrate(f, s, p, StepperConfig{});
    const auto t2 = integrate(f, s, coarsen(p, 1), StepperConfig{});
    for (size_t n = 0; n < t1.states.size(); ++n)
        CHECK((t1.states[n].flat - t2.states[n].flat).norm() == 0.0);
}
