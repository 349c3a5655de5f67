#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpstoch/driving_path.hpp"
#include "lpstoch/lie.hpp"

namespace lpstoch {

/// Integrator state: flat coordinates updated additively, group components
/// updated by right multiplication with the exponential of the algebra part.
struct State {
    Vec flat;
    std::vector<GroupElement> group;
};

/// Tangent increment. `flat` and `algebra` drive the state update; `aux` is
/// carried through the same linear combinations but never applied to the
/// state (used to record formal increments such as dxibar).
struct Increment {
    Vec flat;
    std::vector<Vec> algebra;
    Vec aux;

    void add_scaled(const Increment& o, double w) {
        flat += w * o.flat;
        for (size_t i = 0; i < algebra.size(); ++i) algebra[i] += w * o.algebra[i];
        if (aux.size() > 0) aux += w * o.aux;
    }
    void scale(double w) {
        flat *= w;
        for (auto& a : algebra) a *= w;
        aux *= w;
    }
    double norm() const {
        double s = flat.squaredNorm();
        for (const auto& a : algebra) s += a.squaredNorm();
        return std::sqrt(s);
    }
    static Increment zero_like(const State& s, int aux_dim) {
        Increment inc;
        inc.flat = Vec::Zero(s.flat.size());
        inc.algebra.reserve(s.group.size());
        for (const auto& g : s.group)
            for (int b = 0; b < g.blocks(); ++b)
                inc.algebra.push_back(Vec::Zero(algebra_dim(g.block(b).kind)));
        inc.aux = Vec::Zero(aux_dim);
        return inc;
    }
};

enum class Scheme { EulerHeun, Midpoint };

struct StepperConfig {
    Scheme scheme = Scheme::EulerHeun;
    double newton_tol = 1e-12;
    int newton_max_iter = 50;
};

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "euler_heun" || s == "heun") return Scheme::EulerHeun;
    if (s == "midpoint") return Scheme::Midpoint;
    throw std::invalid_argument("unknown scheme: " + s);
}

inline std::string to_string(Scheme s) {
    return s == Scheme::EulerHeun ? "euler_heun" : "midpoint";
}

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, long step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

inline State advance(const State& s, const Increment& inc) {
    State out;
    out.flat = s.flat + inc.flat;
    out.group.reserve(s.group.size());
    size_t ai = 0;
    for (const auto& g : s.group) {
        GroupElement ng = g;
        for (int b = 0; b < ng.blocks(); ++b, ++ai) {
            const Vec& w = inc.algebra[ai];
            auto& blk = ng.block(b);
            if (blk.kind == GroupKind::Circle)
                blk.angle = wrap_angle(blk.angle + w(0));
            else
                blk.R = blk.R * so3_exp(Vec3(w));
        }
        ng.renormalize();
        out.group.push_back(ng);
    }
    return out;
}

/// Sum_j f(s, j) * dX_j, skipping channels with zero increment.
template <class Field>
Increment weighted_field_sum(const Field& f, const State& s, const Eigen::Ref<const Vec>& dX,
                             int aux_dim) {
    Increment acc = Increment::zero_like(s, aux_dim);
    for (int j = 0; j < dX.size(); ++j) {
        if (dX(j) == 0.0) continue;
        acc.add_scaled(f(s, j), dX(j));
    }
    return acc;
}

/// One Stratonovich step. Returns the new state and the applied increment.
template <class Field>
std::pair<State, Increment> strat_step(const Field& f, const State& s,
                                       const Eigen::Ref<const Vec>& dX, const StepperConfig& cfg,
                                       int aux_dim = 0, long step_index = -1) {
    if (cfg.scheme == Scheme::EulerHeun) {
        Increment k1 = weighted_field_sum(f, s, dX, aux_dim);
        const State sp = advance(s, k1);
        Increment k2 = weighted_field_sum(f, sp, dX, aux_dim);
        k1.add_scaled(k2, 1.0);
        k1.scale(0.5);
        return {advance(s, k1), std::move(k1)};
    }
    // implicit midpoint by fixed-point iteration on the applied increment
    Increment v = weighted_field_sum(f, s, dX, aux_dim);
    for (int it = 0; it < cfg.newton_max_iter; ++it) {
        Increment half = v;
        half.scale(0.5);
        const State sm = advance(s, half);
        Increment vn = weighted_field_sum(f, sm, dX, aux_dim);
        Increment diff = vn;
        diff.add_scaled(v, -1.0);
        const double delta = diff.norm();
        v = std::move(vn);
        if (delta <= cfg.newton_tol * (1.0 + v.norm()))
            return {advance(s, v), std::move(v)};
    }
    throw IntegrationError("midpoint iteration did not converge", step_index);
}

inline void check_finite(const State& s, long step_index) {
    bool ok = s.flat.allFinite();
    for (const auto& g : s.group) ok = ok && g.finite();
    if (!ok) throw IntegrationError("non-finite state", step_index);
}

/// Applies the stepper over all increments of the path, invoking
/// obs(step_index, state, applied_increment) after every step. obs is also
/// called once with step_index -1 for the initial state (zero increment).
template <class Field, class Observer>
void integrate_fold(const Field& f, State s, const DrivingPath& path, const StepperConfig& cfg,
                    Observer&& obs, int aux_dim = 0) {
    obs(-1L, s, Increment::zero_like(s, aux_dim));
    for (long n = 0; n < path.steps(); ++n) {
        auto [sn, inc] = strat_step(f, s, path.increments.row(n).transpose(), cfg, aux_dim, n);
        s = std::move(sn);
        check_finite(s, n);
        obs(n, s, inc);
    }
}

struct GenericTrajectory {
    std::vector<State> states;       // N+1
    std::vector<Increment> applied;  // N
};

template <class Field>
GenericTrajectory integrate(const Field& f, const State& s0, const DrivingPath& path,
                            const StepperConfig& cfg, int aux_dim = 0) {
    GenericTrajectory traj;
    traj.states.reserve(path.steps() + 1);
    traj.applied.reserve(path.steps());
    integrate_fold(
        f, s0, path, cfg,
        [&](long n, const State& s, const Increment& inc) {
            traj.states.push_back(s);
            if (n >= 0) traj.applied.push_back(inc);
        },
        aux_dim);
    return traj;
}

}  // namespace lpstoch
