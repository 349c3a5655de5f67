#pragma once

#include <functional>
#include <iosfwd>
#include <optional>

#include "lpstoch/connection.hpp"
#include "lpstoch/stepper.hpp"

namespace lpstoch {

/// One driving channel of a system: potential l (with gradient dl), shape
/// field V (with Jacobian dV(i,j) = dV^i/dx^j) and fiber field beta (with
/// Jacobian dbeta). Null entries mean identically zero.
struct NoiseChannel {
    std::function<double(const Vec&)> l;
    std::function<Vec(const Vec&)> dl;
    std::function<Vec(const Vec&)> V;
    std::function<Mat(const Vec&)> dV;
    std::function<Vec(const Vec&)> beta;
    std::function<Mat(const Vec&)> dbeta;
};

struct FiberPartials {
    Vec dx;     // r
    Vec du;     // r   (dv for the unreduced Lagrangian)
    Vec dzbar;  // d   (dxi for the unreduced Lagrangian)
};

/// Reduced system on T(Q/G) + T*(Q/G) + adjoint bundle + dual, in a global
/// trivialization. ell(x,u,zbar) is the reduced Lagrangian; legendre_inv
/// inverts (u,zbar) -> (dell/du, dell/dzbar) at fixed x.
struct ReducedSystemSpec {
    int r = 0;
    GroupSpec group;
    Tensor3 C;
    ConnectionField conn;
    std::function<double(const Vec&, const Vec&, const Vec&)> ell;
    std::function<FiberPartials(const Vec&, const Vec&, const Vec&)> d_ell;
    std::vector<NoiseChannel> noise;
    std::function<std::pair<Vec, Vec>(const Vec&, const Vec&, const Vec&)> legendre_inv;

    int k() const { return static_cast<int>(noise.size()); }
    int d() const { return group.dim(); }
};

/// Invariant system on a trivialized bundle U x G, written in body
/// coordinates: L(x,v,xi) with xi the body velocity, noise V_i split into a
/// shape part V and fiber part beta, legendre_inv: (x, p_x, mu) -> (v, xi).
struct UnreducedSystemSpec {
    int r = 0;
    GroupSpec group;
    Tensor3 C;
    std::function<double(const Vec&, const Vec&, const Vec&)> L;
    std::function<FiberPartials(const Vec&, const Vec&, const Vec&)> d_L;
    std::vector<NoiseChannel> noise;
    std::function<std::pair<Vec, Vec>(const Vec&, const Vec&, const Vec&)> legendre_inv;

    int k() const { return static_cast<int>(noise.size()); }
    int d() const { return group.dim(); }
};

struct ReducedState {
    Vec x, u, y, zbar, mubar;
};

struct UnreducedState {
    Vec x;
    GroupElement g;
    Vec v, xi, p_x, mu;
};

struct ReducedTrajectory {
    double t0 = 0.0, h = 0.0;
    std::vector<ReducedState> states;  // N+1
    std::vector<Vec> dxibar;           // N, applied formal increments of xibar
    int steps() const { return static_cast<int>(dxibar.size()); }
    double time_at(int n) const { return t0 + n * h; }
};

struct UnreducedTrajectory {
    double t0 = 0.0, h = 0.0;
    std::vector<UnreducedState> states;  // N+1
    int steps() const { return static_cast<int>(states.size()) - 1; }
    double time_at(int n) const { return t0 + n * h; }
};

/// One Stratonovich step of the reduced horizontal + vertical dynamics.
/// Fiber variables (u,zbar) are refreshed through legendre_inv whenever the
/// time channel is active (dX[0] != 0) and frozen otherwise.
ReducedState step_reduced(const ReducedSystemSpec& spec, const ReducedState& s,
                          const Eigen::Ref<const Vec>& dX, const StepperConfig& cfg,
                          Vec* dxibar_out = nullptr, long step_index = -1);

ReducedTrajectory integrate_reduced(const ReducedSystemSpec& spec, const ReducedState& s0,
                                    const DrivingPath& path, const StepperConfig& cfg);

UnreducedState step_unreduced(const UnreducedSystemSpec& spec, const UnreducedState& s,
                              const Eigen::Ref<const Vec>& dX, const StepperConfig& cfg,
                              long step_index = -1);

UnreducedTrajectory integrate_unreduced(const UnreducedSystemSpec& spec, const UnreducedState& s0,
                                        const DrivingPath& path, const StepperConfig& cfg);

/// (x,g,v,xi,p_x,mu) -> (x, u=v, y = p_x - A^T mu, zbar = xi + A v, mubar = mu).
ReducedState project_state(const ConnectionField& conn, const UnreducedState& s);

/// Inverse of project_state at a chosen group element.
UnreducedState embed_state(const ConnectionField& conn, const ReducedState& s,
                           const GroupElement& g);

/// Projects every state; recovers dxibar from group log-increments plus the
/// connection applied to shape increments at the step midpoint.
ReducedTrajectory project_trajectory(const ConnectionField& conn, const GroupSpec& group,
                                     const UnreducedTrajectory& traj);

/// Midpoint-weighted discrete Stratonovich action along a trajectory.
double action_reduced(const ReducedSystemSpec& spec, const ReducedTrajectory& traj,
                      const DrivingPath& path);
double action_unreduced(const UnreducedSystemSpec& spec, const UnreducedTrajectory& traj,
                        const DrivingPath& path);

/// Left-translates every group component by g0 (states only).
UnreducedTrajectory shift_trajectory(const UnreducedTrajectory& traj, const GroupElement& g0);

/// CSV export, 17 significant digits.
/// Reduced header: t,x_0..,u_0..,y_0..,zbar_0..,mubar_0..
void write_reduced_csv(const ReducedTrajectory& traj, std::ostream& os);
/// Unreduced header: t,x_0..,v_0..,xi_0..,px_0..,mu_0..,g_0..
void write_unreduced_csv(const UnreducedTrajectory& traj, std::ostream& os);

}  // namespace lpstoch
