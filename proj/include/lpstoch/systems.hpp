#pragma once

#include <array>
#include <map>
#include <optional>

#include "lpstoch/mechanics.hpp"
#include "lpstoch/reports.hpp"

namespace lpstoch {

/// Observable tracked by Monte-Carlo runs, with an optional acceptance
/// criterion evaluated on the finished ensemble report.
struct McSpec {
    std::string observable = "state";
    std::vector<std::string> components;
    std::function<Vec(const ReducedState&)> eval;
    std::function<std::pair<bool, std::string>(const EnsembleReport&)> criterion;
};

/// A bundled example: matching reduced and unreduced descriptions plus a
/// default initial condition and verification hooks.
struct SystemPair {
    std::string name;
    ReducedSystemSpec red;
    UnreducedSystemSpec unred;
    ReducedState s0;
    GroupElement g0;
    McSpec mc;
    bool has_casimir = false;  // |mubar|^2 invariant under the vertical flow
};

/// Rigid body with a rotor on its third principal axis; configuration
/// S^1 x SO(3), reduced by SO(3) with the trivializing connection.
struct RotorParams {
    double I1 = 3.0, I2 = 2.0, I3 = 1.0;  // body inertia, I1 > I2 > I3
    double K1 = 1.0, K2 = 1.0, K3 = 0.5;  // rotor inertia, K1 = K2
    std::array<Vec3, 3> beta{Vec3(0.1, 0, 0), Vec3(0, 0.1, 0), Vec3(0, 0, 0.1)};

    struct RotorNoise {
        std::function<double(double)> L, dL;  // potential on the rotor angle
        std::function<double(double)> V, dV;  // velocity perturbation field
    };
    std::array<RotorNoise, 3> rotor_noise;  // null members are zero

    double theta0 = 0.0;
    Vec3 Sigma0{0.4, 0.3, 0.2};
    double u0 = -0.2;  // makes y0 = K3 (Sigma3 + u0) = 0

    void validate() const;
};

SystemPair make_rotor(const RotorParams& params);

/// Free rigid body (configuration = symmetry group = SO(3)); shape space is
/// a point, only the vertical equations remain.
SystemPair make_free_rigid_body(const Vec3& inertia, const std::array<Vec3, 3>& beta,
                                const Vec3& Pi0 = Vec3(0.9, 0.8, 0.5));

/// Charged particle in a magnetic field, Kaluza-Klein form on R^3 x S^1
/// reduced by S^1; the connection encodes the vector potential and its
/// curvature the magnetic field.
struct KKParams {
    std::function<Vec3(const Vec3&)> A_vec;   // vector potential
    std::function<Mat3(const Vec3&)> dA_vec;  // Jacobian dA_i/dx_j; finite differences if null
    double e_over_c = 1.0;

    struct Chan {
        std::function<double(const Vec3&)> L;
        std::function<Vec3(const Vec3&)> dL;
        std::function<Vec3(const Vec3&)> V;
        std::function<Mat3(const Vec3&)> dV;
    };
    std::vector<Chan> chans;

    Vec3 x0{1.0, 0.0, 0.0};
    Vec3 u0{0.0, 1.0, 0.0};

    /// A = B x x / 2 with the given constant field, channels L_i(x) = x^i.
    static KKParams constant_field(const Vec3& B);
};

SystemPair make_charged_particle(const KKParams& params);

/// Closed-form trajectory of du/dt = (e/c) u x B, dx/dt = u with constant B.
std::pair<Vec3, Vec3> larmor_solution(const Vec3& x0, const Vec3& u0, const Vec3& B,
                                      double e_over_c, double t);

std::vector<std::string> system_names();

/// Registry lookup; overrides are flat numeric keys, e.g. {"I1", 3.0} or
/// {"beta_scale", 0.0}. Unknown names or keys throw std::invalid_argument.
SystemPair make_system(const std::string& name,
                       const std::map<std::string, double>& overrides = {});

}  // namespace lpstoch
