#include "lpstoch/systems.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lpstoch {

void RotorParams::validate() const {
    if (!(I1 > I2 && I2 > I3 && I3 > 0.0))
        throw std::invalid_argument("rotor: need I1 > I2 > I3 > 0");
    if (!(K1 == K2 && K1 > 0.0 && K3 > 0.0))
        throw std::invalid_argument("rotor: need K1 = K2 > 0 and K3 > 0");
}

namespace {

/// Lifts a scalar function of the rotor angle to a NoiseChannel slot.
std::function<double(const Vec&)> lift_scalar(const std::function<double(double)>& f) {
    if (!f) return nullptr;
    return [f](const Vec& x) { return f(x(0)); };
}
std::function<Vec(const Vec&)> lift_scalar_vec(const std::function<double(double)>& f) {
    if (!f) return nullptr;
    return [f](const Vec& x) { return Vec::Constant(1, f(x(0))); };
}
std::function<Mat(const Vec&)> lift_scalar_mat(const std::function<double(double)>& f) {
    if (!f) return nullptr;
    return [f](const Vec& x) { return Mat::Constant(1, 1, f(x(0))); };
}

std::vector<NoiseChannel> rotor_channels(const RotorParams& p) {
    std::vector<NoiseChannel> chans(3);
    for (int i = 0; i < 3; ++i) {
        const auto& n = p.rotor_noise[i];
        NoiseChannel ch;
        ch.l = lift_scalar(n.L);
        ch.dl = lift_scalar_vec(n.dL);
        ch.V = lift_scalar_vec(n.V);
        ch.dV = lift_scalar_mat(n.dV);
        const Vec3 b = p.beta[i];
        ch.beta = [b](const Vec&) { return Vec(b); };
        chans[i] = ch;
    }
    return chans;
}

}  // namespace

SystemPair make_rotor(const RotorParams& params) {
    params.validate();
    const double l1 = params.I1 + params.K1;
    const double l2 = params.I2 + params.K2;
    const double I3 = params.I3;
    const double K3 = params.K3;

    auto lagrangian = [l1, l2, I3, K3](const Vec&, const Vec& u, const Vec& z) {
        const double w = z(2) + u(0);
        return 0.5 * (l1 * z(0) * z(0) + l2 * z(1) * z(1) + I3 * z(2) * z(2) + K3 * w * w);
    };
    auto partials = [l1, l2, I3, K3](const Vec&, const Vec& u, const Vec& z) {
        FiberPartials p;
        const double w = z(2) + u(0);
        p.dx = Vec::Zero(1);
        p.du = Vec::Constant(1, K3 * w);
        p.dzbar = Vec(3);
        p.dzbar << l1 * z(0), l2 * z(1), I3 * z(2) + K3 * w;
        return p;
    };
    auto leg_inv = [l1, l2, I3, K3](const Vec&, const Vec& y, const Vec& mu) {
        Vec z(3);
        z << mu(0) / l1, mu(1) / l2, (mu(2) - y(0)) / I3;
        Vec u = Vec::Constant(1, y(0) / K3 - z(2));
        return std::make_pair(u, z);
    };

    SystemPair sys;
    sys.name = "rotor";
    sys.red.r = 1;
    sys.red.group = GroupSpec::so3();
    sys.red.C = sys.red.group.structure_constants();
    sys.red.conn = ConnectionField::zero(3, 1);
    sys.red.ell = lagrangian;
    sys.red.d_ell = partials;
    sys.red.legendre_inv = leg_inv;
    sys.red.noise = rotor_channels(params);

    sys.unred.r = 1;
    sys.unred.group = sys.red.group;
    sys.unred.C = sys.red.C;
    sys.unred.L = lagrangian;
    sys.unred.d_L = partials;
    sys.unred.legendre_inv = leg_inv;
    sys.unred.noise = sys.red.noise;

    sys.s0.x = Vec::Constant(1, params.theta0);
    sys.s0.u = Vec::Constant(1, params.u0);
    sys.s0.zbar = Vec(params.Sigma0);
    const FiberPartials p0 = partials(sys.s0.x, sys.s0.u, sys.s0.zbar);
    sys.s0.y = p0.du;
    sys.s0.mubar = p0.dzbar;
    sys.g0 = GroupElement::identity(sys.red.group);
    sys.has_casimir = false;

    sys.mc.observable = "y";
    sys.mc.components = {"y"};
    sys.mc.eval = [](const ReducedState& s) { return Vec(s.y); };
    return sys;
}

SystemPair make_free_rigid_body(const Vec3& inertia, const std::array<Vec3, 3>& beta,
                                const Vec3& Pi0) {
    if (!(inertia.minCoeff() > 0.0))
        throw std::invalid_argument("free rigid body: inertia must be positive");
    const Vec3 I = inertia;

    auto lagrangian = [I](const Vec&, const Vec&, const Vec& z) {
        return 0.5 * (I(0) * z(0) * z(0) + I(1) * z(1) * z(1) + I(2) * z(2) * z(2));
    };
    auto partials = [I](const Vec&, const Vec&, const Vec& z) {
        FiberPartials p;
        p.dx = Vec::Zero(0);
        p.du = Vec::Zero(0);
        p.dzbar = Vec(3);
        p.dzbar << I(0) * z(0), I(1) * z(1), I(2) * z(2);
        return p;
    };
    auto leg_inv = [I](const Vec&, const Vec&, const Vec& mu) {
        Vec z(3);
        z << mu(0) / I(0), mu(1) / I(1), mu(2) / I(2);
        return std::make_pair(Vec::Zero(0).eval(), z);
    };

    SystemPair sys;
    sys.name = "free-rigid-body";
    sys.red.r = 0;
    sys.red.group = GroupSpec::so3();
    sys.red.C = sys.red.group.structure_constants();
    sys.red.conn = ConnectionField::zero(3, 0);
    sys.red.ell = lagrangian;
    sys.red.d_ell = partials;
    sys.red.legendre_inv = leg_inv;
    for (int i = 0; i < 3; ++i) {
        NoiseChannel ch;
        const Vec3 b = beta[i];
        ch.beta = [b](const Vec&) { return Vec(b); };
        sys.red.noise.push_back(ch);
    }

    sys.unred.r = 0;
    sys.unred.group = sys.red.group;
    sys.unred.C = sys.red.C;
    sys.unred.L = lagrangian;
    sys.unred.d_L = partials;
    sys.unred.legendre_inv = leg_inv;
    sys.unred.noise = sys.red.noise;

    sys.s0.x = Vec::Zero(0);
    sys.s0.u = Vec::Zero(0);
    sys.s0.y = Vec::Zero(0);
    sys.s0.mubar = Vec(Pi0);
    sys.s0.zbar = leg_inv(sys.s0.x, sys.s0.y, sys.s0.mubar).second;
    sys.g0 = GroupElement::identity(sys.red.group);
    sys.has_casimir = true;

    sys.mc.observable = "PiNormSq";
    sys.mc.components = {"PiNormSq"};
    sys.mc.eval = [](const ReducedState& s) {
        return Vec(Vec::Constant(1, s.mubar.squaredNorm()));
    };
    return sys;
}

KKParams KKParams::constant_field(const Vec3& B) {
    KKParams p;
    p.A_vec = [B](const Vec3& x) { return Vec3(0.5 * B.cross(x)); };
    p.dA_vec = [B](const Vec3&) { return Mat3(0.5 * hat(B)); };
    p.chans.resize(3);
    for (int i = 0; i < 3; ++i) {
        p.chans[i].L = [i](const Vec3& x) { return x(i); };
        p.chans[i].dL = [i](const Vec3&) { return Vec3(Vec3::Unit(i)); };
    }
    return p;
}

std::pair<Vec3, Vec3> larmor_solution(const Vec3& x0, const Vec3& u0, const Vec3& B,
                                      double e_over_c, double t) {
    const double Bn = B.norm();
    const double omega = e_over_c * Bn;
    if (std::abs(omega) < 1e-300) return {Vec3(x0 + t * u0), u0};
    const Vec3 b = B / Bn;
    const Vec3 upar = u0.dot(b) * b;
    const Vec3 uperp = u0 - upar;
    const Vec3 w = uperp.cross(b);
    const double c = std::cos(omega * t), s = std::sin(omega * t);
    const Vec3 u = upar + c * uperp + s * w;
    const Vec3 x = x0 + t * upar + (s * uperp + (1.0 - c) * w) / omega;
    return {x, u};
}

SystemPair make_charged_particle(const KKParams& params) {
    if (!params.A_vec) throw std::invalid_argument("charged particle: A_vec required");
    const double eoc = params.e_over_c;
    auto Avec = params.A_vec;

    auto Arow = [Avec](const Vec& x) {
        Mat A(1, 3);
        A.row(0) = Avec(Vec3(x)).transpose();
        return A;
    };

    SystemPair sys;
    sys.name = "charged-particle";
    sys.red.r = 3;
    sys.red.group = GroupSpec::circle();
    sys.red.C = sys.red.group.structure_constants();
    if (params.dA_vec) {
        auto dAv = params.dA_vec;
        sys.red.conn = ConnectionField::analytic(1, 3, Arow, [dAv](const Vec& x) {
            const Mat3 J = dAv(Vec3(x));
            Tensor3 t(1, 3, 3);
            for (int al = 0; al < 3; ++al)
                for (int be = 0; be < 3; ++be) t(0, al, be) = J(al, be);
            return t;
        });
    } else {
        sys.red.conn = ConnectionField::finite_difference(1, 3, Arow);
    }

    sys.red.ell = [](const Vec&, const Vec& u, const Vec& z) {
        return 0.5 * (u.squaredNorm() + z(0) * z(0));
    };
    sys.red.d_ell = [](const Vec&, const Vec& u, const Vec& z) {
        FiberPartials p;
        p.dx = Vec::Zero(3);
        p.du = u;
        p.dzbar = Vec::Constant(1, z(0));
        return p;
    };
    sys.red.legendre_inv = [](const Vec&, const Vec& y, const Vec& mu) {
        return std::make_pair(Vec(y), Vec(mu));
    };
    for (const auto& c : params.chans) {
        NoiseChannel ch;
        if (c.L) ch.l = [f = c.L](const Vec& x) { return f(Vec3(x)); };
        if (c.dL) ch.dl = [f = c.dL](const Vec& x) { return Vec(f(Vec3(x))); };
        if (c.V) ch.V = [f = c.V](const Vec& x) { return Vec(f(Vec3(x))); };
        if (c.dV) ch.dV = [f = c.dV](const Vec& x) { return Mat(f(Vec3(x))); };
        sys.red.noise.push_back(ch);
    }

    sys.unred.r = 3;
    sys.unred.group = sys.red.group;
    sys.unred.C = sys.red.C;
    sys.unred.L = [Avec](const Vec& x, const Vec& v, const Vec& xi) {
        const double m = Avec(Vec3(x)).dot(Vec3(v)) + xi(0);
        return 0.5 * (v.squaredNorm() + m * m);
    };
    {
        auto dA_of = [&]() -> std::function<Mat3(const Vec3&)> {
            if (params.dA_vec) return params.dA_vec;
            auto conn = sys.red.conn;  // reuse the finite-difference dA
            return [conn](const Vec3& x) {
                const Tensor3 t = conn.dA(Vec(x));
                Mat3 J;
                for (int al = 0; al < 3; ++al)
                    for (int be = 0; be < 3; ++be) J(al, be) = t(0, al, be);
                return J;
            };
        };
        auto dAv = dA_of();
        sys.unred.d_L = [Avec, dAv](const Vec& x, const Vec& v, const Vec& xi) {
            const Vec3 a = Avec(Vec3(x));
            const double m = a.dot(Vec3(v)) + xi(0);
            FiberPartials p;
            p.dx = Vec(m * (dAv(Vec3(x)).transpose() * Vec3(v)));
            p.du = v + m * Vec(a);
            p.dzbar = Vec::Constant(1, m);
            return p;
        };
        sys.unred.legendre_inv = [Avec](const Vec& x, const Vec& px, const Vec& mu) {
            const Vec3 a = Avec(Vec3(x));
            Vec v = px - mu(0) * Vec(a);
            Vec xi = Vec::Constant(1, mu(0) - a.dot(Vec3(v)));
            return std::make_pair(v, xi);
        };
    }
    sys.unred.noise = sys.red.noise;

    sys.s0.x = Vec(params.x0);
    sys.s0.u = Vec(params.u0);
    sys.s0.y = Vec(params.u0);
    sys.s0.zbar = Vec::Constant(1, eoc);
    sys.s0.mubar = Vec::Constant(1, eoc);
    sys.g0 = GroupElement::identity(sys.red.group);
    sys.has_casimir = false;

    sys.mc.observable = "x,u";
    sys.mc.components = {"x_0", "x_1", "x_2", "u_0", "u_1", "u_2"};
    sys.mc.eval = [](const ReducedState& s) {
        Vec out(6);
        out.segment(0, 3) = s.x;
        out.segment(3, 3) = s.u;
        return out;
    };
    return sys;
}

namespace {

double get_or(const std::map<std::string, double>& m, const std::string& key, double dflt,
              std::map<std::string, double>& unused) {
    auto it = m.find(key);
    if (it == m.end()) return dflt;
    unused.erase(key);
    return it->second;
}

void finish_overrides(const std::map<std::string, double>& unused, const std::string& system) {
    if (unused.empty()) return;
    std::ostringstream os;
    os << "unknown override(s) for system '" << system << "':";
    for (const auto& [k, v] : unused) os << ' ' << k;
    throw std::invalid_argument(os.str());
}

RotorParams rotor_defaults(const std::map<std::string, double>& ov,
                           std::map<std::string, double>& unused, bool with_LV) {
    RotorParams p;
    p.I1 = get_or(ov, "I1", p.I1, unused);
    p.I2 = get_or(ov, "I2", p.I2, unused);
    p.I3 = get_or(ov, "I3", p.I3, unused);
    p.K1 = get_or(ov, "K1", p.K1, unused);
    p.K2 = get_or(ov, "K2", p.K2, unused);
    p.K3 = get_or(ov, "K3", p.K3, unused);
    p.theta0 = get_or(ov, "theta0", p.theta0, unused);
    p.Sigma0 = Vec3(get_or(ov, "S1", p.Sigma0(0), unused), get_or(ov, "S2", p.Sigma0(1), unused),
                    get_or(ov, "S3", p.Sigma0(2), unused));
    p.u0 = get_or(ov, "u0", -p.Sigma0(2), unused);
    const double bs = get_or(ov, "beta_scale", 0.1, unused);
    for (int i = 0; i < 3; ++i) p.beta[i] = bs * Vec3::Unit(i);
    if (with_LV) {
        const double cL = get_or(ov, "noise_L", 0.1, unused);
        const double cV = get_or(ov, "noise_V", 0.1, unused);
        for (int i = 0; i < 3; ++i) {
            const double phi = 2.0 * M_PI * i / 3.0;
            p.rotor_noise[i].L = [cL, phi](double th) { return cL * std::sin(th + phi); };
            p.rotor_noise[i].dL = [cL, phi](double th) { return cL * std::cos(th + phi); };
            p.rotor_noise[i].V = [cV, phi](double th) { return cV * std::cos(th + phi); };
            p.rotor_noise[i].dV = [cV, phi](double th) { return -cV * std::sin(th + phi); };
        }
    }
    return p;
}

std::map<std::string, double> as_unused(const std::map<std::string, double>& ov) { return ov; }

}  // namespace

std::vector<std::string> system_names() {
    return {"rotor",           "rotor-case1", "rotor-case2",
            "rotor-case3",     "free-rigid-body", "charged-particle"};
}

SystemPair make_system(const std::string& name, const std::map<std::string, double>& overrides) {
    auto unused = as_unused(overrides);
    if (name == "rotor" || name == "rotor-case2") {
        RotorParams p = rotor_defaults(overrides, unused, true);
        if (name == "rotor-case2")
            for (auto& b : p.beta) b.setZero();
        finish_overrides(unused, name);
        SystemPair sys = make_rotor(p);
        sys.name = name;
        return sys;
    }
    if (name == "rotor-case1") {
        RotorParams p = rotor_defaults(overrides, unused, false);
        finish_overrides(unused, name);
        SystemPair sys = make_rotor(p);
        sys.name = name;
        return sys;
    }
    if (name == "rotor-case3") {
        RotorParams p = rotor_defaults(overrides, unused, false);
        for (int i = 0; i < 3; ++i) {
            p.rotor_noise[i].L = [](double th) { return th; };
            p.rotor_noise[i].dL = [](double) { return 1.0; };
        }
        finish_overrides(unused, name);
        SystemPair sys = make_rotor(p);
        sys.name = name;
        // E[y_T] = 0: y integrates the summed Brownian increments exactly
        sys.mc.criterion = [](const EnsembleReport& rep) {
            const double m = rep.final_mean(0), s = rep.final_sem(0);
            const bool pass = std::abs(m) <= 3.0 * s + 1e-12;
            std::ostringstream os;
            os << "|E[y_T]| = " << std::abs(m) << (pass ? " <= " : " > ") << "3*stderr = " << 3.0 * s;
            return std::make_pair(pass, os.str());
        };
        return sys;
    }
    if (name == "free-rigid-body") {
        const Vec3 I(get_or(overrides, "I1", 3.0, unused), get_or(overrides, "I2", 2.0, unused),
                     get_or(overrides, "I3", 1.0, unused));
        const double bs = get_or(overrides, "beta_scale", 0.1, unused);
        const Vec3 Pi0(get_or(overrides, "P1", 0.9, unused), get_or(overrides, "P2", 0.8, unused),
                       get_or(overrides, "P3", 0.5, unused));
        finish_overrides(unused, name);
        return make_free_rigid_body(I, {bs * Vec3::Unit(0), bs * Vec3::Unit(1), bs * Vec3::Unit(2)},
                                    Pi0);
    }
    if (name == "charged-particle") {
        const Vec3 B(get_or(overrides, "B1", 0.0, unused), get_or(overrides, "B2", 0.0, unused),
                     get_or(overrides, "B3", 1.0, unused));
        KKParams p = KKParams::constant_field(B);
        p.e_over_c = get_or(overrides, "e_over_c", 1.0, unused);
        p.x0 = Vec3(get_or(overrides, "x01", 1.0, unused), get_or(overrides, "x02", 0.0, unused),
                    get_or(overrides, "x03", 0.0, unused));
        p.u0 = Vec3(get_or(overrides, "u01", 0.0, unused), get_or(overrides, "u02", 1.0, unused),
                    get_or(overrides, "u03", 0.0, unused));
        finish_overrides(unused, name);
        SystemPair sys = make_charged_particle(p);
        // ensemble means follow the deterministic Lorentz solution
        const Vec3 x0 = p.x0, u0 = p.u0;
        const double eoc = p.e_over_c;
        sys.mc.criterion = [x0, u0, B, eoc](const EnsembleReport& rep) {
            auto [xT, uT] = larmor_solution(x0, u0, B, eoc, rep.times.back());
            bool pass = true;
            double worst = 0.0;
            for (int c = 0; c < 6; ++c) {
                const double target = c < 3 ? xT(c) : uT(c - 3);
                const double dev = std::abs(rep.final_mean(c) - target);
                const double tol = 3.0 * rep.final_sem(c) + 1e-12;
                worst = std::max(worst, tol > 0 ? dev / tol : dev);
                pass = pass && dev <= tol;
            }
            std::ostringstream os;
            os << "max |mean - larmor| / (3*stderr) = " << worst;
            return std::make_pair(pass, os.str());
        };
        return sys;
    }
    throw std::invalid_argument("unknown system: " + name);
}

}  // namespace lpstoch
