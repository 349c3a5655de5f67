#include "lpstoch/mechanics.hpp"

#include <cstdio>
#include <ostream>

namespace lpstoch {

namespace {

Vec zero_or(const std::function<Vec(const Vec&)>& f, const Vec& x, int n) {
    return f ? f(x) : Vec::Zero(n);
}

/// Splits a concatenated algebra vector into per-block segments.
std::vector<Vec> split_algebra(const GroupSpec& spec, const Vec& xi) {
    std::vector<Vec> out;
    int off = 0;
    for (auto k : spec.factors) {
        const int n = algebra_dim(k);
        out.push_back(xi.segment(off, n));
        off += n;
    }
    return out;
}

/// Reduced dynamics as a per-channel increment field on flat = [x, y, mubar].
/// aux records the formal xibar increment. The fiber variables (u, zbar) are
/// recomputed by Legendre inversion at each evaluation point when the step
/// has an active time channel, and frozen otherwise.
struct ReducedField {
    const ReducedSystemSpec& sp;
    bool time_active;
    Vec u_frozen, z_frozen;

    Increment operator()(const State& s, int j) const {
        const int r = sp.r, d = sp.d();
        const Vec x = s.flat.segment(0, r);
        const Vec y = s.flat.segment(r, r);
        const Vec mub = s.flat.segment(2 * r, d);
        Vec u, z;
        if (time_active)
            std::tie(u, z) = sp.legendre_inv(x, y, mub);
        else {
            u = u_frozen;
            z = z_frozen;
        }

        const Mat A = sp.conn.A(x);  // d x r
        const FiberPartials dl = sp.d_ell(x, u, z);
        const Tensor3 B = curvature(sp.conn, sp.C, x);

        Increment inc = Increment::zero_like(s, d);
        Vec dx, dxibar, dy;
        if (j == 0) {
            dx = u;
            dxibar = z;
            dy = dl.dx;
        } else {
            const NoiseChannel& ch = sp.noise[j - 1];
            const Vec Vi = zero_or(ch.V, x, r);
            const Vec bi = zero_or(ch.beta, x, d);
            const Vec bbar = A * Vi + bi;
            dx = Vi;
            dxibar = bbar;
            dy = ch.dl ? ch.dl(x) : Vec::Zero(r);
            if (ch.dV) dy -= ch.dV(x).transpose() * y;  // y_beta dV^beta/dx^alpha
            if (ch.dbeta) dy -= ch.dbeta(x).transpose() * mub;
            // mubar_a C^a_bd bbar^b A^d_alpha
            for (int al = 0; al < r; ++al) {
                double v = 0.0;
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        for (int e = 0; e < d; ++e) v += mub(a) * sp.C(a, b, e) * bbar(b) * A(e, al);
                dy(al) -= v;
            }
        }
        // curvature force mubar_a B^a_{alpha beta} dx^beta
        for (int al = 0; al < r; ++al) {
            double v = 0.0;
            for (int a = 0; a < d; ++a)
                for (int be = 0; be < r; ++be) v += mub(a) * B(a, al, be) * dx(be);
            dy(al) += v;
        }
        // -(dell/dzbar)_a C^a_db A^b_alpha dxibar^d
        for (int al = 0; al < r; ++al) {
            double v = 0.0;
            for (int a = 0; a < d; ++a)
                for (int e = 0; e < d; ++e)
                    for (int b = 0; b < d; ++b) v += dl.dzbar(a) * sp.C(a, e, b) * A(b, al) * dxibar(e);
            dy(al) -= v;
        }

        inc.flat.segment(0, r) = dx;
        inc.flat.segment(r, r) = dy;
        inc.flat.segment(2 * r, d) = coadjoint_covariant_increment(sp.C, sp.conn, x, mub, dxibar, dx);
        inc.aux = dxibar;
        return inc;
    }
};

/// Unreduced dynamics in body coordinates on flat = [x, p_x, mu] with one
/// group component; the algebra increment drives the group update.
struct UnreducedField {
    const UnreducedSystemSpec& sp;
    bool time_active;
    Vec v_frozen, xi_frozen;

    Increment operator()(const State& s, int j) const {
        const int r = sp.r, d = sp.d();
        const Vec x = s.flat.segment(0, r);
        const Vec p = s.flat.segment(r, r);
        const Vec mu = s.flat.segment(2 * r, d);
        Vec v, xi;
        if (time_active)
            std::tie(v, xi) = sp.legendre_inv(x, p, mu);
        else {
            v = v_frozen;
            xi = xi_frozen;
        }

        Increment inc = Increment::zero_like(s, 0);
        Vec dx, deta, dp;
        if (j == 0) {
            const FiberPartials dL = sp.d_L(x, v, xi);
            dx = v;
            deta = xi;
            dp = dL.dx;
        } else {
            const NoiseChannel& ch = sp.noise[j - 1];
            dx = zero_or(ch.V, x, r);
            deta = zero_or(ch.beta, x, d);
            dp = ch.dl ? ch.dl(x) : Vec::Zero(r);
            if (ch.dV) dp -= ch.dV(x).transpose() * p;
            if (ch.dbeta) dp -= ch.dbeta(x).transpose() * mu;
        }
        inc.flat.segment(0, r) = dx;
        inc.flat.segment(r, r) = dp;
        inc.flat.segment(2 * r, d) = coad(sp.C, deta, mu);
        inc.algebra = split_algebra(sp.group, deta);
        return inc;
    }
};

State pack_reduced(const ReducedSystemSpec& spec, const ReducedState& s) {
    State st;
    st.flat.resize(2 * spec.r + spec.d());
    st.flat.segment(0, spec.r) = s.x;
    st.flat.segment(spec.r, spec.r) = s.y;
    st.flat.segment(2 * spec.r, spec.d()) = s.mubar;
    return st;
}

State pack_unreduced(const UnreducedSystemSpec& spec, const UnreducedState& s) {
    State st;
    st.flat.resize(2 * spec.r + spec.d());
    st.flat.segment(0, spec.r) = s.x;
    st.flat.segment(spec.r, spec.r) = s.p_x;
    st.flat.segment(2 * spec.r, spec.d()) = s.mu;
    st.group.push_back(s.g);
    return st;
}

}  // namespace

ReducedState step_reduced(const ReducedSystemSpec& spec, const ReducedState& s,
                          const Eigen::Ref<const Vec>& dX, const StepperConfig& cfg,
                          Vec* dxibar_out, long step_index) {
    const bool time_active = dX(0) != 0.0;
    const ReducedField field{spec, time_active, s.u, s.zbar};
    auto [sn, inc] = strat_step(field, pack_reduced(spec, s), dX, cfg, spec.d(), step_index);
    ReducedState out;
    out.x = sn.flat.segment(0, spec.r);
    out.y = sn.flat.segment(spec.r, spec.r);
    out.mubar = sn.flat.segment(2 * spec.r, spec.d());
    if (time_active)
        std::tie(out.u, out.zbar) = spec.legendre_inv(out.x, out.y, out.mubar);
    else {
        out.u = s.u;
        out.zbar = s.zbar;
    }
    if (dxibar_out) *dxibar_out = inc.aux;
    return out;
}

ReducedTrajectory integrate_reduced(const ReducedSystemSpec& spec, const ReducedState& s0,
                                    const DrivingPath& path, const StepperConfig& cfg) {
    ReducedTrajectory traj;
    traj.t0 = path.t0;
    traj.h = path.h;
    traj.states.reserve(path.steps() + 1);
    traj.dxibar.reserve(path.steps());
    traj.states.push_back(s0);
    ReducedState s = s0;
    Vec dxibar;
    for (long n = 0; n < path.steps(); ++n) {
        s = step_reduced(spec, s, path.increments.row(n).transpose(), cfg, &dxibar, n);
        if (!(s.x.allFinite() && s.y.allFinite() && s.mubar.allFinite() && s.u.allFinite() &&
              s.zbar.allFinite()))
            throw IntegrationError("non-finite reduced state", n);
        traj.states.push_back(s);
        traj.dxibar.push_back(dxibar);
    }
    return traj;
}

UnreducedState step_unreduced(const UnreducedSystemSpec& spec, const UnreducedState& s,
                              const Eigen::Ref<const Vec>& dX, const StepperConfig& cfg,
                              long step_index) {
    const bool time_active = dX(0) != 0.0;
    const UnreducedField field{spec, time_active, s.v, s.xi};
    auto [sn, inc] = strat_step(field, pack_unreduced(spec, s), dX, cfg, 0, step_index);
    UnreducedState out;
    out.x = sn.flat.segment(0, spec.r);
    out.p_x = sn.flat.segment(spec.r, spec.r);
    out.mu = sn.flat.segment(2 * spec.r, spec.d());
    out.g = sn.group[0];
    if (time_active)
        std::tie(out.v, out.xi) = spec.legendre_inv(out.x, out.p_x, out.mu);
    else {
        out.v = s.v;
        out.xi = s.xi;
    }
    return out;
}

UnreducedTrajectory integrate_unreduced(const UnreducedSystemSpec& spec, const UnreducedState& s0,
                                        const DrivingPath& path, const StepperConfig& cfg) {
    UnreducedTrajectory traj;
    traj.t0 = path.t0;
    traj.h = path.h;
    traj.states.reserve(path.steps() + 1);
    traj.states.push_back(s0);
    UnreducedState s = s0;
    for (long n = 0; n < path.steps(); ++n) {
        s = step_unreduced(spec, s, path.increments.row(n).transpose(), cfg, n);
        if (!(s.x.allFinite() && s.p_x.allFinite() && s.mu.allFinite() && s.v.allFinite() &&
              s.xi.allFinite() && s.g.finite()))
            throw IntegrationError("non-finite unreduced state", n);
        traj.states.push_back(s);
    }
    return traj;
}

ReducedState project_state(const ConnectionField& conn, const UnreducedState& s) {
    ReducedState out;
    out.x = s.x;
    out.u = s.v;
    out.mubar = s.mu;
    if (conn.d > 0 && conn.r > 0) {
        const Mat A = conn.A(s.x);
        out.zbar = s.xi + A * s.v;
        out.y = s.p_x - A.transpose() * s.mu;
    } else {
        out.zbar = s.xi;
        out.y = s.p_x;
    }
    return out;
}

UnreducedState embed_state(const ConnectionField& conn, const ReducedState& s,
                           const GroupElement& g) {
    UnreducedState out;
    out.x = s.x;
    out.g = g;
    out.v = s.u;
    out.mu = s.mubar;
    if (conn.d > 0 && conn.r > 0) {
        const Mat A = conn.A(s.x);
        out.xi = s.zbar - A * s.u;
        out.p_x = s.y + A.transpose() * s.mubar;
    } else {
        out.xi = s.zbar;
        out.p_x = s.y;
    }
    return out;
}

ReducedTrajectory project_trajectory(const ConnectionField& conn, const GroupSpec& group,
                                     const UnreducedTrajectory& traj) {
    ReducedTrajectory out;
    out.t0 = traj.t0;
    out.h = traj.h;
    out.states.reserve(traj.states.size());
    for (const auto& s : traj.states) out.states.push_back(project_state(conn, s));
    out.dxibar.reserve(traj.steps());
    for (int n = 0; n < traj.steps(); ++n) {
        const auto& a = traj.states[n];
        const auto& b = traj.states[n + 1];
        Vec dxi = log_group(group, a.g.inverse().compose(b.g));
        if (conn.d > 0 && conn.r > 0) {
            const Vec xmid = 0.5 * (a.x + b.x);
            dxi += conn.A(xmid) * (b.x - a.x);
        }
        out.dxibar.push_back(dxi);
    }
    return out;
}

double action_reduced(const ReducedSystemSpec& spec, const ReducedTrajectory& traj,
                      const DrivingPath& path) {
    if (traj.steps() != path.steps())
        throw std::invalid_argument("action_reduced: trajectory/path length mismatch");
    const int r = spec.r, d = spec.d();
    double acc = 0.0;
    for (int n = 0; n < traj.steps(); ++n) {
        const auto& a = traj.states[n];
        const auto& b = traj.states[n + 1];
        const Vec xm = 0.5 * (a.x + b.x);
        const Vec um = 0.5 * (a.u + b.u);
        const Vec ym = 0.5 * (a.y + b.y);
        const Vec zm = 0.5 * (a.zbar + b.zbar);
        const Vec mm = 0.5 * (a.mubar + b.mubar);
        const double dX0 = path.increments(n, 0);

        double term = spec.ell(xm, um, zm) * dX0;
        Vec cx = (b.x - a.x) - um * dX0;       // shape constraint slack
        Vec cz = traj.dxibar[n] - zm * dX0;    // fiber constraint slack
        for (int i = 1; i < path.channels(); ++i) {
            const double dXi = path.increments(n, i);
            if (dXi == 0.0) continue;
            const NoiseChannel& ch = spec.noise[i - 1];
            if (ch.l) term += ch.l(xm) * dXi;
            if (ch.V) cx -= ch.V(xm) * dXi;
            Vec bbar = zero_or(ch.beta, xm, d);
            if (ch.V && d > 0 && r > 0) bbar += spec.conn.A(xm) * ch.V(xm);
            cz -= bbar * dXi;
        }
        term += ym.dot(cx) + mm.dot(cz);
        acc += term;
    }
    return acc;
}

double action_unreduced(const UnreducedSystemSpec& spec, const UnreducedTrajectory& traj,
                        const DrivingPath& path) {
    if (traj.steps() != path.steps())
        throw std::invalid_argument("action_unreduced: trajectory/path length mismatch");
    const int d = spec.d();
    double acc = 0.0;
    for (int n = 0; n < traj.steps(); ++n) {
        const auto& a = traj.states[n];
        const auto& b = traj.states[n + 1];
        const Vec xm = 0.5 * (a.x + b.x);
        const Vec vm = 0.5 * (a.v + b.v);
        const Vec xim = 0.5 * (a.xi + b.xi);
        const Vec pm = 0.5 * (a.p_x + b.p_x);
        const Vec mum = 0.5 * (a.mu + b.mu);
        const double dX0 = path.increments(n, 0);
        const Vec deta = log_group(spec.group, a.g.inverse().compose(b.g));

        double term = spec.L(xm, vm, xim) * dX0;
        Vec cx = (b.x - a.x) - vm * dX0;
        Vec cg = deta - xim * dX0;
        for (int i = 1; i < path.channels(); ++i) {
            const double dXi = path.increments(n, i);
            if (dXi == 0.0) continue;
            const NoiseChannel& ch = spec.noise[i - 1];
            if (ch.l) term += ch.l(xm) * dXi;
            if (ch.V) cx -= ch.V(xm) * dXi;
            if (ch.beta) cg -= ch.beta(xm) * dXi;
        }
        (void)d;
        term += pm.dot(cx) + mum.dot(cg);
        acc += term;
    }
    return acc;
}

UnreducedTrajectory shift_trajectory(const UnreducedTrajectory& traj, const GroupElement& g0) {
    UnreducedTrajectory out = traj;
    for (auto& s : out.states) s.g = g0.compose(s.g);
    return out;
}

namespace {

void write_row(std::ostream& os, double t, const std::vector<const Vec*>& parts) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", t);
    os << buf;
    for (const Vec* p : parts)
        for (int i = 0; i < p->size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", (*p)(i));
            os << ',' << buf;
        }
    os << '\n';
}

void write_header(std::ostream& os, const std::vector<std::pair<std::string, int>>& cols) {
    os << 't';
    for (const auto& [name, n] : cols)
        for (int i = 0; i < n; ++i) os << ',' << name << '_' << i;
    os << '\n';
}

}  // namespace

void write_reduced_csv(const ReducedTrajectory& traj, std::ostream& os) {
    if (traj.states.empty()) return;
    const auto& s0 = traj.states.front();
    write_header(os, {{"x", (int)s0.x.size()},
                      {"u", (int)s0.u.size()},
                      {"y", (int)s0.y.size()},
                      {"zbar", (int)s0.zbar.size()},
                      {"mubar", (int)s0.mubar.size()}});
    for (size_t n = 0; n < traj.states.size(); ++n) {
        const auto& s = traj.states[n];
        write_row(os, traj.time_at(static_cast<int>(n)), {&s.x, &s.u, &s.y, &s.zbar, &s.mubar});
    }
}

void write_unreduced_csv(const UnreducedTrajectory& traj, std::ostream& os) {
    if (traj.states.empty()) return;
    const auto& s0 = traj.states.front();
    int gcols = 0;
    for (int b = 0; b < s0.g.blocks(); ++b)
        gcols += s0.g.block(b).kind == GroupKind::Circle ? 1 : 9;
    write_header(os, {{"x", (int)s0.x.size()},
                      {"v", (int)s0.v.size()},
                      {"xi", (int)s0.xi.size()},
                      {"px", (int)s0.p_x.size()},
                      {"mu", (int)s0.mu.size()},
                      {"g", gcols}});
    Vec gflat(gcols);
    for (size_t n = 0; n < traj.states.size(); ++n) {
        const auto& s = traj.states[n];
        int off = 0;
        for (int b = 0; b < s.g.blocks(); ++b) {
            const auto& blk = s.g.block(b);
            if (blk.kind == GroupKind::Circle) {
                gflat(off++) = blk.angle;
            } else {
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) gflat(off++) = blk.R(i, j);
            }
        }
        write_row(os, traj.time_at(static_cast<int>(n)),
                  {&s.x, &s.v, &s.xi, &s.p_x, &s.mu, &gflat});
    }
}

}  // namespace lpstoch
