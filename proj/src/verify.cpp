#include "lpstoch/verify.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <random>
#include <sstream>

#ifdef LPSTOCH_HAVE_OPENMP
#include <omp.h>
#endif

namespace lpstoch {

int resolve_threads() {
    if (const char* env = std::getenv("LPSTOCH_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
#ifdef LPSTOCH_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

double pairwise_sum(const double* v, long n) {
    if (n <= 8) {
        double s = 0.0;
        for (long i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const long m = n / 2;
    return pairwise_sum(v, m) + pairwise_sum(v + m, n - m);
}

namespace {

std::vector<long> slice_indices(long N, int slices) {
    const int S = static_cast<int>(std::min<long>(slices, N));
    std::vector<long> idx;
    idx.push_back(0);
    for (int j = 1; j <= S; ++j) {
        const long n = (N * j) / S;
        if (n > idx.back()) idx.push_back(n);
    }
    return idx;
}

EnsembleReport mc_impl(const SystemPair& sys, const McSpec& mc, const EnsembleConfig& cfg,
                       int threads) {
    if (cfg.trials < 2) throw std::invalid_argument("monte_carlo: need at least 2 trials");
    if (!(cfg.h > 0.0 && cfg.T >= cfg.h)) throw std::invalid_argument("monte_carlo: bad T or h");
    const long N = std::lround(cfg.T / cfg.h);
    const int k = sys.red.k();
    const std::vector<long> idx = slice_indices(N, cfg.slices);
    const int S = static_cast<int>(idx.size());
    const int w = static_cast<int>(mc.eval(sys.s0).size());
    const long trials = cfg.trials;

    std::vector<double> data(static_cast<size_t>(trials) * S * w);
    std::vector<std::string> failures(static_cast<size_t>(trials));

#ifdef LPSTOCH_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (long trial = 0; trial < trials; ++trial) {
        try {
            const DrivingPath path =
                make_time_brownian(derive_seed(cfg.seed, static_cast<std::uint64_t>(trial)),
                                   cfg.h, static_cast<int>(N), k);
            ReducedState s = sys.s0;
            double* row = data.data() + static_cast<size_t>(trial) * S * w;
            Eigen::Map<Vec>(row, w) = mc.eval(s);
            int next = 1;
            for (long n = 0; n < N; ++n) {
                s = step_reduced(sys.red, s, path.increments.row(n).transpose(), cfg.step,
                                 nullptr, n);
                if (!(s.x.allFinite() && s.y.allFinite() && s.mubar.allFinite()))
                    throw IntegrationError("non-finite reduced state", n);
                if (next < S && n + 1 == idx[next]) {
                    Eigen::Map<Vec>(row + static_cast<size_t>(next) * w, w) = mc.eval(s);
                    ++next;
                }
            }
        } catch (const std::exception& e) {
            failures[trial] = e.what();
        }
    }
    for (long trial = 0; trial < trials; ++trial)
        if (!failures[trial].empty())
            throw std::runtime_error("monte_carlo: trial " + std::to_string(trial) + ": " +
                                     failures[trial]);

    EnsembleReport rep;
    rep.trials = trials;
    rep.observable = mc.observable;
    rep.components = mc.components;
    rep.times.resize(S);
    for (int j = 0; j < S; ++j) rep.times[j] = idx[j] * cfg.h;
    rep.mean = Mat(S, w);
    rep.sem = Mat(S, w);
    std::vector<double> buf(trials);
    for (int j = 0; j < S; ++j)
        for (int c = 0; c < w; ++c) {
            for (long trial = 0; trial < trials; ++trial)
                buf[trial] = data[(static_cast<size_t>(trial) * S + j) * w + c];
            const double mean = pairwise_sum(buf.data(), trials) / trials;
            for (long trial = 0; trial < trials; ++trial)
                buf[trial] = (buf[trial] - mean) * (buf[trial] - mean);
            const double var = pairwise_sum(buf.data(), trials) / (trials - 1);
            rep.mean(j, c) = mean;
            rep.sem(j, c) = std::sqrt(var / trials);
        }
    return rep;
}

}  // namespace

EnsembleReport monte_carlo(const SystemPair& sys, const McSpec& mc, const EnsembleConfig& cfg) {
    return mc_impl(sys, mc, cfg, resolve_threads());
}

EnsembleReport monte_carlo(const SystemPair& sys, const EnsembleConfig& cfg) {
    return mc_impl(sys, sys.mc, cfg, resolve_threads());
}

EnsembleReport monte_carlo_serial(const SystemPair& sys, const McSpec& mc,
                                  const EnsembleConfig& cfg) {
    return mc_impl(sys, mc, cfg, 1);
}

namespace {

double state_dist(const ReducedState& a, const ReducedState& b) {
    double s = (a.x - b.x).squaredNorm() + (a.u - b.u).squaredNorm() +
               (a.y - b.y).squaredNorm() + (a.zbar - b.zbar).squaredNorm() +
               (a.mubar - b.mubar).squaredNorm();
    return std::sqrt(s);
}

}  // namespace

ConvergenceReport compare_reduced_unreduced(const SystemPair& sys, const CompareConfig& cfg) {
    const int k = sys.red.k();
    const long N0 = std::lround(cfg.T / cfg.h0);
    if (N0 < 1) throw std::invalid_argument("compare: h0 exceeds T");
    if (cfg.levels < 1) throw std::invalid_argument("compare: need at least one level");
    const long Nref = N0 << cfg.levels;
    const double href = cfg.T / static_cast<double>(Nref);

    const int L = cfg.levels;
    const long P = std::max(1, cfg.paths);
    std::vector<double> disc(static_cast<size_t>(P) * L), err(static_cast<size_t>(P) * L);
    std::vector<std::string> failures(static_cast<size_t>(P));

#ifdef LPSTOCH_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(resolve_threads())
#endif
    for (long p = 0; p < P; ++p) {
        try {
            DrivingPath fine = make_time_brownian(derive_seed(cfg.seed, static_cast<std::uint64_t>(p)),
                                                  href, static_cast<int>(Nref), k);
            if (!cfg.with_noise) fine = zero_noise(fine);
            ReducedTrajectory ref;
            if (cfg.unreduced_reference) {
                const UnreducedState us0 = embed_state(sys.red.conn, sys.s0, sys.g0);
                ref = project_trajectory(sys.red.conn, sys.red.group,
                                         integrate_unreduced(sys.unred, us0, fine, cfg.step));
            } else {
                ref = integrate_reduced(sys.red, sys.s0, fine, cfg.step);
            }
            for (int l = 0; l < L; ++l) {
                const long factor = 1L << (cfg.levels - l);
                const DrivingPath pl = coarsen(fine, static_cast<int>(factor));
                const ReducedTrajectory red = integrate_reduced(sys.red, sys.s0, pl, cfg.step);
                const UnreducedState us0 = embed_state(sys.red.conn, sys.s0, sys.g0);
                const ReducedTrajectory proj = project_trajectory(
                    sys.red.conn, sys.red.group,
                    integrate_unreduced(sys.unred, us0, pl, cfg.step));
                double dmax = 0.0, emax = 0.0;
                for (size_t n = 0; n < red.states.size(); ++n) {
                    dmax = std::max(dmax, state_dist(proj.states[n], red.states[n]));
                    emax = std::max(emax, state_dist(proj.states[n], ref.states[n * factor]));
                }
                disc[static_cast<size_t>(p) * L + l] = dmax;
                err[static_cast<size_t>(p) * L + l] = emax;
            }
        } catch (const std::exception& e) {
            failures[p] = e.what();
        }
    }
    for (long p = 0; p < P; ++p)
        if (!failures[p].empty())
            throw std::runtime_error("compare: path " + std::to_string(p) + ": " + failures[p]);

    ConvergenceReport rep;
    std::vector<std::pair<double, double>> fit;
    std::vector<double> buf(P);
    for (int l = 0; l < L; ++l) {
        ConvergenceLevel lev;
        lev.h = cfg.T / static_cast<double>(N0 << l);
        for (long p = 0; p < P; ++p) buf[p] = disc[static_cast<size_t>(p) * L + l];
        lev.discrepancy = pairwise_sum(buf.data(), P) / P;
        for (long p = 0; p < P; ++p) buf[p] = err[static_cast<size_t>(p) * L + l];
        lev.err_vs_ref = pairwise_sum(buf.data(), P) / P;
        rep.levels.push_back(lev);
        fit.emplace_back(lev.h, lev.err_vs_ref);
    }
    rep.fitted_order = fit_loglog_order(fit);
    return rep;
}

double check_casimir(const SystemPair& sys, double T, double h, std::uint64_t seed,
                     const StepperConfig& step) {
    const long N = std::lround(T / h);
    const DrivingPath path = make_time_brownian(seed, h, static_cast<int>(N), sys.red.k());
    ReducedState s = sys.s0;
    const double c0 = s.mubar.squaredNorm();
    if (c0 == 0.0) throw std::invalid_argument("check_casimir: |mubar(0)| must be nonzero");
    double worst = 0.0;
    for (long n = 0; n < N; ++n) {
        s = step_reduced(sys.red, s, path.increments.row(n).transpose(), step, nullptr, n);
        worst = std::max(worst, std::abs(s.mubar.squaredNorm() - c0) / c0);
    }
    return worst;
}

namespace {

struct GradProbe {
    double worst = 0.0;
    void record(double analytic, double fd) {
        const double denom = std::max({1.0, std::abs(analytic), std::abs(fd)});
        worst = std::max(worst, std::abs(analytic - fd) / denom);
    }
};

constexpr double kFdStep = 1e-5;

template <class F>
double central_diff(F&& f, Vec& x, int i) {
    const double x0 = x(i);
    x(i) = x0 + kFdStep;
    const double fp = f();
    x(i) = x0 - kFdStep;
    const double fm = f();
    x(i) = x0;
    return (fp - fm) / (2.0 * kFdStep);
}

}  // namespace

double check_gradients(const SystemPair& sys, std::uint64_t seed, int points) {
    std::mt19937_64 rng(derive_seed(seed, 7701));
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    const int r = sys.red.r, d = sys.red.d();
    GradProbe probe;

    for (int p = 0; p < points; ++p) {
        Vec x = sys.s0.x, u = sys.s0.u, z = sys.s0.zbar;
        for (int i = 0; i < r; ++i) x(i) += unif(rng);
        for (int i = 0; i < r; ++i) u(i) += unif(rng);
        for (int i = 0; i < d; ++i) z(i) += unif(rng);

        {  // reduced Lagrangian partials
            const FiberPartials g = sys.red.d_ell(x, u, z);
            for (int i = 0; i < r; ++i)
                probe.record(g.dx(i), central_diff([&] { return sys.red.ell(x, u, z); }, x, i));
            for (int i = 0; i < r; ++i)
                probe.record(g.du(i), central_diff([&] { return sys.red.ell(x, u, z); }, u, i));
            for (int i = 0; i < d; ++i)
                probe.record(g.dzbar(i), central_diff([&] { return sys.red.ell(x, u, z); }, z, i));
        }
        {  // trivialized Lagrangian partials
            const FiberPartials g = sys.unred.d_L(x, u, z);
            for (int i = 0; i < r; ++i)
                probe.record(g.dx(i), central_diff([&] { return sys.unred.L(x, u, z); }, x, i));
            for (int i = 0; i < r; ++i)
                probe.record(g.du(i), central_diff([&] { return sys.unred.L(x, u, z); }, u, i));
            for (int i = 0; i < d; ++i)
                probe.record(g.dzbar(i), central_diff([&] { return sys.unred.L(x, u, z); }, z, i));
        }
        for (const NoiseChannel& ch : sys.red.noise) {
            if (ch.l && ch.dl) {
                const Vec g = ch.dl(x);
                for (int i = 0; i < r; ++i)
                    probe.record(g(i), central_diff([&] { return ch.l(x); }, x, i));
            }
            if (ch.V && ch.dV) {
                const Mat J = ch.dV(x);
                for (int c = 0; c < r; ++c)
                    for (int i = 0; i < r; ++i)
                        probe.record(J(c, i), central_diff([&] { return ch.V(x)(c); }, x, i));
            }
            if (ch.beta && ch.dbeta) {
                const Mat J = ch.dbeta(x);
                for (int c = 0; c < d; ++c)
                    for (int i = 0; i < r; ++i)
                        probe.record(J(c, i), central_diff([&] { return ch.beta(x)(c); }, x, i));
            }
        }
        if (r > 0 && d > 0) {  // connection coefficients against their derivative field
            const Tensor3 dA = sys.red.conn.dA(x);
            for (int a = 0; a < d; ++a)
                for (int al = 0; al < r; ++al)
                    for (int be = 0; be < r; ++be)
                        probe.record(dA(a, al, be),
                                     central_diff([&] { return sys.red.conn.A(x)(a, al); }, x, be));
        }
    }
    return probe.worst;
}

namespace {

GroupElement random_shift(const GroupSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-M_PI, M_PI);
    Vec xi(spec.dim());
    for (int i = 0; i < xi.size(); ++i) xi(i) = unif(rng);
    return exp_group(spec, xi);
}

}  // namespace

std::vector<CheckResult> run_system_checks(const SystemPair& sys, std::uint64_t seed) {
    std::vector<CheckResult> out;
    auto push = [&out](const std::string& name, double value, double threshold) {
        out.push_back({name, value, threshold, value <= threshold});
    };

    push("gradient-fidelity", check_gradients(sys, seed), 1e-6);
    push("structure-antisymmetry", antisymmetry_defect(sys.red.C), 0.0);
    push("jacobi-identity", jacobi_defect(sys.red.C), 1e-12);

    {  // curvature antisymmetry at sampled shape points
        std::mt19937_64 rng(derive_seed(seed, 11));
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        double worst = 0.0;
        for (int p = 0; p < 10; ++p) {
            Vec x = sys.s0.x;
            for (int i = 0; i < x.size(); ++i) x(i) += unif(rng);
            const Tensor3 B = curvature(sys.red.conn, sys.red.C, x);
            for (int a = 0; a < sys.red.d(); ++a)
                for (int al = 0; al < sys.red.r; ++al)
                    for (int be = 0; be < sys.red.r; ++be)
                        worst = std::max(worst, std::abs(B(a, al, be) + B(a, be, al)));
        }
        push("curvature-antisymmetry", worst, 0.0);
    }

    const double T = 1.0, h = 1e-3;
    const long N = std::lround(T / h);
    const DrivingPath path = make_time_brownian(derive_seed(seed, 12), h, static_cast<int>(N),
                                                sys.red.k());
    const StepperConfig step;

    {  // fiber consistency along a noisy reduced run
        const ReducedTrajectory traj = integrate_reduced(sys.red, sys.s0, path, step);
        double worst = 0.0;
        for (const auto& s : traj.states) {
            const FiberPartials g = sys.red.d_ell(s.x, s.u, s.zbar);
            if (sys.red.r > 0) worst = std::max(worst, (s.y - g.du).cwiseAbs().maxCoeff());
            if (sys.red.d() > 0)
                worst = std::max(worst, (s.mubar - g.dzbar).cwiseAbs().maxCoeff());
        }
        push("fiber-consistency", worst, 1e-9);
    }

    if (sys.has_casimir) push("casimir-drift", check_casimir(sys, 5.0, 1e-3, derive_seed(seed, 13)), 1e-4);

    if (sys.red.C.max_abs() == 0.0 && sys.red.d() > 0) {  // abelian momentum conservation
        const ReducedTrajectory traj = integrate_reduced(sys.red, sys.s0, path, step);
        double worst = 0.0;
        for (const auto& s : traj.states)
            worst = std::max(worst, (s.mubar - sys.s0.mubar).cwiseAbs().maxCoeff());
        push("abelian-momentum", worst, 1e-14);
    }

    {  // action invariance under constant group shifts, and reduction match
        const UnreducedState us0 = embed_state(sys.red.conn, sys.s0, sys.g0);
        const UnreducedTrajectory traj = integrate_unreduced(sys.unred, us0, path, step);
        const double S0 = action_unreduced(sys.unred, traj, path);
        std::mt19937_64 rng(derive_seed(seed, 14));
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const GroupElement g0 = random_shift(sys.unred.group, rng);
            const double S = action_unreduced(sys.unred, shift_trajectory(traj, g0), path);
            worst = std::max(worst, std::abs(S - S0));
        }
        push("action-invariance", worst, 1e-12);

        const ReducedTrajectory proj = project_trajectory(sys.red.conn, sys.red.group, traj);
        const double Sred = action_reduced(sys.red, proj, path);
        push("action-reduction-match", std::abs(S0 - Sred), 1e-8);

        double drift = 0.0;
        for (const auto& s : traj.states) drift = std::max(drift, s.g.ortho_defect());
        push("ortho-drift", drift, kOrthoTol);
    }

    return out;
}

void EnsembleReport::write_csv(std::ostream& os) const {
    os << 't';
    for (const auto& c : components) os << ",mean_" << c << ",stderr_" << c;
    os << '\n';
    char buf[40];
    for (int j = 0; j < slices(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", times[j]);
        os << buf;
        for (int c = 0; c < width(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", mean(j, c));
            os << ',' << buf;
            std::snprintf(buf, sizeof buf, "%.17g", sem(j, c));
            os << ',' << buf;
        }
        os << '\n';
    }
}

void EnsembleReport::print_summary(std::ostream& os) const {
    os << "ensemble: observable=" << observable << " trials=" << trials << '\n';
    char buf[160];
    for (int c = 0; c < width(); ++c) {
        std::snprintf(buf, sizeof buf, "  %-10s t=%-8g mean=% .10e stderr=%.4e\n",
                      components[c].c_str(), times.back(), final_mean(c), final_sem(c));
        os << buf;
    }
}

void ConvergenceReport::write_csv(std::ostream& os) const {
    os << "h,discrepancy,err_vs_ref\n";
    char buf[40];
    for (const auto& l : levels) {
        std::snprintf(buf, sizeof buf, "%.17g", l.h);
        os << buf;
        std::snprintf(buf, sizeof buf, "%.17g", l.discrepancy);
        os << ',' << buf;
        std::snprintf(buf, sizeof buf, "%.17g", l.err_vs_ref);
        os << ',' << buf << '\n';
    }
}

void ConvergenceReport::print_summary(std::ostream& os) const {
    os << "convergence levels (h, same-level discrepancy, error vs refined reference):\n";
    char buf[120];
    for (const auto& l : levels) {
        std::snprintf(buf, sizeof buf, "  h=%-10.4g disc=%.6e err=%.6e\n", l.h, l.discrepancy,
                      l.err_vs_ref);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "fitted strong order: %.4f\n", fitted_order);
    os << buf;
}

void print_check_table(const std::vector<CheckResult>& checks, std::ostream& os) {
    char buf[160];
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof buf, "  %-26s value=%-14.6e threshold=%-10.3e %s\n",
                      c.name.c_str(), c.value, c.threshold, c.pass ? "PASS" : "FAIL");
        os << buf;
    }
}

double fit_loglog_order(const std::vector<std::pair<double, double>>& h_err) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(h_err.size());
    if (n < 2) return 0.0;
    for (const auto& [h, e] : h_err) {
        const double x = std::log(h);
        const double y = std::log(std::max(e, 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace lpstoch
