#include "lpstoch/connection.hpp"

#include <stdexcept>

namespace lpstoch {

ConnectionField ConnectionField::zero(int d, int r) {
    ConnectionField c;
    c.d = d;
    c.r = r;
    c.A = [d, r](const Vec&) { return Mat::Zero(d, r); };
    c.dA = [d, r](const Vec&) { return Tensor3(d, r, r); };
    return c;
}

ConnectionField ConnectionField::analytic(int d, int r, std::function<Mat(const Vec&)> A,
                                          std::function<Tensor3(const Vec&)> dA) {
    ConnectionField c;
    c.d = d;
    c.r = r;
    c.A = std::move(A);
    c.dA = std::move(dA);
    return c;
}

ConnectionField ConnectionField::finite_difference(int d, int r,
                                                   std::function<Mat(const Vec&)> A,
                                                   double h_fd) {
    ConnectionField c;
    c.d = d;
    c.r = r;
    c.A = A;
    c.dA = [A, d, r, h_fd](const Vec& x) {
        Tensor3 t(d, r, r);
        Vec xp = x, xm = x;
        for (int beta = 0; beta < r; ++beta) {
            xp(beta) += h_fd;
            xm(beta) -= h_fd;
            const Mat Ap = A(xp);
            const Mat Am = A(xm);
            for (int a = 0; a < d; ++a)
                for (int al = 0; al < r; ++al)
                    t(a, al, beta) = (Ap(a, al) - Am(a, al)) / (2.0 * h_fd);
            xp(beta) = x(beta);
            xm(beta) = x(beta);
        }
        return t;
    };
    return c;
}

Tensor3 curvature(const ConnectionField& conn, const Tensor3& C, const Vec& x) {
    const int d = conn.d, r = conn.r;
    Tensor3 B(d, r, r);
    if (d == 0 || r == 0) return B;
    const Mat A = conn.A(x);
    const Tensor3 dA = conn.dA(x);
    for (int b = 0; b < d; ++b)
        for (int al = 0; al < r; ++al)
            for (int be = al + 1; be < r; ++be) {
                double v = dA(b, be, al) - dA(b, al, be);
                for (int c = 0; c < d; ++c)
                    for (int e = 0; e < d; ++e) v -= C(b, c, e) * A(c, al) * A(e, be);
                B(b, al, be) = v;
                B(b, be, al) = -v;
            }
    return B;
}

Vec xi_bar_increment(const ConnectionField& conn, const Vec& x, const Vec& dx, const Vec& dxi) {
    if (dxi.size() != conn.d || dx.size() != conn.r)
        throw std::invalid_argument("xi_bar_increment: dimension mismatch");
    if (conn.d == 0) return dxi;
    if (conn.r == 0) return dxi;
    return dxi + conn.A(x) * dx;
}

Vec coadjoint_covariant_increment(const Tensor3& C, const ConnectionField& conn, const Vec& x,
                                  const Vec& mu, const Vec& dxibar, const Vec& dx) {
    Vec w = dxibar;
    if (conn.d > 0 && conn.r > 0) w -= conn.A(x) * dx;
    return coad(C, w, mu);
}

}  // namespace lpstoch
