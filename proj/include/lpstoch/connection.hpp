#pragma once

#include <functional>

#include "lpstoch/lie.hpp"

namespace lpstoch {

/// Principal connection coefficients in a global trivialization: A(x) is the
/// d x r matrix A^a_alpha, dA(x) the tensor dA(a,alpha,beta) = dA^a_alpha/dx^beta.
struct ConnectionField {
    int d = 0;
    int r = 0;
    std::function<Mat(const Vec&)> A;
    std::function<Tensor3(const Vec&)> dA;

    static ConnectionField zero(int d, int r);
    static ConnectionField analytic(int d, int r, std::function<Mat(const Vec&)> A,
                                    std::function<Tensor3(const Vec&)> dA);
    /// dA by central differences with step h_fd.
    static ConnectionField finite_difference(int d, int r, std::function<Mat(const Vec&)> A,
                                             double h_fd = 1e-5);
};

/// B^b_{alpha beta} = d_alpha A^b_beta - d_beta A^b_alpha - C^b_cd A^c_alpha A^d_beta,
/// filled antisymmetrically so B(b,alpha,beta) = -B(b,beta,alpha) holds exactly.
Tensor3 curvature(const ConnectionField& conn, const Tensor3& C, const Vec& x);

/// dxi^a + A^a_alpha(x) dx^alpha.
Vec xi_bar_increment(const ConnectionField& conn, const Vec& x, const Vec& dx, const Vec& dxi);

/// dmu_b = mu_a C^a_db (dxibar^d - A^d_alpha(x) dx^alpha).
Vec coadjoint_covariant_increment(const Tensor3& C, const ConnectionField& conn, const Vec& x,
                                  const Vec& mu, const Vec& dxibar, const Vec& dx);

}  // namespace lpstoch
