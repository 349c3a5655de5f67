#include <doctest.h>

#include <random>

#include "lpstoch/connection.hpp"

using namespace lpstoch;

namespace {

// abelian d=1, r=3 potential A = (-x2/2, x1/2, 0); curl = (0,0,1)
ConnectionField monopole_z() {
    auto A = [](const Vec& x) {
        Mat a(1, 3);
        a << -x(1) / 2.0, x(0) / 2.0, 0.0;
        return a;
    };
    return ConnectionField::finite_difference(1, 3, A);
}

}  // namespace

TEST_CASE("zero connection has zero curvature") {
    const ConnectionField conn = ConnectionField::zero(3, 2);
    const Tensor3 C = GroupSpec::so3().structure_constants();
    const Tensor3 B = curvature(conn, C, Vec::Zero(2));
    CHECK(B.max_abs() == 0.0);
}

TEST_CASE("abelian curvature equals the curl of the potential") {
    const ConnectionField conn = monopole_z();
    const Tensor3 C = GroupSpec::circle().structure_constants();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 20; ++i) {
        const Vec x = Vec3(u(rng), u(rng), u(rng));
        const Tensor3 B = curvature(conn, C, x);
        CHECK(B(0, 0, 1) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(std::abs(B(0, 0, 2)) < 1e-8);
        CHECK(std::abs(B(0, 1, 2)) < 1e-8);
        // antisymmetry holds exactly as computed
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) CHECK(B(0, a, b) + B(0, b, a) == 0.0);
    }
}

TEST_CASE("constant nonabelian connection curvature is the bracket term") {
    // A constant => derivative part vanishes, B^b = -C^b_cd A^c A^d
    const Tensor3 C = GroupSpec::so3().structure_constants();
    Mat A0(3, 2);
    A0 << 0.5, 0.0, 0.0, 1.0, 0.25, -0.5;
    const ConnectionField conn = ConnectionField::analytic(
        3, 2, [A0](const Vec&) { return A0; }, [](const Vec&) { return Tensor3(3, 2, 2); });
    const Tensor3 B = curvature(conn, C, Vec::Zero(2));
    // hand evaluation: B(b,0,1) = -(A.col(0) x A.col(1))_b
    const Vec3 expected = -Vec3(A0.col(0)).cross(Vec3(A0.col(1)));
    for (int b = 0; b < 3; ++b) {
        CHECK(B(b, 0, 1) == doctest::Approx(expected(b)).epsilon(1e-14));
        CHECK(B(b, 1, 0) == -B(b, 0, 1));
    }
}

TEST_CASE("finite-difference dA matches a half-step recomputation") {
    const ConnectionField conn = monopole_z();
    const Vec x = Vec3(0.3, -0.7, 0.2);
    const Tensor3 dA = conn.dA(x);
    // the potential is linear, so central differences are exact up to roundoff
    CHECK(dA(0, 0, 1) == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(dA(0, 1, 0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(dA(0, 2, 0)) < 1e-9);
}

TEST_CASE("xi_bar_increment") {
    Mat A0(2, 2);
    A0 << 1.0, 2.0, 3.0, 4.0;
    const ConnectionField conn = ConnectionField::analytic(
        2, 2, [A0](const Vec&) { return A0; }, [](const Vec&) { return Tensor3(2, 2, 2); });
    const Vec x = Vec::Zero(2);

    SUBCASE("zero connection returns dxi unchanged") {
        const ConnectionField z = ConnectionField::zero(2, 2);
        Vec dxi(2);
        dxi << 5.0, -1.0;
        CHECK((xi_bar_increment(z, x, Vec::Ones(2), dxi) - dxi).norm() == 0.0);
    }
    SUBCASE("zero dx returns dxi") {
        Vec dxi(2);
        dxi << 5.0, -1.0;
        CHECK((xi_bar_increment(conn, x, Vec::Zero(2), dxi) - dxi).norm() == 0.0);
    }
    SUBCASE("unit dx picks a column of A") {
        const Vec out = xi_bar_increment(conn, x, Vec(Eigen::Vector2d(1.0, 0.0)), Vec::Zero(2));
        CHECK(out(0) == 1.0);
        CHECK(out(1) == 3.0);
    }
    SUBCASE("linearity") {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int i = 0; i < 50; ++i) {
            Vec dx1(2), dx2(2), di1(2), di2(2);
            for (int j = 0; j < 2; ++j) {
                dx1(j) = u(rng);
                dx2(j) = u(rng);
                di1(j) = u(rng);
                di2(j) = u(rng);
            }
            const double a = u(rng), b = u(rng);
            const Vec lhs = xi_bar_increment(conn, x, a * dx1 + b * dx2, a * di1 + b * di2);
            const Vec rhs = a * xi_bar_increment(conn, x, dx1, di1) +
                            b * xi_bar_increment(conn, x, dx2, di2);
            CHECK((lhs - rhs).norm() < 1e-12);
        }
    }
}

TEST_CASE("coadjoint covariant increment") {
    const Tensor3 Cso3 = GroupSpec::so3().structure_constants();
    const Tensor3 Cab = GroupSpec::circle().structure_constants();

    SUBCASE("abelian structure conserves mu") {
        const ConnectionField conn = monopole_z();
        const Vec out = coadjoint_covariant_increment(Cab, conn, Vec3(1, 2, 3).eval(),
                                                      Vec::Constant(1, 4.0), Vec::Constant(1, 0.3),
                                                      Vec3(0.1, 0.2, 0.3).eval());
        CHECK(out.norm() == 0.0);
    }
    SUBCASE("trivial connection reproduces Pi x dOmega") {
        const ConnectionField conn = ConnectionField::zero(3, 0);
        const Vec3 Pi(2, -1, 0.5), dW(0.3, 0.7, -0.2);
        const Vec out = coadjoint_covariant_increment(Cso3, conn, Vec::Zero(0), Vec(Pi), Vec(dW),
                                                      Vec::Zero(0));
        CHECK((out - Vec(Vec3(Pi.cross(dW)))).norm() < 1e-15);
    }
    SUBCASE("dxibar = A dx gives a zero increment") {
        Mat A0(3, 2);
        A0 << 1, 0, 0, 1, 0.5, -0.5;
        const ConnectionField conn = ConnectionField::analytic(
            3, 2, [A0](const Vec&) { return A0; }, [](const Vec&) { return Tensor3(3, 2, 2); });
        Vec dx(2);
        dx << 0.3, -0.8;
        const Vec dxibar = A0 * dx;
        const Vec out = coadjoint_covariant_increment(Cso3, conn, Vec::Zero(2),
                                                      Vec(Vec3(1, 2, 3)), dxibar, dx);
        CHECK(out.norm() == 0.0);
    }
}
