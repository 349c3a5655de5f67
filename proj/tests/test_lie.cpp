#include <doctest.h>

#include <random>

#include "lpstoch/lie.hpp"

using namespace lpstoch;

TEST_CASE("hat map acts as cross product") {
    // e3 x e1 = e2
    CHECK((hat(Vec3(0, 0, 1)) * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() == 0.0);
    CHECK(hat(Vec3::Zero()).norm() == 0.0);
    // (1,2,3) x (4,5,6) = (-3, 6, -3), by direct arithmetic
    CHECK((hat(Vec3(1, 2, 3)) * Vec3(4, 5, 6) - Vec3(-3, 6, -3)).norm() == 0.0);
}

TEST_CASE("vee inverts hat exactly") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 100; ++i) {
        const Vec3 v(u(rng), u(rng), u(rng));
        CHECK((vee(hat(v)) - v).norm() == 0.0);
        CHECK((hat(vee(hat(v))) - hat(v)).norm() == 0.0);
    }
}

TEST_CASE("so3 exponential") {
    CHECK((so3_exp(Vec3::Zero()) - Mat3::Identity()).norm() == 0.0);
    // quarter turn about z sends e1 to e2
    const Mat3 R = so3_exp(Vec3(0, 0, M_PI / 2));
    CHECK((R * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() < 1e-12);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 200; ++i) {
        const Vec3 v(u(rng), u(rng), u(rng));
        const Mat3 A = so3_exp(v), B = so3_exp(-v);
        CHECK((A * B - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(ortho_defect(A) < 1e-13);
        CHECK(A.determinant() > 0.0);
    }
}

TEST_CASE("so3 log inverts exp") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 200; ++i) {
        Vec3 v(u(rng), u(rng), u(rng));
        v *= 3.0;  // angles up to ~5.2, wraps around pi
        const Vec3 w = so3_log(so3_exp(v));
        CHECK((so3_exp(w) - so3_exp(v)).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(w.norm() <= M_PI + 1e-12);
    }
    // tiny angles
    const Vec3 eps(1e-9, -2e-9, 1e-10);
    CHECK((so3_log(so3_exp(eps)) - eps).norm() < 1e-15);
    // near pi
    const Vec3 nearpi = (M_PI - 1e-8) * Vec3(1, 0, 0);
    CHECK((so3_log(so3_exp(nearpi)) - nearpi).norm() < 1e-6);
}

TEST_CASE("polar projection restores orthogonality") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    Mat3 R = so3_exp(Vec3(0.3, -0.2, 0.9));
    Mat3 noise;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) noise(i, j) = 1e-6 * u(rng);
    const Mat3 P = so3_project(R + noise);
    CHECK(ortho_defect(P) < 1e-14);
    CHECK(P.determinant() > 0.0);
    CHECK((P - R).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("structure constants of so(3) are the Levi-Civita symbol") {
    const GroupSpec g = GroupSpec::so3();
    const Tensor3 C = g.structure_constants();
    CHECK(C(2, 0, 1) == 1.0);
    CHECK(C(2, 1, 0) == -1.0);
    CHECK(C(0, 1, 2) == 1.0);
    CHECK(C(1, 2, 0) == 1.0);
    CHECK(C(0, 0, 0) == 0.0);
    CHECK(antisymmetry_defect(C) == 0.0);
    CHECK(jacobi_defect(C) < 1e-12);

    // ad is the cross product
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 100; ++i) {
        const Vec3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng));
        CHECK((ad(C, Vec(a), Vec(b)) - Vec(a.cross(b))).norm() < 1e-14);
    }
    CHECK(ad(C, Vec(Vec3(1, 0, 0)), Vec(Vec3(0, 1, 0)))(2) == 1.0);
}

TEST_CASE("ad of an element with itself vanishes") {
    const Tensor3 C = GroupSpec::so3().structure_constants();
    const Vec xi = Vec(Vec3(0.3, -1.2, 0.7));
    CHECK(ad(C, xi, xi).norm() == 0.0);
}

TEST_CASE("abelian bracket vanishes") {
    const GroupSpec g = GroupSpec::circle();
    const Tensor3 C = g.structure_constants();
    CHECK(ad(C, Vec::Constant(1, 2.0), Vec::Constant(1, -3.0)).norm() == 0.0);
    CHECK(coad(C, Vec::Constant(1, 2.0), Vec::Constant(1, -3.0)).norm() == 0.0);
}

TEST_CASE("coad satisfies the defining duality") {
    const Tensor3 C = GroupSpec::so3().structure_constants();
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 1000; ++i) {
        Vec xi(3), eta(3), mu(3);
        for (int j = 0; j < 3; ++j) {
            xi(j) = u(rng);
            eta(j) = u(rng);
            mu(j) = u(rng);
        }
        CHECK(std::abs(coad(C, xi, mu).dot(eta) - mu.dot(ad(C, xi, eta))) < 1e-12);
    }
}

TEST_CASE("coad on so(3) matches the rigid body convention") {
    // dPi = Pi x dOmega: with Pi = e1 and dOmega = e2, Pi x dOmega = e3.
    const Tensor3 C = GroupSpec::so3().structure_constants();
    const Vec pi = Vec(Vec3(1, 0, 0));
    const Vec dom = Vec(Vec3(0, 1, 0));
    const Vec out = coad(C, dom, pi);  // ad*_{dOmega} Pi
    CHECK((out - Vec(Vec3(0, 0, 1))).norm() < 1e-15);
    // hand-checked asymmetric triple: Pi=(2,-1,0.5), dOmega=(0.3,0.7,-0.2)
    const Vec3 P(2, -1, 0.5), W(0.3, 0.7, -0.2);
    CHECK((coad(C, Vec(W), Vec(P)) - Vec(Vec3(P.cross(W)))).norm() < 1e-15);
}

TEST_CASE("Ad is a group action and algebra homomorphism") {
    const GroupSpec spec = GroupSpec::so3();
    const Tensor3 C = spec.structure_constants();
    const GroupElement id = GroupElement::identity(spec);
    const Vec xi = Vec(Vec3(0.4, -0.1, 0.9));
    CHECK((Ad(id, xi) - xi).norm() == 0.0);

    // rot_z(pi/2) sends e1 to e2
    const GroupElement Rz = exp_group(spec, Vec(Vec3(0, 0, M_PI / 2)));
    CHECK((Ad(Rz, Vec(Vec3(1, 0, 0))) - Vec(Vec3(0, 1, 0))).norm() < 1e-12);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 100; ++i) {
        const GroupElement g = exp_group(spec, Vec(Vec3(u(rng), u(rng), u(rng))));
        Vec a(3), b(3);
        for (int j = 0; j < 3; ++j) {
            a(j) = u(rng);
            b(j) = u(rng);
        }
        CHECK((Ad(g, ad(C, a, b)) - ad(C, Ad(g, a), Ad(g, b))).norm() < 1e-12);
    }
}

TEST_CASE("product group operations are blockwise") {
    const GroupSpec spec({GroupKind::Circle, GroupKind::SO3});
    CHECK(spec.dim() == 4);
    const Tensor3 C = spec.structure_constants();
    CHECK(antisymmetry_defect(C) == 0.0);
    CHECK(jacobi_defect(C) < 1e-12);
    // circle block commutes with everything
    Vec a = Vec::Zero(4), b = Vec::Zero(4);
    a(0) = 1.3;
    b(1) = 0.7;
    CHECK(ad(C, a, b).norm() == 0.0);

    Vec xi(4);
    xi << 0.3, 0.1, -0.2, 0.5;
    const GroupElement g = exp_group(spec, xi);
    const Vec back = log_group(spec, g);
    CHECK((back - xi).norm() < 1e-12);

    const GroupElement ginv = g.inverse();
    const GroupElement e = g.compose(ginv);
    CHECK(log_group(spec, e).norm() < 1e-12);
}

TEST_CASE("circle angles wrap") {
    const GroupSpec spec = GroupSpec::circle();
    const GroupElement g = exp_group(spec, Vec::Constant(1, 3 * M_PI));
    CHECK(std::abs(std::abs(g.block(0).angle) - M_PI) < 1e-12);
}
