#include <doctest.h>

#include <cstdio>

#include "lpstoch/driving_path.hpp"

using namespace lpstoch;

TEST_CASE("time channel is deterministic") {
    const DrivingPath p = make_time_brownian(1, 1e-3, 100, 0);
    CHECK(p.channels() == 1);
    CHECK((p.increments.col(0).array() == 1e-3).all());
    CHECK(p.kinds[0] == ChannelKind::Time);
}

TEST_CASE("same seed gives bit-identical increments") {
    const DrivingPath a = make_time_brownian(42, 1e-2, 500, 3);
    const DrivingPath b = make_time_brownian(42, 1e-2, 500, 3);
    CHECK((a.increments - b.increments).cwiseAbs().maxCoeff() == 0.0);
    const DrivingPath c = make_time_brownian(43, 1e-2, 500, 3);
    CHECK((a.increments - c.increments).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("Brownian increments have the right moments") {
    const double h = 1e-3;
    const int N = 100000;
    const DrivingPath p = make_time_brownian(7, h, N, 2);
    for (int j = 1; j <= 2; ++j) {
        const auto col = p.increments.col(j);
        const double mean = col.mean();
        const double var = (col.array() - mean).square().sum() / (N - 1);
        CHECK(var == doctest::Approx(h).epsilon(0.05));
        const double m4 = (col.array() - mean).pow(4).sum() / N;
        CHECK(m4 == doctest::Approx(3.0 * h * h).epsilon(0.10));
    }
}

TEST_CASE("invalid arguments are rejected") {
    CHECK_THROWS_AS(make_time_brownian(0, 0.0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_time_brownian(0, -1.0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_time_brownian(0, 1e-3, 0, 1), std::invalid_argument);
    const DrivingPath p = make_time_brownian(0, 1e-3, 10, 1);
    CHECK_THROWS_AS(coarsen(p, 3), std::invalid_argument);
}

TEST_CASE("coarsen sums fine increments exactly") {
    const DrivingPath p = make_time_brownian(9, 1e-3, 256, 2);

    SUBCASE("factor 1 is the identity") {
        const DrivingPath q = coarsen(p, 1);
        CHECK((q.increments - p.increments).cwiseAbs().maxCoeff() == 0.0);
        CHECK(q.h == p.h);
    }
    SUBCASE("factor N collapses to column sums") {
        const DrivingPath q = coarsen(p, 256);
        CHECK(q.steps() == 1);
        for (int j = 0; j < p.channels(); ++j)
            CHECK(q.increments(0, j) == doctest::Approx(p.increments.col(j).sum()).epsilon(1e-14));
    }
    SUBCASE("total displacement is invariant") {
        const DrivingPath q = coarsen(p, 8);
        CHECK(q.h == doctest::Approx(8e-3));
        for (int j = 0; j < p.channels(); ++j)
            CHECK(q.increments.col(j).sum() ==
                  doctest::Approx(p.increments.col(j).sum()).epsilon(1e-13));
    }
}

TEST_CASE("zero_noise zeroes exactly the noise channels") {
    const DrivingPath p = make_time_brownian(5, 1e-3, 64, 3);
    const DrivingPath z = zero_noise(p);
    CHECK((z.increments.col(0) - p.increments.col(0)).cwiseAbs().maxCoeff() == 0.0);
    for (int j = 1; j <= 3; ++j) CHECK(z.increments.col(j).cwiseAbs().maxCoeff() == 0.0);
    const DrivingPath zz = zero_noise(z);
    CHECK((zz.increments - z.increments).cwiseAbs().maxCoeff() == 0.0);

    const DrivingPath t = make_time_brownian(5, 1e-3, 64, 0);
    const DrivingPath zt = zero_noise(t);
    CHECK((zt.increments - t.increments).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("binary dump/load round trip") {
    const DrivingPath p = make_time_brownian(11, 2e-3, 128, 2);
    const std::string file = "test_path.lpsd";
    dump_path(p, file);
    const DrivingPath q = load_path(file, p.h);
    std::remove(file.c_str());
    CHECK(q.steps() == p.steps());
    CHECK(q.channels() == p.channels());
    CHECK((q.increments - p.increments).cwiseAbs().maxCoeff() == 0.0);
    CHECK(q.kinds[0] == ChannelKind::Time);
    CHECK(q.kinds[1] == ChannelKind::Custom);
}

TEST_CASE("derived seeds differ across streams") {
    CHECK(derive_seed(0, 0) != derive_seed(0, 1));
    CHECK(derive_seed(0, 0) != derive_seed(1, 0));
    CHECK(derive_seed(123, 456) == derive_seed(123, 456));
}
