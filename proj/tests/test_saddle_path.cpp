#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "saddleflow/baselines.hpp"
#include "saddleflow/saddle_path.hpp"
#include "test_util.hpp"

using namespace saddleflow;

TEST_CASE("hitting time from the origin") {
    const HitEvent h = hitting_time(Vector::Zero(2), Vector{{0.5, -0.25}}, {0, 1});
    CHECK(h.delta == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(h.coords == IndexSet{0});
    CHECK(h.signs == std::vector<int>{-1});
}

TEST_CASE("hitting times along the fixture") {
    HitEvent h = hitting_time(Vector::Zero(2), Vector{{-0.2, -0.16}}, {0, 1});
    CHECK(h.delta == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(h.coords == IndexSet{0});
    CHECK(h.signs == std::vector<int>{1});

    h = hitting_time(Vector{{1.0, 0.8}}, Vector{{0.0, -0.12}}, {1});
    CHECK(h.delta == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
    CHECK(h.coords == IndexSet{1});
    CHECK(h.signs == std::vector<int>{1});
}

TEST_CASE("hitting time reports ties together") {
    const HitEvent h = hitting_time(Vector::Zero(3), Vector{{-1.0, 1.0, 0.5}}, {0, 1, 2});
    CHECK(h.coords == IndexSet{0, 1});
    CHECK(h.signs == std::vector<int>{1, -1});
}

TEST_CASE("hitting time without a finite hit") {
    test::check_code(ErrorCode::NoFiniteHit, [] { (void)hitting_time(Vector::Zero(2), Vector::Zero(2), {0, 1}); });
}

TEST_CASE("fixture path") {
    const Dataset data = test::golden_fixture();
    const SaddlePath p = run(data);
    REQUIRE(p.loops() == 3);
    const double times[] = {0.0, 5.0, 20.0 / 3.0, 70.0 / 3.0};
    for (int k = 0; k < 4; ++k) CHECK(std::abs(p.times[k] - times[k]) < 1e-12);
    CHECK(test::max_abs(p.saddles[1] - Vector{{0.2, 0.0}}) < 1e-12);
    CHECK(test::max_abs(p.saddles[2] - Vector{{0.0, 1.6}}) < 1e-12);
    CHECK(test::max_abs(p.saddles[3] - Vector{{-0.2, 2.0}}) < 1e-12);
    CHECK(test::max_abs(p.duals[2] - Vector{{1.0, 1.0}}) < 1e-12);
    CHECK(test::max_abs(p.duals[3] - Vector{{-1.0, 1.0}}) < 1e-12);
    // Loss strictly decreases from saddle to saddle.
    for (int k = 1; k <= 3; ++k) CHECK(p.losses[k] < p.losses[k - 1]);
    CHECK(p.warnings.empty());
}

TEST_CASE("zero response gives the trivial path") {
    Matrix x(3, 2);
    x << 1.0, 0.0, 0.0, 1.0, 1.0, 1.0;
    const Dataset data(x, Vector::Zero(3));
    const SaddlePath p = run(data);
    CHECK(p.loops() == 0);
    REQUIRE(p.saddles.size() == 1);
    CHECK(test::max_abs(p.saddles[0]) == 0.0);
}

TEST_CASE("identity design learns coordinates by magnitude") {
    Vector bs(4);
    bs << 0.5, -4.0, 2.0, 1.0;
    const Dataset data = Dataset::from_gram(Matrix::Identity(4, 4), bs);
    const SaddlePath p = run(data);
    REQUIRE(p.loops() == 4);
    const Index order[] = {1, 2, 3, 0};
    Vector prefix = Vector::Zero(4);
    for (int k = 0; k < 4; ++k) {
        prefix(order[k]) = bs(order[k]);
        CHECK(std::abs(p.times[k + 1] - 1.0 / std::abs(bs(order[k]))) < 1e-12);
        CHECK(test::max_abs(p.saddles[k + 1] - prefix) < 1e-12);
    }
}

TEST_CASE("loop bound") {
    CHECK(loop_bound(2, 2) == 4.0);
    CHECK(loop_bound(1, 3) == 4.0);   // 1 + 3
    CHECK(loop_bound(8, 3) == 8.0);   // 2^3
    CHECK(loop_bound(100, 200) == 1e18);
}

TEST_CASE("loop cap raises MaxLoops") {
    PathConfig cfg;
    cfg.max_loops = 1;
    test::check_code(ErrorCode::MaxLoops, [&] { (void)run(test::golden_fixture(), cfg); });
}

TEST_CASE("random paths: invariants and min-l1 endpoint") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Dataset data = test::random_instance(seed, 8, 12);
        const SaddlePath p = run(data);
        CHECK(audit_path(p, data).empty());
        CHECK(static_cast<double>(p.loops()) <= loop_bound(8, 12));
        for (const Vector& s : p.saddles) {
            CHECK(support_of(s).size() <= 8);
            CHECK(critical_point_check(data, s, 1e-9 * data.grad_scale()));
        }
        const Vector l1 = lasso_homotopy(data).endpoint();
        CHECK(test::max_abs(p.saddles.back() - l1) < 1e-8);
    }
}

TEST_CASE("key equation holds on the fixture path") {
    const Dataset data = test::golden_fixture();
    const SaddlePath p = run(data);
    const KeyEquationReport r = verify_key_equation(p, data, default_time_grid(p, 1000), 1e-8);
    CHECK(r.samples == 1000);
    CHECK(r.ok());
}

TEST_CASE("key equation detects a corrupted saddle") {
    const Dataset data = test::golden_fixture();
    SaddlePath p = run(data);
    p.saddles[1](1) += 0.1;  // coordinate 1 has |s| < 1 on this plateau
    const KeyEquationReport r = verify_key_equation(p, data, default_time_grid(p, 1000), 1e-8);
    CHECK_FALSE(r.ok());
    CHECK(r.k3 >= 0.1 - 1e-12);
}

TEST_CASE("audit detects a non-decreasing loss") {
    const Dataset data = test::golden_fixture();
    SaddlePath p = run(data);
    p.saddles[2] = p.saddles[1];
    CHECK_FALSE(audit_path(p, data).empty());
}

TEST_CASE("saddle_at is right-continuous") {
    const SaddlePath p = run(test::golden_fixture());
    CHECK(test::max_abs(saddle_at(p, 4.999)) == 0.0);
    CHECK(test::max_abs(saddle_at(p, 5.0) - p.saddles[1]) == 0.0);
    CHECK(test::max_abs(saddle_at(p, 1e9) - p.saddles.back()) == 0.0);
}

TEST_CASE("default grid covers the path") {
    const SaddlePath p = run(test::golden_fixture());
    const auto g = default_time_grid(p, 11);
    REQUIRE(g.size() == 11);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == doctest::Approx(1.25 * 70.0 / 3.0));
    CHECK(std::is_sorted(g.begin(), g.end()));
}
