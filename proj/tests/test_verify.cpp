#include <doctest.h>

#include <cmath>

#include "saddleflow/baselines.hpp"
#include "saddleflow/experiment.hpp"
#include "saddleflow/verify.hpp"
#include "test_util.hpp"

using namespace saddleflow;

TEST_CASE("rip constant of an isotropic design is zero") {
    Vector bs = Vector::Ones(5);
    const Dataset data = Dataset::from_gram(Matrix::Identity(5, 5), bs);
    for (int s = 1; s <= 5; ++s) CHECK(rip_constant(data, s) < 1e-14);
}

TEST_CASE("rip constant of order one is the worst column norm") {
    const Dataset data = test::random_instance(4, 30, 6);
    const Vector sq = data.x().colwise().squaredNorm() / 30.0;
    CHECK(rip_constant(data, 1) == doctest::Approx((sq.array() - 1.0).abs().maxCoeff()).epsilon(1e-12));
}

TEST_CASE("rip constant of a Gaussian design") {
    GeneratorSpec g;
    g.n = 60;
    g.d = 20;
    g.seed = 9;
    g.beta_star = Vector::Zero(20);
    const Dataset data = generate_dataset(g);
    const double e = rip_constant(data, 4);
    CHECK(e > 0.0);
    CHECK(e < 1.0);
    CHECK(rip_constant(generate_dataset(g), 4) == e);
    // Sampling only sees some subsets, so it cannot exceed the exact value.
    CHECK(rip_constant(data, 4, RipMode::Sampled, 200, 1) <= e);
}

TEST_CASE("rip constant enumeration guard") {
    CHECK(subset_count(10, 3) == 120.0);
    const Dataset data = test::random_instance(1, 5, 40);
    CHECK(subset_count(40, 10) > kMaxRipSubsets);
    test::check_code(ErrorCode::TooManySubsets, [&] { (void)rip_constant(data, 10); });
    CHECK(rip_constant(data, 10, RipMode::Sampled, 50) > 0.0);
    test::check_code(ErrorCode::InvalidArgument, [&] { (void)rip_constant(data, 0); });
}

TEST_CASE("rip predictions on an isotropic design") {
    Vector bs(5);
    bs << 0.0, -3.0, 1.0, 0.0, 2.0;
    const Dataset data = Dataset::from_gram(Matrix::Identity(5, 5), bs);
    const RipReport r = rip_experiment(data, bs);
    CHECK(r.r == 3);
    CHECK_FALSE(r.assumption_failed);
    CHECK(r.order == IndexSet{1, 4, 2});
    CHECK(r.loops_observed == 3);
    CHECK(r.gap == doctest::Approx(1.0));
    CHECK(r.pass());
}

TEST_CASE("rip predictions are skipped when the gap is too small") {
    GeneratorSpec g;
    g.n = 200;
    g.d = 8;
    g.seed = 3;
    g.beta_star = Vector::Zero(8);
    g.beta_star(0) = 1.0;
    g.beta_star(1) = 0.99;
    const RipReport r = rip_experiment(generate_dataset(g), g.beta_star);
    CHECK(r.assumption_failed);
    CHECK_FALSE(r.assumption_note.empty());
    for (const auto& c : r.checks) CHECK(c.name.find("box") == std::string::npos);
}

TEST_CASE("rip experiment requires a planted response") {
    const Dataset data = test::random_instance(2, 10, 4);
    test::check_code(ErrorCode::InvalidArgument, [&] { (void)rip_experiment(data, Vector::Ones(4)); });
    test::check_code(ErrorCode::DimensionMismatch, [&] { (void)rip_experiment(data, Vector::Ones(3)); });
}

TEST_CASE("termination audits") {
    const Dataset fixture = test::golden_fixture();
    AuditReport a = termination_audit(run(fixture), fixture);
    CHECK(a.ok());
    CHECK(a.loops == 3);
    CHECK(a.loop_bound == 4.0);

    Vector bs(3);
    bs << 1.0, 2.0, 3.0;
    const Dataset ident = Dataset::from_gram(Matrix::Identity(3, 3), bs);
    a = termination_audit(run(ident), ident);
    CHECK(a.ok());
    CHECK(a.loops == 3);
    CHECK(a.loop_bound == 8.0);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Dataset data = test::random_instance(700 + seed, 8, 12);
        CHECK(termination_audit(run(data), data).ok());
    }
}

TEST_CASE("termination audit catches a wrong endpoint") {
    const Dataset fixture = test::golden_fixture();
    SaddlePath p = run(fixture);
    p.saddles.back()(0) += 1e-3;
    CHECK_FALSE(termination_audit(p, fixture).ok());
}

TEST_CASE("sweep of a zero response") {
    Matrix x(3, 2);
    x << 1.0, 0.0, 0.0, 1.0, 1.0, 1.0;
    const Dataset data(x, Vector::Zero(3));
    SweepConfig cfg;
    cfg.log10_alphas = {-2.0, -8.0};
    const SweepTable t = convergence_sweep(data, run(data), cfg);
    for (const auto& r : t.rows) {
        CHECK(r.sup_max == 0.0);
        CHECK(r.hausdorff == 0.0);
    }
}

TEST_CASE("sweep shrinks away from jumps but not across them") {
    const Dataset data = test::golden_fixture();
    SweepConfig cfg;
    cfg.log10_alphas = {-4.0, -8.0, -16.0};
    const SweepTable t = convergence_sweep(data, run(data), cfg);
    CHECK(t.sup_monotone());
    CHECK(t.hausdorff_monotone());
    CHECK(t.rows.back().hausdorff < 1e-3);
    // Negative control: a window straddling t_1 keeps an O(1) gap.
    for (const auto& r : t.rows) CHECK(r.jump_window_sup > 0.1);
}

TEST_CASE("flow bounds and dual identity on simulated trajectories") {
    const Dataset data = test::golden_fixture();
    const Vector l1 = lasso_homotopy(data).endpoint();
    for (double l10 : {-4.0, -12.0}) {
        const FlowTrajectory tr = simulate(data, l10 * std::log(10.0), 30.0);
        const BoundReport b = check_flow_bounds(data, tr, l1);
        CHECK(b.applicable);
        CHECK(b.ok());
        CHECK(b.max_abs_beta <= b.beta_bound);
        CHECK(duality_residual(tr) < 1e-6);
    }
}

TEST_CASE("flow bounds are not asserted above the threshold") {
    const Dataset data = test::golden_fixture();
    const Vector l1 = lasso_homotopy(data).endpoint();
    const FlowTrajectory tr = simulate(data, std::log(0.5), 5.0);
    CHECK_FALSE(check_flow_bounds(data, tr, l1).applicable);
}
