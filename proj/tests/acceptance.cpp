// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and time
// budgets are fixed here and printed alongside the measured values.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "saddleflow/baselines.hpp"
#include "saddleflow/experiment.hpp"
#include "saddleflow/flow.hpp"
#include "saddleflow/random.hpp"
#include "saddleflow/saddle_path.hpp"
#include "saddleflow/verify.hpp"

namespace sf = saddleflow;
using sf::Dataset;
using sf::Index;
using sf::Matrix;
using sf::SaddlePath;
using sf::Vector;

namespace {

constexpr double kGoldenTol = 1e-10;
constexpr double kIdentityTol = 1e-12;
constexpr double kMinL1Tol = 1e-8;
constexpr double kKeyTol = 1e-8;
constexpr std::size_t kKeyGrid = 1000;
constexpr double kMidWindowTol = 1e-3;
constexpr double kLossSlack = 1e-12;  // relative, matches FlowConfig::loss_slack
constexpr double kOracleTol = 1e-9;   // relative to max(1, |beta|_inf)
constexpr double kRipIdentityTol = 1e-12;

constexpr double kBudgetGoldenMs = 1.0;
constexpr double kBudgetIdentityMs = 1.0;
constexpr double kBudgetMinL1S = 10.0;
constexpr double kBudgetSweepS = 30.0;
constexpr double kBudgetExtremeS = 60.0;
constexpr double kBudgetRipS = 30.0;
constexpr double kBudgetOracleS = 10.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Median wall time of `reps` calls, in milliseconds.
double median_ms(int reps, const std::function<void()>& f) {
    std::vector<double> ms;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = Clock::now();
        f();
        ms.push_back(1e3 * seconds_since(t0));
    }
    std::sort(ms.begin(), ms.end());
    return ms[ms.size() / 2];
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::printf("[%s] %2d %-28s %s\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Dataset golden_fixture() {
    Matrix h(2, 2);
    h << 1.0, 0.2, 0.2, 0.1;
    Vector bs(2);
    bs << -0.2, 2.0;
    return Dataset::from_gram(h, bs);
}

Vector identity_beta(int d) {
    Vector b(d);
    for (int i = 0; i < d; ++i) b(i) = (i % 2 == 0 ? 1.0 : -1.0) * (0.5 + 0.25 * ((i * 7) % d));
    return b;
}

// Gaussian X with a dense Gaussian response: in general position almost surely.
Dataset random_instance(std::uint64_t seed, Index n, Index d) {
    sf::Rng rng(seed);
    Matrix x = rng.normal_matrix(n, d);
    Vector y(n);
    for (Index i = 0; i < n; ++i) y(i) = rng.normal();
    return Dataset(std::move(x), std::move(y));
}

std::vector<Dataset> min_l1_instances() {
    std::vector<Dataset> out;
    sf::Rng pick(2024);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Index n = 5 + static_cast<Index>(pick.below(6));
        const Index d = 5 + static_cast<Index>(pick.below(11));
        out.push_back(random_instance(1000 + seed, n, d));
    }
    return out;
}

struct PathCase {
    std::string label;
    Dataset data;
    SaddlePath path;
};

// Paths from criteria 1-3, reused by 4 and 8.
std::vector<PathCase> g_paths;

Outcome golden() {
    const Dataset data = golden_fixture();
    SaddlePath path;
    const double ms = median_ms(21, [&] { path = sf::run(data); });
    g_paths.push_back({"golden", data, path});

    const double times[] = {5.0, 20.0 / 3.0, 70.0 / 3.0};
    const double saddles[3][2] = {{0.2, 0.0}, {0.0, 1.6}, {-0.2, 2.0}};
    const double duals[3][2] = {{1.0, 0.8}, {1.0, 1.0}, {-1.0, 1.0}};
    double err = 0.0;
    bool shape = path.loops() == 3;
    if (shape) {
        for (int k = 0; k < 3; ++k) {
            err = std::max(err, std::abs(path.times[k + 1] - times[k]));
            for (int i = 0; i < 2; ++i) {
                err = std::max(err, std::abs(path.saddles[k + 1](i) - saddles[k][i]));
                err = std::max(err, std::abs(path.duals[k + 1](i) - duals[k][i]));
            }
        }
    }
    const bool pass = shape && err <= kGoldenTol && ms < kBudgetGoldenMs;
    return {pass, "loops=" + std::to_string(path.loops()) + fmt(" max_err=%.2e", err) + fmt(" tol=%.0e", kGoldenTol) +
                      fmt(" median=%.4f ms", ms) + fmt(" budget=%.0f ms", kBudgetGoldenMs)};
}

Outcome identity_design() {
    bool pass = true;
    double err = 0.0;
    double worst_ms = 0.0;
    for (int d : {1, 2, 5, 10, 20}) {
        const Vector bs = identity_beta(d);
        const Dataset data = Dataset::from_gram(Matrix::Identity(d, d), bs);
        SaddlePath path;
        worst_ms = std::max(worst_ms, median_ms(11, [&] { path = sf::run(data); }));
        g_paths.push_back({"identity d=" + std::to_string(d), data, path});

        std::vector<Index> order(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) order[static_cast<std::size_t>(i)] = i;
        std::sort(order.begin(), order.end(), [&](Index a, Index b) { return std::abs(bs(a)) > std::abs(bs(b)); });
        if (path.loops() != d) {
            pass = false;
            continue;
        }
        Vector prefix = Vector::Zero(d);
        for (int k = 0; k < d; ++k) {
            const Index i = order[static_cast<std::size_t>(k)];
            prefix(i) = bs(i);
            err = std::max(err, std::abs(path.times[static_cast<std::size_t>(k + 1)] - 1.0 / std::abs(bs(i))));
            err = std::max(err, (path.saddles[static_cast<std::size_t>(k + 1)] - prefix).cwiseAbs().maxCoeff());
        }
    }
    pass = pass && err <= kIdentityTol && worst_ms < kBudgetIdentityMs;
    return {pass, fmt("d<=20 max_err=%.2e", err) + fmt(" tol=%.0e", kIdentityTol) + fmt(" worst_median=%.4f ms", worst_ms) +
                      fmt(" budget=%.0f ms", kBudgetIdentityMs)};
}

Outcome min_l1_equivalence() {
    const auto t0 = Clock::now();
    const auto instances = min_l1_instances();
    double worst = 0.0;
    int failed = 0;
    std::string first_error;
    for (std::size_t k = 0; k < instances.size(); ++k) {
        const Dataset& data = instances[k];
        try {
            const SaddlePath path = sf::run(data);
            const sf::LassoPath lasso = sf::lasso_homotopy(data, 0.0);
            worst = std::max(worst, (path.saddles.back() - lasso.endpoint()).cwiseAbs().maxCoeff());
            g_paths.push_back({"random #" + std::to_string(k), data, path});
        } catch (const std::exception& e) {
            if (failed++ == 0) first_error = e.what();
        }
    }
    const double s = seconds_since(t0);
    const bool pass = failed == 0 && worst <= kMinL1Tol && s < kBudgetMinL1S;
    return {pass, "instances=200 errors=" + std::to_string(failed) + fmt(" max_gap=%.2e", worst) + fmt(" tol=%.0e", kMinL1Tol) +
                      fmt(" time=%.2f s", s) + fmt(" budget=%.0f s", kBudgetMinL1S) +
                      (first_error.empty() ? "" : " first_error: " + first_error)};
}

Outcome key_equation() {
    std::size_t violations = 0;
    std::size_t bad_paths = 0;
    double worst = 0.0;
    for (const auto& c : g_paths) {
        const auto rep = sf::verify_key_equation(c.path, c.data, sf::default_time_grid(c.path, kKeyGrid), kKeyTol);
        violations += rep.violations;
        if (!rep.ok()) ++bad_paths;
        worst = std::max({worst, rep.k1, rep.k2, rep.k3, rep.k4});
    }
    const bool pass = !g_paths.empty() && violations == 0;
    return {pass, "paths=" + std::to_string(g_paths.size()) + " grid=1000 violations=" + std::to_string(violations) +
                      " bad_paths=" + std::to_string(bad_paths) + fmt(" worst_residual=%.2e", worst) +
                      fmt(" tol=%.0e", kKeyTol)};
}

Outcome flow_convergence() {
    const auto t0 = Clock::now();
    const Dataset data = golden_fixture();
    const SaddlePath path = sf::run(data);
    const sf::SweepTable table = sf::convergence_sweep(data, path);
    const double s = seconds_since(t0);
    double mid = 0.0;
    for (double m : table.rows.back().mid_dist) mid = std::max(mid, m);
    std::string sups = " sup=";
    std::string haus = " hausdorff=";
    for (const auto& r : table.rows) {
        sups += fmt("%.2e,", r.sup_max);
        haus += fmt("%.2e,", r.hausdorff);
    }
    const bool mono = table.sup_monotone() && table.hausdorff_monotone();
    const bool pass = table.rows.size() == 4 && mono && mid < kMidWindowTol && s < kBudgetSweepS;
    return {pass, std::string("monotone=") + (mono ? "yes" : "no") + sups + haus +
                      fmt(" mid_dist(1e-16)=%.2e", mid) + fmt(" tol=%.0e", kMidWindowTol) + fmt(" time=%.2f s", s) +
                      fmt(" budget=%.0f s", kBudgetSweepS)};
}

sf::GeneratorSpec fig1_spec() {
    sf::GeneratorSpec g;
    g.n = 5;
    g.d = 7;
    g.seed = 0;
    g.beta_star = Vector::Zero(7);
    g.beta_star(0) = 10.0;
    g.beta_star(1) = 20.0;
    return g;
}

bool loss_nonincreasing(const sf::FlowTrajectory& tr, double* worst_rise) {
    double rise = 0.0;
    for (std::size_t k = 1; k < tr.loss.size(); ++k) rise = std::max(rise, tr.loss[k] - tr.loss[k - 1]);
    *worst_rise = rise;
    for (std::size_t k = 1; k < tr.loss.size(); ++k)
        if (tr.loss[k] > tr.loss[k - 1] * (1.0 + kLossSlack)) return false;
    return true;
}

Outcome extreme_alpha() {
    const auto t0 = Clock::now();
    const Dataset data = sf::generate_dataset(fig1_spec());
    const SaddlePath path = sf::run(data);
    const sf::FlowTrajectory tr = sf::simulate(data, -120.0 * std::log(10.0), 1.25 * path.times.back());
    const double s = seconds_since(t0);
    double rise = 0.0;
    const bool mono = loss_nonincreasing(tr, &rise);
    bool finite = true;
    for (const auto& b : tr.beta) finite = finite && b.allFinite();
    const int jumps = sf::count_jumps(tr);
    const bool pass = finite && !tr.saturated && mono && jumps == path.loops() && s < kBudgetExtremeS;
    return {pass, "p=" + std::to_string(path.loops()) + " jumps=" + std::to_string(jumps) +
                      " samples=" + std::to_string(tr.times.size()) + " saturated=" + (tr.saturated ? "yes" : "no") +
                      " loss_nonincreasing=" + (mono ? "yes" : "no") + fmt(" max_rise=%.2e", rise) +
                      fmt(" time=%.2f s", s) + fmt(" budget=%.0f s", kBudgetExtremeS)};
}

Outcome rip_suite() {
    const auto t0 = Clock::now();
    Vector bs(6);
    bs << 3.0, -1.0, 0.0, 2.0, 0.0, 0.5;
    const Dataset ident = Dataset::from_gram(Matrix::Identity(6, 6), bs);
    const sf::RipReport ri = sf::rip_experiment(ident, bs);

    sf::GeneratorSpec g;
    g.n = 20000;
    g.d = 8;
    g.seed = 1;
    g.beta_star = Vector::Zero(8);
    g.beta_star(0) = 2.0;
    g.beta_star(1) = 1.0;
    const Dataset gauss = sf::generate_dataset(g);
    const sf::RipReport rg = sf::rip_experiment(gauss, g.beta_star);
    const double s = seconds_since(t0);

    auto asserted = [](const sf::RipReport& r) {
        return !r.assumption_failed && r.eps_exact && r.pass() && !r.checks.empty();
    };
    const bool pass = asserted(ri) && ri.eps_tilde <= kRipIdentityTol && asserted(rg) && s < kBudgetRipS;
    return {pass, "identity: r=" + std::to_string(ri.r) + " checks=" + std::to_string(ri.checks.size()) +
                      fmt(" eps=%.1e", ri.eps_tilde) + "; gaussian n=20000 d=8 r=" + std::to_string(rg.r) +
                      " checks=" + std::to_string(rg.checks.size()) + fmt(" eps=%.4f", rg.eps_tilde) +
                      fmt(" gap=%.2f", rg.gap) + " assumption=" + (rg.assumption_failed ? "failed" : "holds") +
                      fmt(" time=%.2f s", s) + fmt(" budget=%.0f s", kBudgetRipS)};
}

Outcome structural_audits() {
    std::size_t violations = 0;
    std::size_t bad = 0;
    std::string first;
    for (const auto& c : g_paths) {
        const sf::AuditReport rep = sf::termination_audit(c.path, c.data);
        violations += rep.violations.size();
        if (!rep.ok()) {
            ++bad;
            if (first.empty()) first = " first: " + c.label + ": " + rep.violations.front();
        }
    }
    return {!g_paths.empty() && violations == 0,
            "paths=" + std::to_string(g_paths.size()) + " violations=" + std::to_string(violations) +
                " bad_paths=" + std::to_string(bad) + first};
}

Outcome appendix_bounds() {
    struct Case {
        std::string label;
        Dataset data;
        double log10_alpha;
    };
    std::vector<Case> cases;
    for (double a : {-2.0, -4.0, -8.0, -16.0}) cases.push_back({"fixture", golden_fixture(), a});
    cases.push_back({"fig1", sf::generate_dataset(fig1_spec()), -120.0});
    cases.push_back({"random", random_instance(77, 6, 10), -8.0});

    std::size_t checked = 0;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;
    for (const auto& c : cases) {
        const SaddlePath path = sf::run(c.data);
        const Vector l1 = sf::lasso_homotopy(c.data, 0.0).endpoint();
        const sf::FlowTrajectory tr =
            sf::simulate(c.data, c.log10_alpha * std::log(10.0), 1.25 * path.times.back());
        const sf::BoundReport rep = sf::check_flow_bounds(c.data, tr, l1);
        if (!rep.applicable) continue;
        ++checked;
        samples += rep.samples;
        violations += rep.rate_violations + rep.box_violations;
        worst_ratio = std::max(worst_ratio, rep.worst_rate_ratio);
    }
    const bool pass = checked == cases.size() && violations == 0;
    return {pass, "trajectories=" + std::to_string(checked) + "/" + std::to_string(cases.size()) +
                      " samples=" + std::to_string(samples) + " violations=" + std::to_string(violations) +
                      fmt(" worst_rate_ratio=%.3f", worst_ratio)};
}

Outcome oracle_equivalence() {
    const auto t0 = Clock::now();
    double lsq_err = 0.0;
    double l1_err = 0.0;
    int instances = 0;
    int patterns = 0;
    int wide = 0;
    int errors = 0;
    std::string first_error;
    std::uint64_t seed = 5000;
    for (Index n = 2; n <= 5; ++n) {
        for (Index d = 2; d <= 6; ++d) {
            for (int rep = 0; rep < 5; ++rep, ++seed) {
                const Dataset data = random_instance(seed, n, d);
                ++instances;
                sf::Rng pick(seed ^ 0x9e3779b97f4a7c15ULL);
                for (int trial = 0; trial < 8; ++trial) {
                    sf::IndexSet plus;
                    sf::IndexSet minus;
                    for (Index j = 0; j < d; ++j) {
                        const auto r = pick.below(3);
                        if (r == 0) plus.push_back(j);
                        if (r == 1) minus.push_back(j);
                    }
                    ++patterns;
                    try {
                        const auto got = sf::constrained_lsq(data, sf::SignPattern(plus, minus));
                        const Vector want = oracle::constrained_lsq(data, plus, minus);
                        const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
                        if (static_cast<Index>(plus.size() + minus.size()) <= n) {
                            // X restricted to the allowed columns has full rank: unique minimiser.
                            lsq_err = std::max(lsq_err, (got.beta - want).cwiseAbs().maxCoeff() / scale);
                        } else {
                            // Interpolating faces can have several minimisers; compare the value.
                            const double lw = oracle::objective(data, want);
                            lsq_err = std::max(lsq_err, std::abs(sf::loss(data, got.beta) - lw) /
                                                            std::max(1.0, lw));
                            ++wide;
                        }
                    } catch (const std::exception& e) {
                        ++errors;
                        if (first_error.empty()) first_error = e.what();
                    }
                }
                try {
                    const Vector got = sf::lasso_homotopy(data, 0.0).endpoint();
                    const Vector want = oracle::min_l1(data);
                    l1_err = std::max(l1_err, (got - want).cwiseAbs().maxCoeff() /
                                                  std::max(1.0, want.cwiseAbs().maxCoeff()));
                } catch (const std::exception& e) {
                    ++errors;
                    if (first_error.empty()) first_error = e.what();
                }
            }
        }
    }
    const double s = seconds_since(t0);
    const bool pass = errors == 0 && lsq_err <= kOracleTol && l1_err <= kOracleTol && s < kBudgetOracleS;
    return {pass, "instances=" + std::to_string(instances) + " patterns=" + std::to_string(patterns) +
                      " (by value: " + std::to_string(wide) + ") errors=" + std::to_string(errors) +
                      fmt(" lsq_err=%.2e", lsq_err) + fmt(" min_l1_err=%.2e", l1_err) + fmt(" tol=%.0e", kOracleTol) +
                      fmt(" time=%.2f s", s) + fmt(" budget=%.0f s", kBudgetOracleS) +
                      (first_error.empty() ? "" : " first_error: " + first_error)};
}

}  // namespace

int main() {
    report(1, "golden fixture", golden);
    report(2, "identity design", identity_design);
    report(3, "min-l1 equivalence", min_l1_equivalence);
    report(4, "key equation", key_equation);
    report(5, "flow convergence", flow_convergence);
    report(6, "extreme alpha", extreme_alpha);
    report(7, "RIP predictions", rip_suite);
    report(8, "structural audits", structural_audits);
    report(9, "flow bounds", appendix_bounds);
    report(10, "oracle equivalence", oracle_equivalence);
    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
