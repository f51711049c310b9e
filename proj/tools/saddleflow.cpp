// saddleflow command line front end.
//
// Exit codes: 0 success, 1 a computation or hard assertion failed, 2 usage.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "saddleflow/baselines.hpp"
#include "saddleflow/experiment.hpp"
#include "saddleflow/flow.hpp"
#include "saddleflow/io.hpp"
#include "saddleflow/saddle_path.hpp"
#include "saddleflow/verify.hpp"

namespace sf = saddleflow;

namespace {

struct DataArgs {
    std::string x;
    std::string y;
    bool header = false;
};

void add_data_args(CLI::App* cmd, DataArgs& args) {
    cmd->add_option("--x", args.x, "design matrix CSV (n rows, d columns)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--y", args.y, "response CSV (n rows, one column)")->required()->check(CLI::ExistingFile);
    cmd->add_flag("--header", args.header, "skip one header line in each CSV");
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
    } else {
        sf::write_text(out, text);
    }
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        std::size_t used = 0;
        out.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw CLI::ValidationError("--sweep", "cannot parse '" + cell + "'");
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"saddleflow: saddle recursion, flow simulation and sparse baselines"};
    app.require_subcommand(1);

    DataArgs data_args;
    std::string json_out;
    std::string out;
    double tol = 1e-10;

    auto* path_cmd = app.add_subcommand("path", "run the saddle-to-saddle recursion");
    add_data_args(path_cmd, data_args);
    path_cmd->add_option("--json", json_out, "write the path as JSON here (default stdout)");
    path_cmd->add_option("--tol", tol, "gradient and KKT tolerance before scaling");

    double log10_alpha = -8.0;
    double t_end = 30.0;
    auto* sim_cmd = app.add_subcommand("simulate", "integrate the accelerated flow");
    add_data_args(sim_cmd, data_args);
    sim_cmd->add_option("--log10-alpha", log10_alpha, "initialisation scale, log10")->check(CLI::Range(-307.0, -1e-9));
    sim_cmd->add_option("--t-end", t_end, "final accelerated time")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--out", out, "trajectory CSV (default stdout)");
    sim_cmd->add_option("--tol", tol, "relative and absolute integrator tolerance");

    auto* hybrid_cmd = app.add_subcommand("hybrid", "saddle plateaus joined by heteroclinic orbits");
    add_data_args(hybrid_cmd, data_args);
    hybrid_cmd->add_option("--out", out, "polyline CSV (default stdout)");

    double lambda_min = 0.0;
    auto* lasso_cmd = app.add_subcommand("lasso", "exact Lasso homotopy");
    add_data_args(lasso_cmd, data_args);
    lasso_cmd->add_option("--lambda-min", lambda_min, "smallest regularisation")->check(CLI::NonNegativeNumber);
    lasso_cmd->add_option("--json", json_out, "write knots as JSON here (default stdout)");

    int k = 1;
    auto* omp_cmd = app.add_subcommand("omp", "orthogonal matching pursuit");
    add_data_args(omp_cmd, data_args);
    omp_cmd->add_option("--k", k, "number of greedy selections")->required()->check(CLI::NonNegativeNumber);
    omp_cmd->add_option("--json", json_out, "write the estimate as JSON here (default stdout)");

    bool rip = false;
    std::string beta_star_path;
    std::string sweep;
    auto* verify_cmd = app.add_subcommand("verify", "structural audit, RIP predictions and alpha sweep");
    add_data_args(verify_cmd, data_args);
    verify_cmd->add_flag("--rip", rip, "compare with the RIP predictions (needs --beta-star)");
    verify_cmd->add_option("--beta-star", beta_star_path, "CSV column with the sparse generator")
        ->check(CLI::ExistingFile);
    verify_cmd->add_option("--sweep", sweep, "comma separated log10 alphas, e.g. -2,-4,-8");
    verify_cmd->add_option("--t-end", t_end, "sweep horizon (default 1.25 t_p)");
    verify_cmd->add_option("--json", json_out, "report JSON (default stdout)");
    verify_cmd->add_option("--out", out, "sweep table CSV");

    std::string gen_config;
    std::string gen_dir = ".";
    long long gen_n = -1;
    long long gen_d = -1;
    std::uint64_t seed = 0;
    std::string gen_beta;
    std::string gen_cov;
    auto* gen_cmd = app.add_subcommand("generate", "write a seeded Gaussian dataset");
    gen_cmd->add_option("--config", gen_config, "generator spec JSON")->check(CLI::ExistingFile);
    gen_cmd->add_option("--n", gen_n, "rows");
    gen_cmd->add_option("--d", gen_d, "columns");
    gen_cmd->add_option("--seed", seed, "64-bit seed");
    gen_cmd->add_option("--beta-star", gen_beta, "comma separated generator coefficients");
    gen_cmd->add_option("--covariance", gen_cov, "comma separated diagonal covariance (default identity)");
    gen_cmd->add_option("--out", gen_dir, "output directory");

    std::string run_config;
    std::string run_dir = "saddleflow_out";
    auto* run_cmd = app.add_subcommand("run-all", "execute a full experiment from a JSON config");
    run_cmd->add_option("--config", run_config, "experiment config JSON")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", run_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*path_cmd) {
            const sf::Dataset data = sf::load_dataset(data_args.x, data_args.y, data_args.header);
            sf::PathConfig cfg;
            cfg.tol_grad = tol;
            cfg.tol_kkt = tol;
            const sf::SaddlePath path = sf::run(data, cfg);
            for (const auto& w : path.warnings) std::cerr << "warning: " << w << '\n';
            emit(sf::dump_json(sf::to_json(path)), json_out);
        } else if (*sim_cmd) {
            const sf::Dataset data = sf::load_dataset(data_args.x, data_args.y, data_args.header);
            sf::FlowConfig cfg;
            if (sim_cmd->count("--tol") > 0) {
                cfg.rel_tol = tol;
                cfg.abs_tol = tol;
            }
            const sf::FlowTrajectory traj = sf::simulate(data, log10_alpha * std::log(10.0), t_end, cfg);
            if (traj.saturated) std::cerr << "warning: beta reconstruction saturated\n";
            emit(sf::trajectory_csv(traj), out);
        } else if (*hybrid_cmd) {
            const sf::Dataset data = sf::load_dataset(data_args.x, data_args.y, data_args.header);
            const sf::HybridPath hybrid = sf::build_hybrid_path(data, sf::run(data));
            emit(sf::hybrid_csv(hybrid), out);
        } else if (*lasso_cmd) {
            const sf::Dataset data = sf::load_dataset(data_args.x, data_args.y, data_args.header);
            const sf::LassoPath lasso = sf::lasso_homotopy(data, lambda_min);
            nlohmann::json j;
            j["lambdas"] = lasso.lambdas;
            j["vertices"] = nlohmann::json::array();
            for (const auto& v : lasso.vertices) j["vertices"].push_back(sf::to_json(v));
            j["kkt_residuals"] = lasso.kkt_residuals;
            emit(sf::dump_json(j), json_out);
        } else if (*omp_cmd) {
            const sf::Dataset data = sf::load_dataset(data_args.x, data_args.y, data_args.header);
            nlohmann::json j;
            j["k"] = k;
            j["beta"] = sf::to_json(sf::omp(data, k));
            emit(sf::dump_json(j), json_out);
        } else if (*verify_cmd) {
            const sf::Dataset data = sf::load_dataset(data_args.x, data_args.y, data_args.header);
            const sf::SaddlePath path = sf::run(data);
            nlohmann::json report;
            bool ok = true;
            const sf::AuditReport audit = sf::termination_audit(path, data);
            report["audit"] = {{"ok", audit.ok()},
                               {"loops", audit.loops},
                               {"loop_bound", audit.loop_bound},
                               {"min_l1_gap", audit.min_l1_gap},
                               {"violations", audit.violations}};
            ok = ok && audit.ok();
            const sf::KeyEquationReport key =
                sf::verify_key_equation(path, data, sf::default_time_grid(path, 1000), 1e-8);
            report["key_equation"] = {{"ok", key.ok()}, {"k1", key.k1}, {"k2", key.k2},
                                      {"k3", key.k3},   {"k4", key.k4}, {"violations", key.violations}};
            ok = ok && key.ok();
            if (rip) {
                if (beta_star_path.empty()) throw CLI::ValidationError("--rip", "requires --beta-star");
                const sf::Matrix bs = sf::read_csv(beta_star_path);
                const sf::RipReport r = sf::rip_experiment(data, bs.col(0));
                nlohmann::json checks = nlohmann::json::array();
                for (const auto& c : r.checks)
                    checks.push_back({{"name", c.name}, {"value", c.value}, {"lo", c.lo}, {"hi", c.hi}, {"pass", c.pass}});
                report["rip"] = {{"r", r.r},
                                 {"eps_tilde", r.eps_tilde},
                                 {"eps_exact", r.eps_exact},
                                 {"eps", r.eps},
                                 {"gap", r.gap},
                                 {"assumption_failed", r.assumption_failed},
                                 {"assumption_note", r.assumption_note},
                                 {"loops_observed", r.loops_observed},
                                 {"times_observed", r.times_observed},
                                 {"checks", checks},
                                 {"pass", r.pass()}};
                ok = ok && r.pass();
            }
            if (!sweep.empty()) {
                sf::SweepConfig cfg;
                cfg.log10_alphas = parse_list(sweep);
                if (verify_cmd->count("--t-end") > 0) cfg.t_end = t_end;
                const sf::SweepTable table = sf::convergence_sweep(data, path, cfg);
                nlohmann::json rows = nlohmann::json::array();
                std::vector<std::vector<double>> csv;
                for (const auto& r : table.rows) {
                    rows.push_back({{"log10_alpha", r.log10_alpha}, {"window_sup", r.window_sup},
                                    {"mid_dist", r.mid_dist}, {"sup_max", r.sup_max},
                                    {"hausdorff", r.hausdorff}, {"jump_window_sup", r.jump_window_sup}});
                    csv.push_back({r.log10_alpha, r.sup_max, r.hausdorff, r.jump_window_sup});
                }
                report["sweep"] = {{"t_end", table.t_end},
                                   {"shrink", table.shrink},
                                   {"sup_monotone", table.sup_monotone()},
                                   {"hausdorff_monotone", table.hausdorff_monotone()},
                                   {"rows", rows}};
                if (!out.empty())
                    sf::write_csv(out, {"log10_alpha", "sup_window", "hausdorff", "jump_window_sup"}, csv);
            }
            report["ok"] = ok;
            emit(sf::dump_json(report), json_out);
            return ok ? 0 : 1;
        } else if (*gen_cmd) {
            sf::GeneratorSpec spec;
            if (!gen_config.empty()) {
                std::ifstream in(gen_config);
                spec = sf::generator_from_json(nlohmann::json::parse(in));
            } else {
                if (gen_n < 1 || gen_d < 1 || gen_beta.empty())
                    throw CLI::ValidationError("generate", "needs --config or --n, --d and --beta-star");
                nlohmann::json j{{"n", gen_n}, {"d", gen_d}, {"seed", seed}, {"beta_star", parse_list(gen_beta)}};
                if (!gen_cov.empty()) j["covariance"] = parse_list(gen_cov);
                spec = sf::generator_from_json(j);
            }
            if (gen_cmd->count("--seed") > 0) spec.seed = seed;
            sf::write_generated(gen_dir, spec);
        } else if (*run_cmd) {
            std::ifstream in(run_config);
            const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            nlohmann::json cfg;
            if (text.find_first_not_of(" \t\r\n") != std::string::npos) cfg = nlohmann::json::parse(text);
            if (!cfg.is_object() || cfg.empty()) {
                std::cerr << "error: empty configuration\n" << run_cmd->help();
                return 2;
            }
            const auto base = std::filesystem::path(run_config).parent_path();
            const sf::RunResult result = sf::run_all(cfg, base, run_dir);
            std::cout << sf::dump_json({{"ok", result.ok}, {"bundle", (std::filesystem::path(run_dir) / "bundle.json").string()}});
            return result.ok ? 0 : 1;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: bad JSON: " << e.what() << '\n';
        return 2;
    } catch (const sf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == sf::ErrorCode::InvalidArgument ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
