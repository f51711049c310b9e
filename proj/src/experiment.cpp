#include "saddleflow/experiment.hpp"

#include <cmath>

#include "saddleflow/baselines.hpp"
#include "saddleflow/flow.hpp"
#include "saddleflow/io.hpp"
#include "saddleflow/random.hpp"
#include "saddleflow/saddle_path.hpp"
#include "saddleflow/verify.hpp"

namespace saddleflow {

GeneratorSpec generator_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "generator spec must be an object");
    GeneratorSpec spec;
    try {
        spec.n = j.at("n").get<Index>();
        spec.d = j.at("d").get<Index>();
        spec.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("covariance")) {
            const auto& cov = j.at("covariance");
            if (cov.is_string()) {
                if (cov.get<std::string>() != "identity")
                    throw Error(ErrorCode::InvalidArgument, "covariance must be \"identity\" or a list");
            } else {
                spec.covariance = cov.get<std::vector<double>>();
            }
        }
        spec.beta_star = vector_from_json(j.at("beta_star"));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("generator spec: ") + e.what());
    }
    if (spec.n < 1 || spec.d < 1) throw Error(ErrorCode::InvalidArgument, "n and d must be positive");
    if (spec.beta_star.size() != spec.d)
        throw Error(ErrorCode::DimensionMismatch, "beta_star must have length d");
    if (!spec.covariance.empty()) {
        if (static_cast<Index>(spec.covariance.size()) != spec.d)
            throw Error(ErrorCode::DimensionMismatch, "covariance must have length d");
        for (const double h : spec.covariance)
            if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "covariance entries must be positive");
    }
    return spec;
}

nlohmann::json to_json(const GeneratorSpec& spec) {
    nlohmann::json j;
    j["n"] = spec.n;
    j["d"] = spec.d;
    j["seed"] = spec.seed;
    if (spec.covariance.empty()) {
        j["covariance"] = "identity";
    } else {
        j["covariance"] = spec.covariance;
    }
    j["beta_star"] = to_json(spec.beta_star);
    j["rng"] = Rng::kName;
    return j;
}

Dataset generate_dataset(const GeneratorSpec& spec) {
    Rng rng(spec.seed);
    Matrix x = rng.normal_matrix(spec.n, spec.d);
    if (!spec.covariance.empty()) {
        for (Index j = 0; j < spec.d; ++j) x.col(j) *= std::sqrt(spec.covariance[static_cast<std::size_t>(j)]);
    }
    Vector y = x * spec.beta_star;
    return Dataset(std::move(x), std::move(y));
}

void write_generated(const std::filesystem::path& dir, const GeneratorSpec& spec) {
    const Dataset data = generate_dataset(spec);
    write_matrix_csv(dir / "X.csv", data.x());
    write_matrix_csv(dir / "y.csv", data.y());
    write_text(dir / "spec.json", dump_json(to_json(spec)));
}

Dataset dataset_from_config(const nlohmann::json& cfg, const std::filesystem::path& base) {
    if (!cfg.is_object()) throw Error(ErrorCode::InvalidArgument, "dataset entry must be an object");
    if (cfg.contains("generator")) return generate_dataset(generator_from_json(cfg.at("generator")));
    if (cfg.contains("gram")) {
        if (!cfg.contains("beta_star")) throw Error(ErrorCode::InvalidArgument, "gram datasets need beta_star");
        return Dataset::from_gram(matrix_from_json(cfg.at("gram")), vector_from_json(cfg.at("beta_star")));
    }
    if (cfg.contains("x") && cfg.contains("y")) {
        auto resolve = [&](const nlohmann::json& p) {
            std::filesystem::path path = p.get<std::string>();
            return path.is_relative() ? base / path : path;
        };
        return load_dataset(resolve(cfg.at("x")), resolve(cfg.at("y")), cfg.value("header", false));
    }
    throw Error(ErrorCode::InvalidArgument, "dataset needs x/y paths, a generator, or a gram matrix");
}

namespace {

nlohmann::json error_stage(const std::exception& e) {
    return {{"status", "error"}, {"message", e.what()}};
}

}  // namespace

RunResult run_all(const nlohmann::json& cfg, const std::filesystem::path& base, const std::filesystem::path& out_dir) {
    if (!cfg.is_object() || cfg.empty()) throw Error(ErrorCode::InvalidArgument, "empty configuration");
    if (!cfg.contains("dataset")) throw Error(ErrorCode::InvalidArgument, "configuration has no dataset");

    RunResult result;
    auto& bundle = result.bundle;
    bundle["rng"] = Rng::kName;
    bundle["config"] = cfg;
    auto fail = [&]() { result.ok = false; };

    std::optional<Dataset> data;
    try {
        data.emplace(dataset_from_config(cfg.at("dataset"), base));
        bundle["dataset"] = {{"n", data->n()}, {"d", data->d()}};
    } catch (const std::exception& e) {
        bundle["stages"]["dataset"] = error_stage(e);
        fail();
    }

    const nlohmann::json tol = cfg.value("tolerances", nlohmann::json::object());
    PathConfig pcfg;
    pcfg.tol_grad = tol.value("tol_grad", pcfg.tol_grad);
    pcfg.tol_kkt = tol.value("tol_kkt", pcfg.tol_kkt);
    pcfg.tie_tol = tol.value("tie_tol", pcfg.tie_tol);
    const double key_tol = tol.value("key_equation", 1e-8);

    std::optional<SaddlePath> path;
    if (data) {
        try {
            path.emplace(run(*data, pcfg));
            nlohmann::json stage = to_json(*path);
            stage["status"] = "ok";
            bundle["stages"]["path"] = stage;
            write_text(out_dir / "path.json", dump_json(to_json(*path)));
        } catch (const std::exception& e) {
            bundle["stages"]["path"] = error_stage(e);
            fail();
        }
    }

    if (path) {
        const KeyEquationReport key = verify_key_equation(*path, *data, default_time_grid(*path, 1000), key_tol);
        bundle["stages"]["key_equation"] = {{"status", key.ok() ? "ok" : "failed"}, {"samples", key.samples},
                                            {"k1", key.k1}, {"k2", key.k2}, {"k3", key.k3}, {"k4", key.k4},
                                            {"violations", key.violations}};
        if (!key.ok()) fail();

        const AuditReport audit = termination_audit(*path, *data);
        bundle["stages"]["audit"] = {{"status", audit.ok() ? "ok" : "failed"}, {"loops", audit.loops},
                                     {"loop_bound", audit.loop_bound}, {"min_l1_gap", audit.min_l1_gap},
                                     {"violations", audit.violations}};
        if (!audit.ok()) fail();

        if (cfg.contains("expect_times")) {
            const Vector want = vector_from_json(cfg.at("expect_times"));
            const double etol = cfg.value("expect_tol", 1e-10);
            bool match = want.size() == path->loops();
            double worst = 0.0;
            for (Index k = 0; match && k < want.size(); ++k)
                worst = std::max(worst, std::abs(path->times[static_cast<std::size_t>(k + 1)] - want(k)));
            match = match && worst <= etol;
            bundle["stages"]["expected_times"] = {{"status", match ? "ok" : "failed"}, {"max_error", worst}};
            if (!match) fail();
        }

        try {
            const LassoPath lasso = lasso_homotopy(*data, 0.0);
            const int k = static_cast<int>(std::min<std::size_t>(support_of(path->saddles.back()).size(),
                                                                 static_cast<std::size_t>(std::min(data->n(), data->d()))));
            const Vector greedy = omp(*data, k);
            bundle["stages"]["baselines"] = {
                {"status", "ok"},
                {"lasso_knots", lasso.lambdas},
                {"lasso_endpoint", to_json(lasso.endpoint())},
                {"omp", to_json(greedy)},
                {"omp_l1", greedy.lpNorm<1>()},
                {"min_l1", lasso.endpoint().lpNorm<1>()},
                {"omp_matches_min_l1", (greedy - lasso.endpoint()).cwiseAbs().maxCoeff() <= 1e-8}};
        } catch (const std::exception& e) {
            bundle["stages"]["baselines"] = error_stage(e);
        }

        if (cfg.value("hybrid", true)) {
            try {
                const HybridPath hybrid = build_hybrid_path(*data, *path);
                write_text(out_dir / "hybrid.csv", hybrid_csv(hybrid));
                bundle["stages"]["hybrid"] = {{"status", "ok"},
                                              {"segments", hybrid.segments.size()},
                                              {"total_length", hybrid.total_length}};
            } catch (const std::exception& e) {
                bundle["stages"]["hybrid"] = error_stage(e);
                fail();
            }
        }

        if (cfg.contains("sweep")) {
            const auto& sw = cfg.at("sweep");
            SweepConfig scfg;
            if (sw.contains("log10_alphas")) scfg.log10_alphas = sw.at("log10_alphas").get<std::vector<double>>();
            scfg.t_end = sw.value("t_end", scfg.t_end);
            scfg.shrink = sw.value("shrink", scfg.shrink);
            try {
                const SweepTable table = convergence_sweep(*data, *path, scfg);
                std::vector<std::vector<double>> rows;
                nlohmann::json jrows = nlohmann::json::array();
                for (const auto& r : table.rows) {
                    rows.push_back({r.log10_alpha, r.sup_max, r.hausdorff, r.jump_window_sup, r.final_loss,
                                    static_cast<double>(r.samples)});
                    jrows.push_back({{"log10_alpha", r.log10_alpha}, {"window_sup", r.window_sup},
                                     {"mid_dist", r.mid_dist}, {"sup_max", r.sup_max}, {"hausdorff", r.hausdorff},
                                     {"jump_window_sup", r.jump_window_sup}});
                }
                write_csv(out_dir / "sweep.csv",
                          {"log10_alpha", "sup_window", "hausdorff", "jump_window_sup", "final_loss", "samples"}, rows);
                const bool monotone = table.sup_monotone() && table.hausdorff_monotone();
                const bool hard = sw.value("assert_monotone", false);
                bundle["stages"]["sweep"] = {{"status", (!hard || monotone) ? "ok" : "failed"},
                                             {"t_end", table.t_end},
                                             {"shrink", table.shrink},
                                             {"monotone", monotone},
                                             {"rows", jrows}};
                if (hard && !monotone) fail();
            } catch (const std::exception& e) {
                bundle["stages"]["sweep"] = error_stage(e);
                fail();
            }
        }
    }

    bundle["ok"] = result.ok;
    write_text(out_dir / "bundle.json", dump_json(bundle));
    return result;
}

}  // namespace saddleflow
