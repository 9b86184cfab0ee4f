#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dmh/codes.hpp"
#include "dmh/diagnostics.hpp"
#include "dmh/errors.hpp"
#include "dmh/geometry.hpp"
#include "dmh/io.hpp"
#include "dmh/random.hpp"

namespace dmh::cli {

namespace {

using Json = nlohmann::ordered_json;

void write_json(const std::filesystem::path& path, const Json& doc) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FileError("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

template <typename T>
std::vector<T> broadcast(const std::vector<T>& values, std::size_t count,
                         const char* name) {
    if (values.size() == count) return values;
    if (values.size() == 1) return std::vector<T>(count, values.front());
    throw ConfigError(std::string("--") + name + " needs 1 or " +
                      std::to_string(count) + " values, got " +
                      std::to_string(values.size()));
}

std::vector<double> resolve_betas(const std::vector<std::string>& spec,
                                  const MultimodalDataset& train_rows) {
    const std::size_t count = train_rows.views.size();
    const auto tokens = spec.empty() ? std::vector<std::string>(count, "auto")
                                     : broadcast(spec, count, "beta");
    std::vector<double> betas;
    betas.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (tokens[i] == "auto") {
            betas.push_back(auto_beta(train_rows.views[i]));
            continue;
        }
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(tokens[i], &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tokens[i].size()) {
            throw ConfigError("beta '" + tokens[i] + "' is not a number or auto");
        }
        betas.push_back(value);
    }
    return betas;
}

std::string suffix_for(int code_length, std::size_t total) {
    return total > 1 ? "_c" + std::to_string(code_length) : "";
}

Json trace_json(const TrainTrace& trace) {
    Json doc;
    doc["iterations_run"] = trace.iterations_run;
    doc["converged"] = trace.converged;
    doc["objective_per_iteration"] = trace.objective_per_iteration;
    doc["warnings"] = trace.warnings;
    return doc;
}

Json report_json(const EvalReport& r) {
    Json doc;
    doc["task"] = r.task;
    doc["code_length"] = r.code_length;
    doc["map"] = r.map;
    doc["f1"] = r.f1;
    doc["precision"] = r.precision;
    doc["recall"] = r.recall;
    doc["radius"] = r.radius;
    doc["cutoff"] = r.cutoff;
    doc["queries"] = r.queries;
    doc["excluded_queries"] = r.excluded_queries;
    doc["per_query_ap"] = r.per_query_ap;
    doc["per_query_f1"] = r.per_query_f1;
    return doc;
}

PreparedData prepare_with(const RunConfig& config,
                          const std::vector<double>* fixed_betas) {
    PreparedData prepared;
    MultimodalDataset raw;
    if (config.view_paths.empty()) {
        raw = generate_synthetic(config.synthetic);
    } else {
        if (config.labels_path.empty()) {
            throw ConfigError("--labels is required with --views");
        }
        auto loaded = load_dataset(config.view_paths, config.labels_path);
        raw = std::move(loaded.dataset);
        prepared.load_report = loaded.report;
    }
    raw = split_dataset(raw, config.test_fraction, config.train.seed);
    if (fixed_betas != nullptr) {
        prepared.betas = *fixed_betas;
    } else {
        prepared.betas = resolve_betas(config.beta, raw.subset(raw.split.train));
    }
    prepared.dataset = rescale_views(raw, prepared.betas);
    return prepared;
}

Json eval_document(const TrainedRun& run, const PreparedData& data,
                   const RunConfig& config, std::ostream& out) {
    Json doc;
    doc["code_length"] = run.model.code_length;
    doc["variant"] = run.model.variant;
    doc["radius"] = config.radius;
    Json tasks = Json::array();
    for (const auto& direction : feature_directions(data.dataset)) {
        const auto report = evaluate_cross_modal(run.model, data.dataset,
                                                 direction, config.cutoff,
                                                 config.radius);
        out << std::left << std::setw(24) << report.task << " c=" << std::setw(4)
            << report.code_length << " MAP " << std::fixed
            << std::setprecision(4) << report.map << "  F1@" << report.radius
            << ' ' << report.f1 << '\n';
        out.unsetf(std::ios::floatfield);
        tasks.push_back(report_json(report));
    }
    doc["tasks"] = std::move(tasks);
    return doc;
}

}  // namespace

std::vector<double> reference_gamma_grid() {
    return {1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
}

std::vector<double> reference_alpha_grid() { return {1, 5, 10, 15, 20, 25}; }

std::vector<double> reference_beta_grid() { return {1, 3, 15, 63, 255, 511}; }

PreparedData prepare_data(const RunConfig& config) {
    return prepare_with(config, nullptr);
}

std::vector<ViewHyper> resolve_hyper(const RunConfig& config,
                                     const MultimodalDataset& dataset,
                                     std::span<const double> betas) {
    const std::size_t count = dataset.views.size();
    std::vector<double> alphas;
    if (config.alpha.empty()) {
        for (const auto& view : dataset.views) {
            alphas.push_back(view.is_label_view ? kLabelAlpha : kFeatureAlpha);
        }
    } else {
        alphas = broadcast(config.alpha, count, "alpha");
    }
    const auto gammas =
        config.gamma.empty() ? std::vector<double>(count, kDefaultGamma)
                             : broadcast(config.gamma, count, "gamma");
    if (betas.size() != count) {
        throw ContractViolation("beta count differs from view count");
    }
    std::vector<ViewHyper> hyper(count);
    for (std::size_t i = 0; i < count; ++i) {
        hyper[i] = {alphas[i], betas[i], gammas[i]};
    }
    return hyper;
}

TrainedRun train_model(const PreparedData& data, const RunConfig& config,
                       int code_length) {
    const auto hyper = resolve_hyper(config, data.dataset, data.betas);
    const auto rows = data.dataset.subset(data.dataset.split.train);
    auto result = train(rows.views, config.train, hyper, code_length);

    TrainedRun run;
    run.model.code_length = code_length;
    run.model.variant = model_variant(result.params);
    run.model.config = config.train;
    for (std::size_t i = 0; i < rows.views.size(); ++i) {
        run.model.views.push_back({rows.views[i].view_id,
                                   rows.views[i].is_label_view,
                                   std::move(result.params[i])});
    }
    run.trace = std::move(result.trace);
    run.codes = std::move(result.codes);
    return run;
}

std::vector<Direction> feature_directions(const MultimodalDataset& dataset) {
    const auto features = dataset.feature_views();
    std::vector<Direction> out;
    for (std::size_t a : features) {
        for (std::size_t b : features) {
            if (a != b) out.push_back({a, b});
        }
    }
    if (out.empty()) {
        throw ConfigError("cross-modal evaluation needs two feature views");
    }
    return out;
}

int cmd_generate(const RunConfig& config, std::ostream& out) {
    const auto dataset = generate_synthetic(config.synthetic);
    const auto paths = save_dataset(dataset, config.out);
    for (const auto& path : paths) out << "wrote " << path.string() << '\n';
    out << "wrote " << (config.out / "labels.dmh").string() << '\n';
    return kExitOk;
}

int cmd_train(const RunConfig& config, std::ostream& out) {
    const auto data = prepare_data(config);
    if (data.load_report.rows_dropped > 0) {
        out << "dropped " << data.load_report.rows_dropped
            << " rows without labels\n";
    }
    std::filesystem::create_directories(config.out);
    for (int c : config.code_lengths) {
        TrainedRun run;
        try {
            run = train_model(data, config, c);
        } catch (const DivergedError& e) {
            out << "training diverged at iteration " << e.iteration() << '\n';
            return kExitDiverged;
        }
        for (const auto& warning : run.trace.warnings) {
            out << "warning: " << warning << '\n';
        }
        const auto suffix = suffix_for(c, config.code_lengths.size());
        io::save_model(config.out / ("model" + suffix + ".dmhm"), run.model);
        io::write_codes(config.out / ("train_codes" + suffix + ".dmhc"),
                        PackedCodes::pack(run.codes));
        write_json(config.out / ("trace" + suffix + ".json"),
                   trace_json(run.trace));
        out << "c=" << c << " variant=" << run.model.variant
            << " iterations=" << run.trace.iterations_run
            << " final objective: " << std::setprecision(17)
            << run.trace.objective_per_iteration.back() << '\n';
    }
    return kExitOk;
}

int cmd_encode(const RunConfig& config, std::ostream& out) {
    if (config.model_path.empty()) throw ConfigError("--model is required");
    if (config.input_path.empty()) throw ConfigError("--input is required");
    const auto model = io::load_model(config.model_path);
    std::size_t index = 0;
    if (config.view_id.empty()) {
        while (index < model.views.size() && model.views[index].is_label_view) {
            ++index;
        }
        if (index == model.views.size()) {
            throw ConfigError("model has no feature view");
        }
    } else {
        index = model.find_view(config.view_id);
    }
    const auto& view = model.views[index];
    ViewMatrix queries{io::read_matrix(config.input_path), view.id,
                       view.is_label_view};
    queries.data *= view.params.beta;
    const auto codes = encode_view(queries, view.params);
    std::filesystem::create_directories(config.out);
    const auto path = config.out / ("codes_" + view.id + ".dmhc");
    io::write_codes(path, codes);
    out << "encoded " << codes.size() << " rows with view '" << view.id
        << "' into " << path.string() << '\n';
    return kExitOk;
}

int cmd_eval(const RunConfig& config, std::ostream& out) {
    std::filesystem::create_directories(config.out);
    if (!config.model_path.empty()) {
        if (!std::filesystem::exists(config.model_path)) {
            throw FileError("model file '" + config.model_path.string() +
                            "' not found");
        }
        TrainedRun run;
        run.model = io::load_model(config.model_path);
        std::vector<double> betas;
        for (const auto& view : run.model.views) betas.push_back(view.params.beta);
        const auto data = prepare_with(config, &betas);
        if (data.dataset.views.size() != run.model.views.size()) {
            throw ConfigError("model has " + std::to_string(run.model.views.size()) +
                              " views, dataset has " +
                              std::to_string(data.dataset.views.size()));
        }
        const auto doc = eval_document(run, data, config, out);
        write_json(config.out / ("eval_c" + std::to_string(run.model.code_length) +
                                 ".json"),
                   doc);
        return kExitOk;
    }

    const auto data = prepare_data(config);
    for (int c : config.code_lengths) {
        TrainedRun run;
        try {
            run = train_model(data, config, c);
        } catch (const DivergedError& e) {
            out << "training diverged at iteration " << e.iteration() << '\n';
            return kExitDiverged;
        }
        const auto doc = eval_document(run, data, config, out);
        write_json(config.out / ("eval_c" + std::to_string(c) + ".json"), doc);
    }
    return kExitOk;
}

int cmd_ablate(const RunConfig& config, std::ostream& out) {
    struct Setting {
        std::string sweep;
        RunConfig config;
        double value = 0.0;
    };

    const double default_gamma =
        config.gamma.empty() ? kDefaultGamma : config.gamma.front();
    std::vector<Setting> settings;
    auto add = [&](const std::string& sweep, double value, auto&& mutate) {
        Setting s{sweep, config, value};
        mutate(s.config);
        settings.push_back(std::move(s));
    };
    const bool grids = !config.gamma_grid.empty() || !config.alpha_grid.empty() ||
                       !config.beta_grid.empty();
    if (!grids) {
        add("gamma", default_gamma,
            [&](RunConfig& c) { c.gamma = {default_gamma}; });
        add("gamma", 0.0, [](RunConfig& c) { c.gamma = {0.0}; });
    }
    for (double g : config.gamma_grid) {
        add("gamma", g, [g](RunConfig& c) { c.gamma = {g}; });
    }
    for (double a : config.alpha_grid) {
        // Sweeps the label-view weight; feature views keep alpha = 1.
        add("alpha", a, [](RunConfig& c) { c.alpha.clear(); });
    }
    for (double b : config.beta_grid) {
        // Sweeps the target range: beta_i = value / max|X_i| for every view.
        add("beta", b, [](RunConfig& c) { c.beta.clear(); });
    }

    Json runs = Json::array();
    Json comparisons = Json::array();
    out << std::left << std::setw(6) << "seed" << std::setw(7) << "sweep"
        << std::setw(10) << "value" << std::setw(10) << "map" << std::setw(10)
        << "f1" << "decorrelation\n";
    for (int s = 0; s < config.seeds; ++s) {
        const std::uint64_t seed = config.train.seed + static_cast<std::uint64_t>(s);
        std::vector<Json> seed_runs;
        for (const auto& setting : settings) {
            RunConfig rc = setting.config;
            rc.train.seed = seed;
            if (rc.view_paths.empty()) rc.synthetic.seed = seed;

            auto data = prepare_data(rc);
            if (setting.sweep == "beta") {
                // Views arrive scaled to [-255, 255] by the auto beta.
                const double factor = setting.value / 255.0;
                for (std::size_t i = 0; i < data.betas.size(); ++i) {
                    data.dataset.views[i].data *= factor;
                    data.betas[i] *= factor;
                }
            }
            if (setting.sweep == "alpha") {
                rc.alpha.clear();
                for (const auto& view : data.dataset.views) {
                    rc.alpha.push_back(view.is_label_view ? setting.value
                                                          : kFeatureAlpha);
                }
            }
            rc.code_lengths = {config.code_lengths.front()};
            const auto run = train_model(data, rc, rc.code_lengths.front());

            Json entry;
            entry["seed"] = seed;
            entry["sweep"] = setting.sweep;
            entry["value"] = setting.value;
            entry["variant"] = run.model.variant;
            entry["code_length"] = run.model.code_length;
            entry["iterations"] = run.trace.iterations_run;
            entry["final_objective"] = run.trace.objective_per_iteration.back();
            entry["decorrelation"] = mean_abs_column_correlation(run.codes);
            Json tasks = Json::array();
            double map_sum = 0.0;
            double f1_sum = 0.0;
            const auto directions = feature_directions(data.dataset);
            for (const auto& direction : directions) {
                const auto report = evaluate_cross_modal(
                    run.model, data.dataset, direction, rc.cutoff, rc.radius);
                Json t;
                t["task"] = report.task;
                t["map"] = report.map;
                t["f1"] = report.f1;
                tasks.push_back(std::move(t));
                map_sum += report.map;
                f1_sum += report.f1;
            }
            entry["tasks"] = std::move(tasks);
            const double mean_map = map_sum / static_cast<double>(directions.size());
            const double mean_f1 = f1_sum / static_cast<double>(directions.size());
            entry["mean_map"] = mean_map;
            entry["mean_f1"] = mean_f1;

            out << std::setw(6) << seed << std::setw(7) << setting.sweep
                << std::setw(10) << setting.value << std::fixed
                << std::setprecision(4) << std::setw(10) << mean_map
                << std::setw(10) << mean_f1 << entry["decorrelation"].get<double>()
                << '\n';
            out.unsetf(std::ios::floatfield);
            out << std::setprecision(6);
            seed_runs.push_back(entry);
            runs.push_back(std::move(entry));
        }
        if (!grids) {
            const Json& with = seed_runs[0];
            const Json& without = seed_runs[1];
            Json cmp;
            cmp["seed"] = seed;
            cmp["gamma"] = default_gamma;
            cmp["delta_mean_map"] =
                with["mean_map"].get<double>() - without["mean_map"].get<double>();
            cmp["delta_mean_f1"] =
                with["mean_f1"].get<double>() - without["mean_f1"].get<double>();
            cmp["delta_decorrelation"] = with["decorrelation"].get<double>() -
                                         without["decorrelation"].get<double>();
            comparisons.push_back(std::move(cmp));
        }
    }

    Json doc;
    doc["code_length"] = config.code_lengths.front();
    doc["runs"] = std::move(runs);
    doc["comparisons"] = std::move(comparisons);
    std::filesystem::create_directories(config.out);
    write_json(config.out / "ablation.json", doc);
    return kExitOk;
}

int cmd_gradcheck(const RunConfig& config, std::ostream& out) {
    static constexpr double kGammas[] = {0.0, 0.001, 0.1};
    diagnostics::GradientCheckOptions options;
    options.flip_sign = config.inject_sign_error;

    Json checks = Json::array();
    int failures = 0;
    out << std::left << std::setw(8) << "seed" << std::setw(5) << "n"
        << std::setw(4) << "d" << std::setw(4) << "c" << std::setw(8) << "gamma"
        << std::setw(13) << "err(v)" << std::setw(13) << "err(W)" << "result\n";
    for (int i = 0; i < config.instances; ++i) {
        const std::uint64_t seed = config.train.seed + static_cast<std::uint64_t>(i);
        const auto instance =
            diagnostics::random_gradient_instance(seed, kGammas[i % 3]);
        const auto check = diagnostics::check_gradients(instance, options);
        if (!check.passed) ++failures;
        out << std::setw(8) << seed << std::setw(5) << check.n << std::setw(4)
            << check.d << std::setw(4) << check.c << std::setw(8) << check.gamma
            << std::scientific << std::setprecision(3) << std::setw(13)
            << check.max_rel_error_bias << std::setw(13)
            << check.max_rel_error_weights << (check.passed ? "PASS" : "FAIL")
            << '\n';
        out.unsetf(std::ios::floatfield);
        out << std::setprecision(6);
        Json entry;
        entry["seed"] = seed;
        entry["n"] = check.n;
        entry["d"] = check.d;
        entry["c"] = check.c;
        entry["gamma"] = check.gamma;
        entry["max_rel_error_bias"] = check.max_rel_error_bias;
        entry["max_rel_error_weights"] = check.max_rel_error_weights;
        entry["passed"] = check.passed;
        checks.push_back(std::move(entry));
    }
    out << (failures == 0 ? "all gradient checks passed\n"
                          : std::to_string(failures) + " gradient checks failed\n");
    if (config.out != ".") {
        Json doc;
        doc["step"] = options.step;
        doc["rtol"] = options.rtol;
        doc["inject_sign_error"] = options.flip_sign;
        doc["checks"] = std::move(checks);
        write_json(config.out / "gradcheck.json", doc);
    }
    return failures == 0 ? kExitOk : kExitFailure;
}

int cmd_propcheck(const RunConfig& config, std::ostream& out) {
    Json rows = Json::array();
    int failures = 0;
    auto record = [&](const std::string& name, bool passed,
                      const std::string& detail, Json extra = Json::object()) {
        if (!passed) ++failures;
        out << std::left << std::setw(34) << name << std::setw(6)
            << (passed ? "PASS" : "FAIL") << detail << '\n';
        Json row;
        row["check"] = name;
        row["passed"] = passed;
        row["detail"] = detail;
        for (auto it = extra.begin(); it != extra.end(); ++it) {
            row[it.key()] = it.value();
        }
        rows.push_back(std::move(row));
    };
    auto fmt = [](double x) {
        std::ostringstream s;
        s << std::setprecision(6) << x;
        return s.str();
    };
    const std::uint64_t seed = config.train.seed;

    {
        const auto r = geometry::minimize_or_penalty(4, 4, seed);
        record("orthogonal minimiser d=c=4", r.penalty < 1e-6,
               "penalty " + fmt(r.penalty));
    }
    {
        const int d = config.prop_d;
        const int c = config.prop_c;
        const auto r = geometry::minimize_or_penalty(d, c, seed);
        bool passed;
        std::string detail;
        if (d == 2 && c == 3) {
            double worst = 0.0;
            for (double a : r.angles.pairwise_angles) {
                worst = std::max(worst, std::abs(a - 2.0 * std::numbers::pi / 3.0));
            }
            passed = worst < 1e-3;
            detail = "max |angle - 2pi/3| " + fmt(worst);
        } else {
            passed = r.angles.abs_cos_deviation < 1e-2;
            detail = "max ||cos| - mean| " + fmt(r.angles.abs_cos_deviation);
        }
        std::ostringstream angles;
        angles << " angles(deg)";
        for (double a : r.angles.pairwise_angles) {
            angles << ' ' << std::setprecision(6) << a * 180.0 / std::numbers::pi;
        }
        Json extra;
        extra["pairwise_angles"] = r.angles.pairwise_angles;
        record("equal angles d=" + std::to_string(d) + " c=" + std::to_string(c),
               passed, detail + angles.str(), extra);
    }
    {
        double worst = 0.0;
        Rng rng(seed);
        for (int i = 0; i < 50; ++i) {
            Matrix W(5, 8);
            for (Eigen::Index r = 0; r < W.rows(); ++r) {
                for (Eigen::Index k = 0; k < W.cols(); ++k) W(r, k) = rng.normal();
            }
            const auto R = geometry::random_orthogonal(8, rng.next_u64());
            worst = std::max(worst, geometry::rotation_invariance_check(W, R));
        }
        record("rotation invariance (50 pairs)", worst < 1e-8,
               "max |delta| " + fmt(worst));
    }
    {
        Rng rng(seed);
        int violations = 0;
        Json ranks = Json::array();
        for (int i = 0; i < 20; ++i) {
            const int d = 1 + static_cast<int>(rng.below(4));
            const int c = d + 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(15 - d)));
            ViewMatrix view{Matrix(50, d), "x", false};
            ViewParams params;
            params.W.resize(d, c);
            params.v.resize(c);
            for (Eigen::Index r = 0; r < 50; ++r) {
                for (int k = 0; k < d; ++k) view.data(r, k) = rng.normal();
            }
            for (int r = 0; r < d; ++r) {
                for (int k = 0; k < c; ++k) params.W(r, k) = rng.normal();
            }
            for (int k = 0; k < c; ++k) params.v(k) = rng.normal();
            const auto check = geometry::embedding_rank_bound_check(view, params);
            if (check.numerical_rank > check.bound) ++violations;
            ranks.push_back({{"d", d}, {"c", c},
                             {"rank", check.numerical_rank},
                             {"bound", check.bound}});
        }
        Json extra;
        extra["instances"] = ranks;
        record("embedding rank <= d+1 (20)", violations == 0,
               std::to_string(violations) + " of 20 instances exceed d+1", extra);
    }

    if (config.out != ".") {
        Json doc;
        doc["checks"] = std::move(rows);
        write_json(config.out / "propcheck.json", doc);
    }
    return failures == 0 ? kExitOk : kExitFailure;
}

}  // namespace dmh::cli
