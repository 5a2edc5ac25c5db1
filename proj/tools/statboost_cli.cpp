// statboost: batch CLI around the boosting library. Subcommands: fit, cv,
// tune2, stabsel, lss, predict, diagnose. All randomness flows through one
// --seed; artifacts are byte-stable under re-runs with the same effective
// config (timestamps live only in run.log).

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "statboost/model_io.hpp"
#include "statboost/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace statboost;

namespace {

struct RunConfig {
    std::string data_path;
    std::string response;
    std::string out_dir = ".";
    std::string family = "gaussian";
    std::string engine = "gradient";
    double nu = 0.1;
    int mstop = 100;
    double penalty = -1.0;  // likelihood engine; <0 = step-equivalence heuristic
    std::vector<std::string> learners;
    std::vector<std::string> learners_mu;
    std::vector<std::string> learners_sigma;
    std::string default_learner = "spline";
    bool no_standardize = false;
    std::uint64_t seed = 1;
    int jobs = 0;  // 0: resolve from STATBOOST_JOBS, then 1

    std::string plan = "subsample";
    double fraction = 0.5;
    int kfold = 5;
    int replications = 25;

    std::string grid = "0:100";
    std::string nu_grid = "0.05,0.1,0.25,0.5";
    std::string grid_mu = "0:100:5";
    std::string grid_sigma = "0:100:5";

    int q = 0;
    int stab_b = 100;
    double pi_thr = -1.0;
    double pfer = -1.0;
    int iteration_cap = 0;

    int mstop_mu = 100;
    int mstop_sigma = 100;
    bool lss_tune = false;

    std::string model_path;
    std::string scale = "link";
    std::string path_file;
};

// --- config file -----------------------------------------------------------

std::string prescan_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return "";
}

void apply_config_file(RunConfig& rc, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");

    auto get = [&](const char* key, auto& target) {
        if (cfg.contains(key)) {
            try {
                target = cfg.at(key).get<std::decay_t<decltype(target)>>();
            } catch (const json::exception&) {
                throw ConfigError(std::string("config key '") + key +
                                  "' has the wrong type");
            }
        }
    };
    static const std::vector<std::string> known = {
        "data", "response", "out", "family", "engine", "nu", "mstop", "penalty",
        "learners", "learners_mu", "learners_sigma", "default_learner",
        "no_standardize", "seed", "jobs", "plan", "fraction", "kfold",
        "replications", "grid", "nu_grid", "grid_mu", "grid_sigma", "q", "stab_b",
        "pi_thr", "pfer", "iteration_cap", "mstop_mu", "mstop_sigma", "tune",
        "model", "scale", "path"};
    for (const auto& item : cfg.items())
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            throw ConfigError("unknown config key '" + item.key() + "'");

    get("data", rc.data_path);
    get("response", rc.response);
    get("out", rc.out_dir);
    get("family", rc.family);
    get("engine", rc.engine);
    get("nu", rc.nu);
    get("mstop", rc.mstop);
    get("penalty", rc.penalty);
    get("learners", rc.learners);
    get("learners_mu", rc.learners_mu);
    get("learners_sigma", rc.learners_sigma);
    get("default_learner", rc.default_learner);
    get("no_standardize", rc.no_standardize);
    get("seed", rc.seed);
    get("jobs", rc.jobs);
    get("plan", rc.plan);
    get("fraction", rc.fraction);
    get("kfold", rc.kfold);
    get("replications", rc.replications);
    get("grid", rc.grid);
    get("nu_grid", rc.nu_grid);
    get("grid_mu", rc.grid_mu);
    get("grid_sigma", rc.grid_sigma);
    get("q", rc.q);
    get("stab_b", rc.stab_b);
    get("pi_thr", rc.pi_thr);
    get("pfer", rc.pfer);
    get("iteration_cap", rc.iteration_cap);
    get("mstop_mu", rc.mstop_mu);
    get("mstop_sigma", rc.mstop_sigma);
    get("tune", rc.lss_tune);
    get("model", rc.model_path);
    get("scale", rc.scale);
    get("path", rc.path_file);
}

// --- parsing helpers -------------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

std::vector<int> parse_int_grid(const std::string& s) {
    std::vector<int> grid;
    if (s.find(',') != std::string::npos || s.find(':') == std::string::npos) {
        for (const auto& tok : split(s, ','))
            if (!tok.empty()) grid.push_back(std::stoi(tok));
    } else {
        auto parts = split(s, ':');
        int lo = std::stoi(parts[0]);
        int hi = std::stoi(parts[1]);
        int step = parts.size() > 2 ? std::stoi(parts[2]) : 1;
        if (step < 1) throw ConfigError("grid step must be >= 1");
        for (int m = lo; m <= hi; m += step) grid.push_back(m);
    }
    if (grid.empty()) throw ConfigError("grid '" + s + "' is empty");
    return grid;
}

std::vector<double> parse_double_grid(const std::string& s) {
    std::vector<double> grid;
    for (const auto& tok : split(s, ','))
        if (!tok.empty()) grid.push_back(std::stod(tok));
    if (grid.empty()) throw ConfigError("grid '" + s + "' is empty");
    return grid;
}

// "column:kind[:df=..][:degree=..][:knots=..][:diff=..]"
BaseLearnerSpec parse_learner_flag(const std::string& s, const Dataset& d) {
    auto parts = split(s, ':');
    if (parts.size() < 2)
        throw ConfigError("learner spec '" + s + "': expected column:kind[...]");
    const std::string& column = parts[0];
    if (!d.has_column(column))
        throw ConfigError("learner spec '" + s + "': no such column '" + column + "'");
    const std::string& kind = parts[1];

    BaseLearnerSpec spec;
    if (kind == "linear") {
        spec = BaseLearnerSpec::linear(column, false);
    } else if (kind == "linear1") {
        spec = BaseLearnerSpec::linear(column, true);
    } else if (kind == "categorical") {
        spec = BaseLearnerSpec::categorical(column);
    } else if (kind == "spline" || kind == "pspline") {
        spec = BaseLearnerSpec::pspline(column);
    } else {
        throw ConfigError("learner spec '" + s + "': unknown kind '" + kind +
                          "' (linear, linear1, spline, categorical)");
    }
    for (std::size_t i = 2; i < parts.size(); ++i) {
        auto kv = split(parts[i], '=');
        if (kv.size() != 2)
            throw ConfigError("learner spec '" + s + "': bad option '" + parts[i] + "'");
        if (kv[0] == "df")
            spec.df_target = std::stod(kv[1]);
        else if (kv[0] == "lambda")
            spec.lambda = std::stod(kv[1]);
        else if (kv[0] == "degree")
            spec.degree = std::stoi(kv[1]);
        else if (kv[0] == "knots")
            spec.interior_knots = std::stoi(kv[1]);
        else if (kv[0] == "diff")
            spec.diff_order = std::stoi(kv[1]);
        else
            throw ConfigError("learner spec '" + s + "': unknown option '" + kv[0] + "'");
    }
    if (spec.kind == LearnerKind::Linear && spec.df_target)
        spec.df_target.reset();  // linear df is fixed by its design width
    return spec;
}

std::vector<BaseLearnerSpec> resolve_learners(const std::vector<std::string>& flags,
                                              const std::string& default_learner,
                                              const Dataset& d) {
    std::vector<BaseLearnerSpec> specs;
    if (!flags.empty()) {
        for (const auto& f : flags) specs.push_back(parse_learner_flag(f, d));
        return specs;
    }
    if (default_learner != "spline" && default_learner != "linear")
        throw ConfigError("default learner must be 'spline' or 'linear'");
    for (const auto& col : d.columns()) {
        if (col.kind == ColumnKind::Numeric) {
            specs.push_back(default_learner == "spline"
                                ? BaseLearnerSpec::pspline(col.name)
                                : BaseLearnerSpec::linear(col.name));
        } else {
            // Ridge-calibrated to the shared complexity (capped by the level
            // count, which is the df ceiling of the dummy design).
            double df = default_learner == "spline"
                            ? std::min(4.0, static_cast<double>(col.level_count()))
                            : 1.0;
            specs.push_back(BaseLearnerSpec::categorical(col.name, df));
        }
    }
    if (specs.empty()) throw ConfigError("dataset has no covariate columns");
    return specs;
}

ResamplingPlan resolve_plan(const RunConfig& rc) {
    if (rc.plan == "subsample")
        return ResamplingPlan::subsample(rc.fraction, rc.replications, rc.seed);
    if (rc.plan == "kfold") return ResamplingPlan::kfold(rc.kfold, rc.seed);
    if (rc.plan == "bootstrap")
        return ResamplingPlan::bootstrap(rc.replications, rc.seed);
    throw ConfigError("unknown plan '" + rc.plan +
                      "' (subsample, kfold or bootstrap)");
}

int resolve_jobs(const RunConfig& rc) {
    if (rc.jobs > 0) return rc.jobs;
    if (const char* env = std::getenv("STATBOOST_JOBS")) {
        int j = std::atoi(env);
        if (j > 0) return j;
    }
    return 1;
}

json plan_to_json(const ResamplingPlan& plan) {
    json j;
    switch (plan.scheme) {
        case ResamplingScheme::KFold:
            j["scheme"] = "kfold";
            j["k"] = plan.k;
            break;
        case ResamplingScheme::Subsample:
            j["scheme"] = "subsample";
            j["fraction"] = plan.fraction;
            j["replications"] = plan.replications;
            break;
        case ResamplingScheme::Bootstrap:
            j["scheme"] = "bootstrap";
            j["replications"] = plan.replications;
            break;
    }
    j["seed"] = plan.seed;
    return j;
}

// --- artifacts -------------------------------------------------------------

struct RunContext {
    RunConfig rc;
    std::string subcommand;
    fs::path out;
    int jobs = 1;

    void write(const std::string& filename, const std::string& content) const {
        write_text_file((out / filename).string(), content);
    }
    void write_json(const std::string& filename, const json& j) const {
        write(filename, j.dump(2) + "\n");
    }
};

json learner_list_json(const std::vector<BaseLearnerSpec>& specs) {
    json ls = json::array();
    for (const auto& s : specs) ls.push_back(learner_spec_to_json(s));
    return ls;
}

json effective_config(const RunContext& ctx,
                      const std::vector<BaseLearnerSpec>* specs,
                      const ResamplingPlan* plan) {
    const RunConfig& rc = ctx.rc;
    json j;
    j["subcommand"] = ctx.subcommand;
    j["data"] = rc.data_path;
    j["response"] = rc.response;
    j["out"] = rc.out_dir;
    j["seed"] = rc.seed;
    j["jobs"] = ctx.jobs;
    j["standardize"] = !rc.no_standardize;
    if (ctx.subcommand != "predict" && ctx.subcommand != "diagnose") {
        j["family"] = rc.family;
        j["engine"] = rc.engine;
        j["nu"] = rc.nu;
    }
    if (specs) j["learners"] = learner_list_json(*specs);
    if (plan) j["plan"] = plan_to_json(*plan);
    if (ctx.subcommand == "fit") {
        j["mstop"] = rc.mstop;
        if (rc.engine == "likelihood")
            j["penalty"] = rc.penalty < 0.0 ? json("heuristic") : json(rc.penalty);
    }
    if (ctx.subcommand == "cv") j["grid"] = rc.grid;
    if (ctx.subcommand == "tune2") {
        j["grid"] = rc.grid;
        j["nu_grid"] = rc.nu_grid;
    }
    if (ctx.subcommand == "stabsel") {
        j["q"] = rc.q;
        j["B"] = rc.stab_b;
        if (rc.pi_thr >= 0.0) j["pi_thr"] = rc.pi_thr;
        if (rc.pfer >= 0.0) j["pfer"] = rc.pfer;
        j["iteration_cap"] = rc.iteration_cap;
    }
    if (ctx.subcommand == "lss") {
        j["mstop_mu"] = rc.mstop_mu;
        j["mstop_sigma"] = rc.mstop_sigma;
        j["tune"] = rc.lss_tune;
        if (rc.lss_tune) {
            j["grid_mu"] = rc.grid_mu;
            j["grid_sigma"] = rc.grid_sigma;
        }
    }
    if (ctx.subcommand == "predict") {
        j["model"] = rc.model_path;
        j["scale"] = rc.scale;
    }
    return j;
}

void write_run_log(const RunContext& ctx, const std::string& status) {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    std::ofstream log(ctx.out / "run.log", std::ios::app);
    log << buf << " " << ctx.subcommand << " " << status << "\n";
}

Dataset load_input(const RunConfig& rc, bool standardize_data) {
    if (rc.data_path.empty()) throw ConfigError("--data is required");
    if (!fs::exists(rc.data_path))
        throw ConfigError("data file '" + rc.data_path + "' does not exist");
    if (rc.response.empty()) throw ConfigError("--response is required");
    Dataset d = load_csv(rc.data_path, rc.response);
    if (standardize_data) d = standardize(d);
    return d;
}

EngineConfig engine_config(const RunConfig& rc, std::vector<BaseLearnerSpec> specs) {
    EngineConfig cfg;
    cfg.engine = rc.engine;
    cfg.family = rc.family;
    cfg.learners = std::move(specs);
    cfg.nu = rc.nu;
    cfg.seed = rc.seed;
    if (rc.engine == "likelihood" && rc.penalty >= 0.0)
        cfg.penalties = {rc.penalty};
    return cfg;
}

// --- subcommands -----------------------------------------------------------

int cmd_fit(RunContext& ctx) {
    Dataset d = load_input(ctx.rc, !ctx.rc.no_standardize);
    auto specs = resolve_learners(ctx.rc.learners, ctx.rc.default_learner, d);
    EngineConfig cfg = engine_config(ctx.rc, specs);
    ctx.write_json("effective_config.json", effective_config(ctx, &specs, nullptr));

    ModelFit fit = fit_with(cfg, d, ctx.rc.mstop);
    json model = model_to_json(fit, standardization_of(d));
    ctx.write_json("model.json", model);
    ctx.write("path.csv", path_csv(coefficient_path(fit)));
    ctx.write("risk.csv", risk_csv(fit));

    json out;
    out["mstop"] = fit.mstop;
    out["initial_risk"] = fit.offset_risk;
    out["final_risk"] = fit.final_risk();
    out["warnings"] = fit.warnings;
    out["model"] = (ctx.out / "model.json").string();
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_cv(RunContext& ctx) {
    Dataset d = load_input(ctx.rc, !ctx.rc.no_standardize);
    auto specs = resolve_learners(ctx.rc.learners, ctx.rc.default_learner, d);
    EngineConfig cfg = engine_config(ctx.rc, specs);
    ResamplingPlan plan = resolve_plan(ctx.rc);
    ctx.write_json("effective_config.json", effective_config(ctx, &specs, &plan));

    RiskGrid rg = cvrisk(d, cfg, plan, parse_int_grid(ctx.rc.grid), ctx.jobs);
    ctx.write("riskgrid.csv", riskgrid_csv(rg));

    int best = select_mstop(rg);
    Eigen::VectorXd mean = rg.mean_risks();
    json out;
    out["selected_mstop"] = best;
    json means = json::array();
    for (std::size_t g = 0; g < rg.grid.size(); ++g)
        means.push_back(json{{"mstop", rg.grid[g]},
                             {"mean_risk", mean(static_cast<Eigen::Index>(g))}});
    out["mean_risks"] = means;
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_tune2(RunContext& ctx) {
    Dataset d = load_input(ctx.rc, !ctx.rc.no_standardize);
    auto specs = resolve_learners(ctx.rc.learners, ctx.rc.default_learner, d);
    EngineConfig cfg = engine_config(ctx.rc, specs);
    ResamplingPlan plan = resolve_plan(ctx.rc);
    ctx.write_json("effective_config.json", effective_config(ctx, &specs, &plan));

    Tune2Result r = tune_grid2(d, cfg, plan, parse_double_grid(ctx.rc.nu_grid),
                               parse_int_grid(ctx.rc.grid), ctx.jobs);
    ctx.write("riskgrid.csv", tune2_csv(r));

    json out;
    out["selected_nu"] = r.nu;
    out["selected_mstop"] = r.mstop;
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_stabsel(RunContext& ctx) {
    const RunConfig& rc = ctx.rc;
    if (rc.pi_thr >= 0.0 && rc.pfer >= 0.0)
        throw ConfigError("supply exactly one of --pi-thr and --pfer, not both");
    if (rc.pi_thr < 0.0 && rc.pfer < 0.0)
        throw ConfigError("one of --pi-thr and --pfer is required");
    if (rc.q < 1) throw ConfigError("--q is required and must be >= 1");
    if (rc.engine != "gradient")
        throw ConfigError("stabsel supports the gradient engine only");

    Dataset d = load_input(rc, !rc.no_standardize);
    auto specs = resolve_learners(rc.learners, rc.default_learner, d);
    EngineConfig cfg = engine_config(rc, specs);
    ctx.write_json("effective_config.json", effective_config(ctx, &specs, nullptr));

    StabSelControl control;
    control.q = rc.q;
    control.B = rc.stab_b;
    if (rc.pi_thr >= 0.0)
        control.pi_thr = rc.pi_thr;
    else
        control.pfer = rc.pfer;
    control.seed = rc.seed;
    control.iteration_cap = rc.iteration_cap;
    control.jobs = ctx.jobs;

    StabSelResult result = stabsel(d, cfg, control);
    ctx.write_json("stabsel.json", stabsel_to_json(result));
    ctx.write("frequencies.txt", frequency_table(result));

    json out;
    out["pi_thr"] = result.pi_thr;
    out["pfer"] = result.pfer;
    out["threshold_loose"] = result.threshold_loose;
    json stable = json::array();
    for (std::size_t k = 0; k < result.learner_names.size(); ++k)
        if (result.frequencies[k] >= result.pi_thr)
            stable.push_back(result.learner_names[k]);
    out["stable"] = stable;
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_lss(RunContext& ctx) {
    const RunConfig& rc = ctx.rc;
    Dataset d = load_input(rc, !rc.no_standardize);
    auto fallback = rc.learners;  // --learner applies to both predictors
    auto specs_mu = resolve_learners(rc.learners_mu.empty() ? fallback : rc.learners_mu,
                                     rc.default_learner, d);
    auto specs_sigma = resolve_learners(
        rc.learners_sigma.empty() ? fallback : rc.learners_sigma, rc.default_learner, d);
    json eff = effective_config(ctx, nullptr, nullptr);
    eff["family"] = "gaussian-location-scale";
    eff.erase("engine");
    eff["learners_mu"] = learner_list_json(specs_mu);
    eff["learners_sigma"] = learner_list_json(specs_sigma);
    if (rc.lss_tune) eff["plan"] = plan_to_json(resolve_plan(rc));
    ctx.write_json("effective_config.json", eff);

    LssConfig cfg;
    cfg.learners_mu = specs_mu;
    cfg.learners_sigma = specs_sigma;
    cfg.nu = rc.nu;

    int mstop_mu = rc.mstop_mu, mstop_sigma = rc.mstop_sigma;
    json out;
    if (rc.lss_tune) {
        ResamplingPlan plan = resolve_plan(rc);
        LssTuneResult tuned = tune_lss(d, cfg, plan, parse_int_grid(rc.grid_mu),
                                       parse_int_grid(rc.grid_sigma), ctx.jobs);
        mstop_mu = tuned.mstop_mu;
        mstop_sigma = tuned.mstop_sigma;
        ctx.write("riskgrid.csv", lss_surface_csv(tuned));
        out["selected_mstop_mu"] = mstop_mu;
        out["selected_mstop_sigma"] = mstop_sigma;
    }

    LssFit fit = fit_lss(d, specs_mu, specs_sigma, rc.nu, mstop_mu, mstop_sigma);
    ctx.write_json("model.json", lss_to_json(fit, standardization_of(d)));
    ctx.write("risk.csv", lss_risk_csv(fit));

    out["mstop_mu"] = mstop_mu;
    out["mstop_sigma"] = mstop_sigma;
    out["initial_nll"] = fit.offset_nll;
    out["final_nll"] = fit.final_nll();
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_predict(RunContext& ctx) {
    const RunConfig& rc = ctx.rc;
    if (rc.model_path.empty()) throw ConfigError("--model is required");
    if (!fs::exists(rc.model_path))
        throw ConfigError("model file '" + rc.model_path + "' does not exist");
    std::ifstream in(rc.model_path);
    json model;
    try {
        in >> model;
    } catch (const json::exception& e) {
        throw DataError("model file '" + rc.model_path + "': " + e.what());
    }
    // New data needs no response column; an explicitly named one is checked.
    if (rc.data_path.empty()) throw ConfigError("--data is required");
    if (!fs::exists(rc.data_path))
        throw ConfigError("data file '" + rc.data_path + "' does not exist");
    Dataset raw = load_csv(rc.data_path, rc.response);
    Dataset d = apply_standardization(raw, standardization_from_json(model));
    ctx.write_json("effective_config.json", effective_config(ctx, nullptr, nullptr));

    std::ostringstream csv;
    std::string kind = model.value("kind", "");
    if (kind == "boost") {
        ModelFit fit = model_from_json(model);
        PredictScale scale;
        if (rc.scale == "link")
            scale = PredictScale::Link;
        else if (rc.scale == "response")
            scale = PredictScale::Response;
        else
            throw ConfigError("--scale must be 'link' or 'response'");
        Eigen::VectorXd pred = predict(fit, d, scale);
        csv << "prediction\n";
        for (Eigen::Index i = 0; i < pred.size(); ++i)
            csv << format_double(pred(i)) << "\n";
    } else if (kind == "lss") {
        LssFit fit = lss_from_json(model);
        auto [mu, sigma] = predict_lss(fit, d);
        csv << "mu,sigma\n";
        for (Eigen::Index i = 0; i < mu.size(); ++i)
            csv << format_double(mu(i)) << "," << format_double(sigma(i)) << "\n";
    } else {
        throw DataError("model file '" + rc.model_path + "' has unknown kind");
    }
    ctx.write("predictions.csv", csv.str());
    json out;
    out["predictions"] = (ctx.out / "predictions.csv").string();
    std::cout << out.dump() << "\n";
    return 0;
}

double arc_length_of_path_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open path file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError("path file is empty");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split(line, ',');
        std::vector<double> row;
        for (std::size_t j = 1; j < fields.size(); ++j)
            row.push_back(std::stod(fields[j]));
        rows.push_back(std::move(row));
    }
    double total = 0.0;
    for (std::size_t m = 1; m < rows.size(); ++m)
        for (std::size_t j = 0; j < rows[m].size(); ++j)
            total += std::abs(rows[m][j] - rows[m - 1][j]);
    return total;
}

int cmd_diagnose(RunContext& ctx) {
    const RunConfig& rc = ctx.rc;
    if (rc.data_path.empty() && rc.path_file.empty())
        throw ConfigError("diagnose needs --data and/or --path");
    json out;
    if (!rc.data_path.empty()) {
        if (!fs::exists(rc.data_path))
            throw ConfigError("data file '" + rc.data_path + "' does not exist");
        // --response (optional) names a column to exclude from the covariance.
        Dataset d = load_csv(rc.data_path, rc.response);
        DominanceReport rep = diagonal_dominance(d);
        json margins = json::object();
        for (std::size_t j = 0; j < rep.columns.size(); ++j)
            margins[rep.columns[j]] = rep.margins(static_cast<Eigen::Index>(j));
        out["diagonal_dominance"] = json{{"dominant", rep.dominant},
                                         {"margins", margins}};
    }
    if (!rc.path_file.empty())
        out["arc_length"] = arc_length_of_path_csv(rc.path_file);
    ctx.write_json("effective_config.json", effective_config(ctx, nullptr, nullptr));
    ctx.write_json("diagnose.json", out);
    std::cout << out.dump() << "\n";
    return 0;
}

void add_common_options(CLI::App* sub, RunConfig& rc, bool wants_data = true) {
    sub->add_option("--config", "JSON config file; flags override file values")
        ->type_name("FILE");
    if (wants_data) {
        sub->add_option("--data", rc.data_path, "input CSV (header row required)");
        sub->add_option("--response", rc.response, "response column name");
        sub->add_flag("--no-standardize", rc.no_standardize,
                      "skip covariate standardization");
    }
    sub->add_option("--out", rc.out_dir, "output directory");
    sub->add_option("--seed", rc.seed, "master seed; all randomness derives from it");
    sub->add_option("--jobs", rc.jobs,
                    "parallel workers (default: STATBOOST_JOBS or 1)");
}

void add_model_options(CLI::App* sub, RunConfig& rc) {
    sub->add_option("--family", rc.family, "gaussian | binomial | poisson");
    sub->add_option("--engine", rc.engine, "gradient | likelihood");
    sub->add_option("--nu", rc.nu, "step length in (0, 1]");
    sub->add_option("--learner", rc.learners,
                    "column:kind[:df=..][:degree=..][:knots=..][:diff=..]; "
                    "repeatable; default: one learner per covariate column");
    sub->add_option("--default-learner", rc.default_learner,
                    "kind for unlisted numeric columns: spline | linear");
    sub->add_option("--penalty", rc.penalty,
                    "likelihood-engine step penalty (default: heuristic "
                    "matching gradient steps of size nu)");
}

void add_plan_options(CLI::App* sub, RunConfig& rc) {
    sub->add_option("--plan", rc.plan, "subsample | kfold | bootstrap");
    sub->add_option("--fraction", rc.fraction, "subsample fraction");
    sub->add_option("--kfold", rc.kfold, "number of folds for --plan kfold");
    sub->add_option("--replications", rc.replications,
                    "resampling replications B for subsample/bootstrap");
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig rc;
    CLI::App app{"statboost: component-wise boosting for structured additive "
                 "regression models"};
    app.require_subcommand(1);

    try {
        std::string config_path = prescan_config_path(argc, argv);
        if (!config_path.empty()) apply_config_file(rc, config_path);
    } catch (const ConfigError& e) {
        std::cerr << json{{"error", {{"code", 2}, {"type", "config"},
                                     {"message", e.what()}}}}.dump()
                  << "\n";
        return 2;
    }

    CLI::App* fit = app.add_subcommand("fit", "fit one boosting model");
    add_common_options(fit, rc);
    add_model_options(fit, rc);
    fit->add_option("--mstop", rc.mstop, "number of boosting iterations");

    CLI::App* cv = app.add_subcommand(
        "cv", "resampling-based early stopping over an mstop grid");
    add_common_options(cv, rc);
    add_model_options(cv, rc);
    add_plan_options(cv, rc);
    cv->add_option("--grid", rc.grid, "mstop grid: lo:hi[:step] or comma list");

    CLI::App* tune2 = app.add_subcommand("tune2", "two-dimensional (nu, mstop) tuning");
    add_common_options(tune2, rc);
    add_model_options(tune2, rc);
    add_plan_options(tune2, rc);
    tune2->add_option("--grid", rc.grid, "mstop grid: lo:hi[:step] or comma list");
    tune2->add_option("--nu-grid", rc.nu_grid, "comma list of step lengths");

    CLI::App* stab = app.add_subcommand(
        "stabsel", "stability selection with PFER control");
    add_common_options(stab, rc);
    add_model_options(stab, rc);
    stab->add_option("--q", rc.q, "distinct base-learners selected per run");
    stab->add_option("--B", rc.stab_b, "number of half-subsamples");
    stab->add_option("--pi-thr", rc.pi_thr, "selection frequency threshold");
    stab->add_option("--pfer", rc.pfer, "target bound for expected false positives");
    stab->add_option("--iteration-cap", rc.iteration_cap,
                     "per-run iteration cap (default: max(1000, 10q/nu))");

    CLI::App* lss = app.add_subcommand(
        "lss", "Gaussian location-scale boosting (two predictors)");
    add_common_options(lss, rc);
    lss->add_option("--nu", rc.nu, "step length in (0, 1]");
    lss->add_option("--learner", rc.learners, "learners for both predictors");
    lss->add_option("--learner-mu", rc.learners_mu, "location-predictor learners");
    lss->add_option("--learner-sigma", rc.learners_sigma, "scale-predictor learners");
    lss->add_option("--default-learner", rc.default_learner, "spline | linear");
    lss->add_option("--mstop-mu", rc.mstop_mu, "location stopping iteration");
    lss->add_option("--mstop-sigma", rc.mstop_sigma, "scale stopping iteration");
    lss->add_flag("--tune", rc.lss_tune, "tune (mstop_mu, mstop_sigma) on a 2-D grid");
    lss->add_option("--grid-mu", rc.grid_mu, "mstop_mu grid for --tune");
    lss->add_option("--grid-sigma", rc.grid_sigma, "mstop_sigma grid for --tune");
    add_plan_options(lss, rc);

    CLI::App* pred = app.add_subcommand("predict", "predict from a saved model");
    add_common_options(pred, rc);
    pred->add_option("--model", rc.model_path, "model.json from fit or lss");
    pred->add_option("--scale", rc.scale, "link | response");

    CLI::App* diag = app.add_subcommand(
        "diagnose", "path arc-length and diagonal-dominance diagnostics");
    add_common_options(diag, rc);
    diag->add_option("--path", rc.path_file, "path.csv from a fit run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << json{{"error", {{"code", 2}, {"type", "config"},
                                     {"message", e.what()}}}}.dump()
                  << "\n";
        return 2;
    }

    RunContext ctx;
    ctx.rc = rc;
    int code = 0;
    std::string error_type, error_message;
    try {
        ctx.subcommand = app.get_subcommands().front()->get_name();
        ctx.out = fs::path(rc.out_dir);
        fs::create_directories(ctx.out);
        ctx.jobs = resolve_jobs(rc);

        if (ctx.subcommand == "fit") code = cmd_fit(ctx);
        else if (ctx.subcommand == "cv") code = cmd_cv(ctx);
        else if (ctx.subcommand == "tune2") code = cmd_tune2(ctx);
        else if (ctx.subcommand == "stabsel") code = cmd_stabsel(ctx);
        else if (ctx.subcommand == "lss") code = cmd_lss(ctx);
        else if (ctx.subcommand == "predict") code = cmd_predict(ctx);
        else if (ctx.subcommand == "diagnose") code = cmd_diagnose(ctx);
        write_run_log(ctx, code == 0 ? "ok" : "failed");
        return code;
    } catch (const ConfigError& e) {
        code = 2; error_type = "config"; error_message = e.what();
    } catch (const DataError& e) {
        code = 3; error_type = "data"; error_message = e.what();
    } catch (const NumericError& e) {
        code = 4; error_type = "numeric"; error_message = e.what();
    } catch (const std::exception& e) {
        code = 4; error_type = "internal"; error_message = e.what();
    }
    std::cerr << json{{"error", {{"code", code}, {"type", error_type},
                                 {"message", error_message}}}}.dump()
              << "\n";
    if (!ctx.out.empty()) {
        std::error_code ec;
        if (fs::exists(ctx.out, ec)) write_run_log(ctx, "error: " + error_message);
    }
    return code;
}
