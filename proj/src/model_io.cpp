#include "statboost/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace statboost {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd vector_from_json(const json& a) {
    Eigen::VectorXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) =
        a[i].get<double>();
    return v;
}

std::string kind_name(LearnerKind k) {
    switch (k) {
        case LearnerKind::Linear: return "linear";
        case LearnerKind::Categorical: return "categorical";
        case LearnerKind::PSpline: return "pspline";
    }
    return "linear";
}

LearnerKind kind_from_name(const std::string& s) {
    if (s == "linear") return LearnerKind::Linear;
    if (s == "categorical") return LearnerKind::Categorical;
    if (s == "pspline") return LearnerKind::PSpline;
    throw DataError("unknown learner kind '" + s + "' in model file");
}

json built_learner_to_json(const BuiltLearner& bl, const Eigen::VectorXd& coef) {
    json j = learner_spec_to_json(bl.spec);
    j["knots"] = vector_to_json(bl.knots);
    j["levels"] = bl.levels;
    j["coefficients"] = vector_to_json(coef);
    return j;
}

BuiltLearner built_learner_from_json(const json& j, Eigen::VectorXd& coef) {
    BuiltLearner bl;
    bl.spec = learner_spec_from_json(j);
    bl.knots = vector_from_json(j.at("knots"));
    bl.levels = j.at("levels").get<std::vector<std::string>>();
    coef = vector_from_json(j.at("coefficients"));
    return bl;
}

json history_summary(const ModelFit& fit) {
    json counts = json::object();
    for (const auto& bl : fit.learners) counts[bl.spec.name()] = 0;
    for (const auto& rec : fit.history) {
        const std::string name =
            fit.learners[static_cast<std::size_t>(rec.selected)].spec.name();
        counts[name] = counts[name].get<int>() + 1;
    }
    json j;
    j["iterations"] = fit.mstop;
    j["selection_counts"] = counts;
    j["initial_risk"] = fit.offset_risk;
    j["final_risk"] = fit.final_risk();
    j["arc_length"] = fit.history.empty() ? 0.0 : arc_length(coefficient_path(fit));
    return j;
}

json standardization_to_json(const std::vector<StandardizationInfo>& info) {
    json a = json::array();
    for (const auto& s : info)
        a.push_back(json{{"column", s.column}, {"mean", s.mean}, {"sd", s.sd}});
    return a;
}

}  // namespace

std::vector<StandardizationInfo> standardization_of(const Dataset& d) {
    std::vector<StandardizationInfo> info;
    for (const auto& col : d.columns())
        if (col.scaling)
            info.push_back({col.name, col.scaling->mean, col.scaling->sd});
    return info;
}

Dataset apply_standardization(const Dataset& d,
                              const std::vector<StandardizationInfo>& info) {
    if (info.empty()) return d;
    std::vector<ColumnSpec> specs = d.columns();
    Eigen::MatrixXd values = d.values();
    for (const auto& s : info) {
        Eigen::Index j = d.column_index(s.column);
        if (specs[static_cast<std::size_t>(j)].kind != ColumnKind::Numeric)
            throw DataError("standardization recorded for non-numeric column '" +
                            s.column + "'");
        values.col(j) = (values.col(j).array() - s.mean) / s.sd;
        specs[static_cast<std::size_t>(j)].scaling = ColumnScaling{s.mean, s.sd};
    }
    return Dataset(std::move(specs), std::move(values), d.response());
}

json learner_spec_to_json(const BaseLearnerSpec& spec) {
    json j;
    j["name"] = spec.name();
    j["column"] = spec.column;
    j["kind"] = kind_name(spec.kind);
    j["intercept"] = spec.intercept;
    j["degree"] = spec.degree;
    j["interior_knots"] = spec.interior_knots;
    j["diff_order"] = spec.diff_order;
    j["lambda"] = spec.lambda;
    if (spec.df_target)
        j["df_target"] = *spec.df_target;
    else
        j["df_target"] = nullptr;
    return j;
}

BaseLearnerSpec learner_spec_from_json(const json& j) {
    BaseLearnerSpec spec;
    spec.column = j.at("column").get<std::string>();
    spec.kind = kind_from_name(j.at("kind").get<std::string>());
    spec.intercept = j.value("intercept", false);
    spec.degree = j.value("degree", 3);
    spec.interior_knots = j.value("interior_knots", 20);
    spec.diff_order = j.value("diff_order", 2);
    spec.lambda = j.value("lambda", 0.0);
    if (j.contains("df_target") && !j.at("df_target").is_null())
        spec.df_target = j.at("df_target").get<double>();
    return spec;
}

json model_to_json(const ModelFit& fit,
                   const std::vector<StandardizationInfo>& standardization) {
    json j;
    j["format"] = "statboost-model/1";
    j["kind"] = "boost";
    j["engine"] = fit.engine;
    j["family"] = fit.family->name();
    j["nu"] = fit.nu;
    j["mstop"] = fit.mstop;
    j["seed"] = fit.seed;
    j["offset"] = fit.offset;
    j["standardization"] = standardization_to_json(standardization);
    json learners = json::array();
    for (std::size_t k = 0; k < fit.learners.size(); ++k)
        learners.push_back(built_learner_to_json(fit.learners[k], fit.components[k]));
    j["learners"] = learners;
    if (fit.engine == "likelihood") j["penalties"] = fit.penalties;
    j["history_summary"] = history_summary(fit);
    j["warnings"] = fit.warnings;
    return j;
}

ModelFit model_from_json(const json& j) {
    if (j.value("kind", "") != "boost")
        throw DataError("model file does not hold a single-predictor boosting model");
    ModelFit fit;
    fit.engine = j.at("engine").get<std::string>();
    fit.family = make_family(j.at("family").get<std::string>());
    fit.nu = j.at("nu").get<double>();
    fit.mstop = j.at("mstop").get<int>();
    fit.seed = j.at("seed").get<std::uint64_t>();
    fit.offset = j.at("offset").get<double>();
    for (const auto& lj : j.at("learners")) {
        Eigen::VectorXd coef;
        fit.learners.push_back(built_learner_from_json(lj, coef));
        fit.components.push_back(std::move(coef));
    }
    if (j.contains("penalties"))
        fit.penalties = j.at("penalties").get<std::vector<double>>();
    return fit;
}

json lss_to_json(const LssFit& fit,
                 const std::vector<StandardizationInfo>& standardization) {
    json j;
    j["format"] = "statboost-model/1";
    j["kind"] = "lss";
    j["family"] = "gaussian-location-scale";
    j["nu"] = fit.nu;
    j["mstop_mu"] = fit.mstop_mu;
    j["mstop_sigma"] = fit.mstop_sigma;
    j["standardization"] = standardization_to_json(standardization);
    auto predictor_json = [](const LssPredictor& p) {
        json pj;
        pj["offset"] = p.offset;
        json learners = json::array();
        for (std::size_t k = 0; k < p.learners.size(); ++k)
            learners.push_back(built_learner_to_json(p.learners[k], p.components[k]));
        pj["learners"] = learners;
        return pj;
    };
    j["mu"] = predictor_json(fit.mu);
    j["sigma"] = predictor_json(fit.sigma);
    j["initial_nll"] = fit.offset_nll;
    j["final_nll"] = fit.final_nll();
    return j;
}

LssFit lss_from_json(const json& j) {
    if (j.value("kind", "") != "lss")
        throw DataError("model file does not hold a location-scale model");
    LssFit fit;
    fit.nu = j.at("nu").get<double>();
    fit.mstop_mu = j.at("mstop_mu").get<int>();
    fit.mstop_sigma = j.at("mstop_sigma").get<int>();
    auto predictor_from = [](const json& pj) {
        LssPredictor p;
        p.offset = pj.at("offset").get<double>();
        for (const auto& lj : pj.at("learners")) {
            Eigen::VectorXd coef;
            p.learners.push_back(built_learner_from_json(lj, coef));
            p.components.push_back(std::move(coef));
        }
        return p;
    };
    fit.mu = predictor_from(j.at("mu"));
    fit.sigma = predictor_from(j.at("sigma"));
    return fit;
}

std::vector<StandardizationInfo> standardization_from_json(const json& model) {
    std::vector<StandardizationInfo> info;
    if (!model.contains("standardization")) return info;
    for (const auto& s : model.at("standardization"))
        info.push_back({s.at("column").get<std::string>(), s.at("mean").get<double>(),
                        s.at("sd").get<double>()});
    return info;
}

json stabsel_to_json(const StabSelResult& r) {
    json j;
    j["format"] = "statboost-stabsel/1";
    j["q"] = r.q;
    j["B"] = r.B;
    j["p"] = r.p;
    j["pi_thr"] = r.pi_thr;
    j["pfer"] = r.pfer;
    j["supplied"] = r.supplied;
    j["threshold_loose"] = r.threshold_loose;
    j["seed"] = r.seed;
    json freq = json::object();
    for (std::size_t k = 0; k < r.learner_names.size(); ++k)
        freq[r.learner_names[k]] = r.frequencies[k];
    j["frequencies"] = freq;
    json stable = json::array();
    for (std::size_t k = 0; k < r.learner_names.size(); ++k)
        if (r.frequencies[k] >= r.pi_thr) stable.push_back(r.learner_names[k]);
    j["stable"] = stable;
    return j;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << content;
}

std::string path_csv(const PathMatrix& path) {
    std::ostringstream out;
    out << "iteration";
    for (const auto& label : path.labels) out << "," << label;
    out << "\n";
    for (Eigen::Index m = 0; m < path.values.rows(); ++m) {
        out << m;
        for (Eigen::Index j = 0; j < path.values.cols(); ++j)
            out << "," << format_double(path.values(m, j));
        out << "\n";
    }
    return out.str();
}

std::string risk_csv(const ModelFit& fit) {
    std::ostringstream out;
    out << "iteration,selected,risk\n";
    out << "0,," << format_double(fit.offset_risk) << "\n";
    for (std::size_t m = 0; m < fit.history.size(); ++m) {
        const auto& rec = fit.history[m];
        out << (m + 1) << ","
            << fit.learners[static_cast<std::size_t>(rec.selected)].spec.name() << ","
            << format_double(rec.risk) << "\n";
    }
    return out.str();
}

std::string riskgrid_csv(const RiskGrid& rg) {
    std::ostringstream out;
    out << "fold";
    for (int m : rg.grid) out << ",m" << m;
    out << "\n";
    for (Eigen::Index f = 0; f < rg.risks.rows(); ++f) {
        out << f;
        for (Eigen::Index g = 0; g < rg.risks.cols(); ++g)
            out << "," << format_double(rg.risks(f, g));
        out << "\n";
    }
    return out.str();
}

std::string tune2_csv(const Tune2Result& r) {
    std::ostringstream out;
    out << "nu";
    for (int m : r.mstop_grid) out << ",m" << m;
    out << "\n";
    for (std::size_t a = 0; a < r.nu_grid.size(); ++a) {
        out << format_double(r.nu_grid[a]);
        for (Eigen::Index g = 0; g < r.mean_risk.cols(); ++g)
            out << "," << format_double(r.mean_risk(static_cast<Eigen::Index>(a), g));
        out << "\n";
    }
    return out.str();
}

std::string lss_surface_csv(const LssTuneResult& r) {
    std::ostringstream out;
    out << "mstop_mu";
    for (int b : r.grid_sigma) out << ",s" << b;
    out << "\n";
    for (std::size_t a = 0; a < r.grid_mu.size(); ++a) {
        out << r.grid_mu[a];
        for (Eigen::Index g = 0; g < r.mean_nll.cols(); ++g)
            out << "," << format_double(r.mean_nll(static_cast<Eigen::Index>(a), g));
        out << "\n";
    }
    return out.str();
}

std::string lss_risk_csv(const LssFit& fit) {
    std::ostringstream out;
    out << "step,iteration,predictor,selected,nll\n";
    out << "0,0,,," << format_double(fit.offset_nll) << "\n";
    for (std::size_t s = 0; s < fit.history.size(); ++s) {
        const auto& step = fit.history[s];
        const auto& pred = step.predictor == 0 ? fit.mu : fit.sigma;
        out << (s + 1) << "," << step.iteration << ","
            << (step.predictor == 0 ? "mu" : "sigma") << ","
            << pred.learners[static_cast<std::size_t>(step.selected)].spec.name() << ","
            << format_double(step.nll) << "\n";
    }
    return out.str();
}

std::string frequency_table(const StabSelResult& r) {
    std::vector<std::size_t> order(r.learner_names.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (r.frequencies[a] != r.frequencies[b])
            return r.frequencies[a] > r.frequencies[b];
        return r.learner_names[a] < r.learner_names[b];
    });
    std::ostringstream out;
    out << "rank\tfrequency\tstable\tlearner\n";
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        std::size_t k = order[rank];
        out << (rank + 1) << "\t" << format_double(r.frequencies[k]) << "\t"
            << (r.frequencies[k] >= r.pi_thr ? "yes" : "no") << "\t"
            << r.learner_names[k] << "\n";
    }
    return out.str();
}

}  // namespace statboost
