#ifndef STATBOOST_MODEL_IO_HPP
#define STATBOOST_MODEL_IO_HPP

#include <json.hpp>
#include <string>
#include <vector>

#include "statboost/engine.hpp"
#include "statboost/lss.hpp"
#include "statboost/stability.hpp"
#include "statboost/tuning.hpp"

namespace statboost {

/// Raw -> stored transform of the training data, replayed on new data at
/// prediction time.
struct StandardizationInfo {
    std::string column;
    double mean = 0.0;
    double sd = 1.0;
};

std::vector<StandardizationInfo> standardization_of(const Dataset& d);

/// Applies a recorded standardization to matching numeric columns.
Dataset apply_standardization(const Dataset& d,
                              const std::vector<StandardizationInfo>& info);

nlohmann::json learner_spec_to_json(const BaseLearnerSpec& spec);
BaseLearnerSpec learner_spec_from_json(const nlohmann::json& j);

/// Model serialization. The JSON carries everything prediction needs (spec,
/// knots, levels, coefficients, offset, family, standardization); training
/// matrices are not stored, so reloaded models cannot be continued.
nlohmann::json model_to_json(const ModelFit& fit,
                             const std::vector<StandardizationInfo>& standardization);
ModelFit model_from_json(const nlohmann::json& j);

nlohmann::json lss_to_json(const LssFit& fit,
                           const std::vector<StandardizationInfo>& standardization);
LssFit lss_from_json(const nlohmann::json& j);

std::vector<StandardizationInfo> standardization_from_json(const nlohmann::json& model);

nlohmann::json stabsel_to_json(const StabSelResult& r);

/// Shortest round-trip decimal representation; used for all CSV output so
/// reruns are byte-identical.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

std::string path_csv(const PathMatrix& path);
std::string risk_csv(const ModelFit& fit);
std::string riskgrid_csv(const RiskGrid& rg);
std::string tune2_csv(const Tune2Result& r);
std::string lss_surface_csv(const LssTuneResult& r);
std::string lss_risk_csv(const LssFit& fit);
std::string frequency_table(const StabSelResult& r);

}  // namespace statboost

#endif  // STATBOOST_MODEL_IO_HPP
