#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "glmdisc/baselines.hpp"
#include "glmdisc/trainer.hpp"

namespace glmdisc {

using Json = nlohmann::ordered_json;

inline constexpr const char* kModelFormat = "glmdisc-scorecard/1";

/// Any fitted model the CLI can write, read and score with.
using Scorecard = std::variant<GlmdiscModel, AllrModel, MdlpChi2Model>;

std::string method_name(const Scorecard& sc);
const Schema& schema_of(const Scorecard& sc);
Eigen::VectorXd predict(const Scorecard& sc, const Dataset& ds);

Json to_json(const Scorecard& sc);
Scorecard scorecard_from_json(const Json& j);

void save_model(const Scorecard& sc, const std::filesystem::path& path);
Scorecard load_model(const std::filesystem::path& path);

Json schema_to_json(const Schema& schema);
Schema schema_from_json(const Json& j);
Json quantizer_to_json(const FeatureQuantizer& fq,
                                 const std::vector<std::string>& labels);
FeatureQuantizer quantizer_from_json(const Json& j,
                                     const std::vector<std::string>& labels);

/// CSV with header epoch,bic,feature,m_hat,cutpoints_or_groups,best and one
/// row per (epoch, feature).
void write_trace_csv(const std::vector<TraceRecord>& trace, std::ostream& out);

/// Human-readable table of bins / groups with their coefficients.
void write_scorecard_table(const Scorecard& sc, std::ostream& out);

}  // namespace glmdisc
