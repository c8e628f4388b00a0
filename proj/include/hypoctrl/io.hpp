#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hypoctrl/estimator.hpp"
#include "hypoctrl/simulate.hpp"

namespace hypoctrl {

/// Writes `t,z1..zd,y1..ydo` with one row per grid point.
void write_trajectory_csv(const std::string& path, const ModelSpec& model,
                          const Trajectory& traj);

struct CsvData {
    std::vector<std::string> columns;  // names after the leading `t`
    Vec times;
    Mat values;  // one column per name
};

/// Reads a numeric CSV with a `t` first column. Throws std::runtime_error
/// naming the offending line on ragged or non-numeric input.
CsvData read_csv(const std::string& path);

nlohmann::json estimation_result_to_json(const ModelSpec& model,
                                         const EstimationResult& result);

nlohmann::json mc_report_to_json(const ModelSpec& model, const MonteCarloReport& report);

}  // namespace hypoctrl
