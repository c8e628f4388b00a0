#include "hypoctrl/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace hypoctrl {

void write_trajectory_csv(const std::string& path, const ModelSpec& model,
                          const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    out << "t";
    for (int k = 1; k <= model.d(); ++k) out << ",z" << k;
    for (int k = 1; k <= model.d_o(); ++k) out << ",y" << k;
    out << "\n";
    for (int i = 0; i < traj.times.size(); ++i) {
        out << traj.times[i];
        for (int k = 0; k < model.d(); ++k) out << "," << traj.states(i, k);
        for (int k = 0; k < model.d_o(); ++k) out << "," << traj.observations(i, k);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_number(const std::string& s, const std::string& path, int lineno) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": non-numeric field '" + s + "'");
    }
}

}  // namespace

CsvData read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    auto header = split_line(line);
    if (header.empty() || header[0] != "t")
        throw std::runtime_error(path + ": header must start with 't'");

    CsvData data;
    data.columns.assign(header.begin() + 1, header.end());
    std::vector<double> times;
    std::vector<double> flat;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected " + std::to_string(header.size()) +
                                     " fields, got " + std::to_string(fields.size()));
        times.push_back(parse_number(fields[0], path, lineno));
        for (size_t k = 1; k < fields.size(); ++k)
            flat.push_back(parse_number(fields[k], path, lineno));
    }
    const int rows = static_cast<int>(times.size());
    const int cols = static_cast<int>(data.columns.size());
    data.times = Eigen::Map<Vec>(times.data(), rows);
    data.values = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>(flat.data(), rows, cols);
    return data;
}

nlohmann::json estimation_result_to_json(const ModelSpec& model,
                                         const EstimationResult& result) {
    nlohmann::json psi;
    for (int k = 0; k < model.n_params(); ++k)
        psi[model.params[k].name] = result.psi_hat[k];

    nlohmann::json k_table = nlohmann::json::array();
    for (const auto& entry : result.k_table) {
        nlohmann::json row{{"w", entry.w}, {"failed", entry.failed}};
        if (!entry.failed) {
            row["logK"] = entry.logK;
            row["contrast"] = entry.contrast;
            row["mean_u_sq"] = entry.mean_u_sq;
            row["fit_evals"] = entry.fit_evals;
            nlohmann::json p;
            for (int k = 0; k < model.n_params(); ++k)
                p[model.params[k].name] = entry.psi[k];
            row["psi"] = p;
        }
        k_table.push_back(row);
    }

    return nlohmann::json{
        {"model", model.name},
        {"psi_hat", psi},
        {"w_hat", result.w_hat},
        {"z0_hat", std::vector<double>(result.z0_hat.begin(), result.z0_hat.end())},
        {"k_table", k_table},
        {"diagnostics",
         {{"contrast_value", result.contrast_value}, {"m_B", result.m_B}}},
        {"wall_time_s", result.wall_time_s}};
}

nlohmann::json mc_report_to_json(const ModelSpec& model, const MonteCarloReport& report) {
    nlohmann::json mean, variance;
    for (int k = 0; k < model.n_params(); ++k) {
        mean[model.params[k].name] = report.mean[k];
        variance[model.params[k].name] = report.variance[k];
    }
    return nlohmann::json{{"model", model.name},
                          {"mean", mean},
                          {"variance", variance},
                          {"trials", report.trials},
                          {"failures", report.failures},
                          {"mean_trial_seconds", report.mean_trial_seconds}};
}

}  // namespace hypoctrl
