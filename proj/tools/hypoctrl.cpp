#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hypoctrl/hypo.hpp"
#include "hypoctrl/io.hpp"

using namespace hypoctrl;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct ModelDefaults {
    Vec psi;
    Vec z0;
    std::vector<double> W;
    bool profile_z0;
};

ModelDefaults defaults_for(const std::string& id) {
    if (id == "cyclic")
        return {(Vec(2) << 0.2, 0.15).finished(), Vec::Zero(3),
                {1e15, 1e20, 1e25, 1e30}, false};
    if (id == "fhn")
        return {(Vec(5) << 0.1, 1.5, 0.8, 0.0, 0.3).finished(), Vec::Zero(2),
                {1e16, 1e18, 1e20, 1e25}, true};
    if (id == "synaptic")
        return {(Vec(5) << 0.5, 1.0, 9.4, 0.1, 0.1).finished(),
                (Vec(3) << -60.0, 10.0, 1.0).finished(),
                {1e8, 5e8, 1e9, 5e9}, false};
    throw std::invalid_argument("unknown model '" + id + "'");
}

Vec apply_param_overrides(const ModelSpec& model, Vec psi, const std::string& spec) {
    if (spec.empty()) return psi;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad --params entry '" + item + "', expected k=v");
        psi[model.param_index(item.substr(0, eq))] = std::stod(item.substr(eq + 1));
    }
    return psi;
}

Vec parse_vector(const std::string& spec) {
    std::vector<double> vals;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
    return Eigen::Map<Vec>(vals.data(), vals.size());
}

struct CommonArgs {
    std::string model_id;
    std::string params;
    std::string z0_spec;
    bool profile_z0 = false;
    double T = 10.0;
    int n = 1000;
    std::uint64_t seed = 1;
    std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_grid_opts = true) {
    cmd->add_option("--model", args.model_id, "model id: cyclic | fhn | synaptic")
        ->required();
    cmd->add_option("--params", args.params, "comma-separated name=value overrides");
    cmd->add_option("--z0", args.z0_spec, "initial condition v1,v2,...");
    if (with_grid_opts) {
        cmd->add_option("--T", args.T, "time horizon");
        cmd->add_option("--n", args.n, "number of Euler steps");
        cmd->add_option("--seed", args.seed, "RNG seed");
    }
    cmd->add_option("--out", args.out, "output path");
}

int cmd_simulate(const CommonArgs& args) {
    ModelSpec model = model_by_name(args.model_id);
    ModelDefaults def = defaults_for(args.model_id);
    Vec psi = apply_param_overrides(model, def.psi, args.params);
    Vec z0 = args.z0_spec.empty() ? def.z0 : parse_vector(args.z0_spec);
    if (args.n < 1) {
        std::cerr << "simulate: --n must be >= 1\n";
        return kExitUsage;
    }

    Trajectory traj = simulate(model, psi, z0, args.T, args.n, args.seed);
    const std::string out = args.out.empty() ? args.model_id + "_trajectory.csv" : args.out;
    write_trajectory_csv(out, model, traj);

    json sidecar{{"model", model.name},
                 {"T", args.T},
                 {"n", args.n},
                 {"seed", args.seed},
                 {"z0", std::vector<double>(z0.begin(), z0.end())}};
    for (int k = 0; k < model.n_params(); ++k)
        sidecar["params"][model.params[k].name] = psi[k];
    std::ofstream(out + ".json") << sidecar.dump(2) << "\n";
    std::cout << "wrote " << out << " (" << args.n + 1 << " rows)\n";
    return kExitOk;
}

Mat select_observations(const ModelSpec& model, const CsvData& data,
                        const std::string& obs_cols) {
    std::vector<int> cols;
    if (!obs_cols.empty()) {
        std::stringstream ss(obs_cols);
        std::string item;
        while (std::getline(ss, item, ',')) cols.push_back(std::stoi(item));
    } else {
        // prefer y-columns written by `simulate`, else the leading columns
        for (int k = 0; k < model.d_o(); ++k) {
            std::string want = "y" + std::to_string(k + 1);
            auto it = std::find(data.columns.begin(), data.columns.end(), want);
            if (it != data.columns.end())
                cols.push_back(static_cast<int>(it - data.columns.begin()));
        }
        if (static_cast<int>(cols.size()) != model.d_o()) {
            cols.clear();
            for (int k = 0; k < model.d_o(); ++k) cols.push_back(k);
        }
    }
    if (static_cast<int>(cols.size()) != model.d_o())
        throw std::runtime_error("--obs-cols must select exactly " +
                                 std::to_string(model.d_o()) + " columns");
    Mat Y(data.values.rows(), cols.size());
    for (size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] < 0 || cols[k] >= data.values.cols())
            throw std::runtime_error("--obs-cols index out of range: " +
                                     std::to_string(cols[k]));
        Y.col(k) = data.values.col(cols[k]);
    }
    return Y;
}

int cmd_estimate(const CommonArgs& args, const std::string& data_path,
                 const std::string& obs_cols, const std::string& w_grid_spec,
                 bool profile_flag) {
    ModelSpec model = model_by_name(args.model_id);
    ModelDefaults def = defaults_for(args.model_id);
    Vec psi_init = apply_param_overrides(model, def.psi, args.params);

    CsvData data;
    try {
        data = read_csv(data_path);
    } catch (const std::exception& e) {
        std::cerr << "estimate: " << e.what() << "\n";
        return kExitUsage;
    }
    Mat Y;
    try {
        Y = select_observations(model, data, obs_cols);
    } catch (const std::exception& e) {
        std::cerr << "estimate: " << e.what() << "\n";
        return kExitUsage;
    }
    if (data.times.size() < 2) {
        std::cerr << "estimate: need at least 2 data rows\n";
        return kExitUsage;
    }
    const double dt = data.times[1] - data.times[0];

    std::vector<double> W;
    if (w_grid_spec.empty()) W = def.W;
    else {
        Vec wv = parse_vector(w_grid_spec);
        W.assign(wv.begin(), wv.end());
    }

    EstimationOptions opts;
    opts.profile_z0 = profile_flag || def.profile_z0;
    if (!opts.profile_z0)
        opts.Z0 = args.z0_spec.empty() ? def.z0 : parse_vector(args.z0_spec);

    try {
        EstimationResult result = select_weight(model, Y, dt, W, psi_init, opts);
        json report = estimation_result_to_json(model, result);
        if (!args.out.empty()) std::ofstream(args.out) << report.dump(2) << "\n";
        std::cout << report.dump(2) << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "estimate: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int cmd_mc(const CommonArgs& args, int trials, const std::string& w_grid_spec,
           bool profile_flag) {
    if (trials < 1) {
        std::cerr << "mc: --trials must be >= 1\n";
        return kExitUsage;
    }
    ModelSpec model = model_by_name(args.model_id);
    ModelDefaults def = defaults_for(args.model_id);
    Vec psi_true = apply_param_overrides(model, def.psi, args.params);
    Vec z0 = args.z0_spec.empty() ? def.z0 : parse_vector(args.z0_spec);

    std::vector<double> W;
    if (w_grid_spec.empty()) W = def.W;
    else {
        Vec wv = parse_vector(w_grid_spec);
        W.assign(wv.begin(), wv.end());
    }

    EstimationOptions opts;
    opts.profile_z0 = profile_flag || def.profile_z0;

    try {
        MonteCarloReport report =
            monte_carlo(model, psi_true, z0, args.T, args.n, W, trials, args.seed, opts);
        json j = mc_report_to_json(model, report);
        j["T"] = args.T;
        j["n"] = args.n;
        if (!args.out.empty()) std::ofstream(args.out) << j.dump(2) << "\n";

        // table row in the style: mean (variance) per parameter
        std::cout << "model=" << model.name << " T=" << args.T << " n=" << args.n
                  << " trials=" << trials << " failures=" << report.failures << "\n";
        for (int k = 0; k < model.n_params(); ++k) {
            if (model.params[k].fixed) continue;
            std::printf("  %-8s %.4g (%.3g)\n", model.params[k].name.c_str(),
                        report.mean[k], report.variance[k]);
        }
        std::printf("  mean time per trial: %.2fs\n", report.mean_trial_seconds);
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "mc: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int cmd_check_hypo(const CommonArgs& args) {
    ModelSpec model = model_by_name(args.model_id);
    ModelDefaults def = defaults_for(args.model_id);
    Vec psi = apply_param_overrides(model, def.psi, args.params);
    Vec z0 = args.z0_spec.empty() ? def.z0 : parse_vector(args.z0_spec);

    json report{{"model", model.name}};
    int status = kExitOk;
    try {
        auto probes = probe_box(model.d(), -3.0, 3.0, 50, 42);
        LagReport lags = connexity_lags(model, psi, probes);
        json m_l = json::array();
        for (const auto& m : lags.m_l)
            m_l.push_back(m ? json(*m) : json(nullptr));
        report["m_l"] = m_l;
        report["m_B"] = lags.m_B;

        Trajectory traj = simulate(model, psi, z0, args.T, args.n, args.seed);
        const double min_sv = h1_rank_check(model, psi, traj, lags.m_B);
        report["h1_min_singular_value"] = min_sv;
        const double threshold = 1e-12;
        report["h1_ok"] = min_sv > threshold;
        if (min_sv <= threshold) status = kExitNumerical;
    } catch (const ConnexityError& e) {
        report["error"] = e.what();
        status = kExitNumerical;
    }
    std::cout << report.dump(2) << "\n";
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Drift/diffusion parameter estimation for partially observed SDEs "
                 "via optimal-control tracking"};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonArgs sim_args, est_args, mc_args, hypo_args;
    std::string data_path, obs_cols_est, w_grid_est, w_grid_mc;
    bool profile_est = false, profile_mc = false;
    int trials = 10;

    auto* sim = app.add_subcommand("simulate", "simulate a trajectory to CSV");
    add_common(sim, sim_args);

    auto* est = app.add_subcommand("estimate", "estimate parameters from a CSV dataset");
    add_common(est, est_args);
    est->add_option("data", data_path, "trajectory CSV")->required();
    est->add_option("--obs-cols", obs_cols_est,
                    "comma-separated 0-based data column indices used as observations");
    est->add_option("--w-grid", w_grid_est, "comma-separated weight grid");
    est->add_flag("--profile-z0", profile_est, "profile the initial condition");

    auto* mc = app.add_subcommand("mc", "Monte Carlo benchmark");
    add_common(mc, mc_args);
    mc->add_option("--trials", trials, "number of Monte Carlo trials");
    mc->add_option("--w-grid", w_grid_mc, "comma-separated weight grid");
    mc->add_flag("--profile-z0", profile_mc, "profile the initial condition");

    auto* hypo = app.add_subcommand("check-hypo", "lag analysis and (H1) rank check");
    add_common(hypo, hypo_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_args);
        if (est->parsed())
            return cmd_estimate(est_args, data_path, obs_cols_est, w_grid_est, profile_est);
        if (mc->parsed()) return cmd_mc(mc_args, trials, w_grid_mc, profile_mc);
        if (hypo->parsed()) return cmd_check_hypo(hypo_args);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
