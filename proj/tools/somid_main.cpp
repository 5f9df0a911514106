// Command-line front end: dataset simulation, estimation, validation,
// excitation checks and the Monte Carlo study.

#include <CLI11.hpp>

#include "somid/config.hpp"
#include "somid/estim.hpp"
#include "somid/settings.hpp"
#include "somid/sim.hpp"
#include "somid/study.hpp"
#include "somid/vessel.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

somid::Config load_config_or_default(const std::string& path) {
    if (path.empty()) return somid::Config{};
    if (!std::filesystem::exists(path))
        throw UsageError("config file '" + path + "' does not exist");
    return somid::Config::load(path);
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(csv);
    while (std::getline(is, cur, ','))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed, int n, double wind,
                 const std::string& mode, bool include_truth, const std::string& out_path,
                 bool flip_quadrant) {
    const somid::Config cfg = load_config_or_default(config_path);
    somid::NoiseConfig noise = somid::noise_from_config(cfg);
    if (wind >= 0.0) noise.wind_mean = Eigen::Vector2d(wind, wind);

    somid::InputDesign design;
    if (mode == "circle-offset")
        design = somid::input_from_config(cfg);
    else if (mode == "zigzag-validation") {
        design = somid::InputDesign::zigzag_validation();
        noise = somid::NoiseConfig::undisturbed();
    } else
        throw UsageError("unknown input mode '" + mode + "'");
    if (flip_quadrant) {
        design.tau_static(1) = -design.tau_static(1);
        design.tau_static(2) = -design.tau_static(2);
    }

    const somid::ShipParams truth =
        somid::params_from_config(cfg, "params.true", somid::ShipParams::truth());
    const somid::Dataset ds = somid::run_experiment(truth, design, noise, n, seed);
    somid::write_dataset_csv(ds, out_path, include_truth);
    std::cout << "wrote " << out_path << " (" << ds.n_d << " samples)\n";
    return 0;
}

int cmd_estimate(const std::string& config_path, const std::string& kind_name,
                 const std::vector<std::string>& dataset_paths, const std::string& out_path,
                 const std::string& params_out) {
    const somid::Config cfg = load_config_or_default(config_path);
    const somid::ShipParams nominal =
        somid::params_from_config(cfg, "params.nominal", somid::ShipParams::nominal());
    const somid::ShipParams truth =
        somid::params_from_config(cfg, "params.true", somid::ShipParams::truth());

    std::vector<somid::Dataset> group;
    for (const auto& p : dataset_paths) {
        if (!std::filesystem::exists(p))
            throw UsageError("dataset file '" + p + "' does not exist");
        somid::Dataset ds = somid::read_dataset_csv(p);
        ds.noise = somid::noise_from_config(cfg);
        group.push_back(std::move(ds));
    }

    const somid::PredictorKind kind = somid::parse_predictor_kind(kind_name);
    const somid::EstimationResult res = somid::estimate(group, kind, nominal);
    const std::string report = somid::format_report(res, &truth);
    if (out_path.empty()) {
        std::cout << report;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write report '" + out_path + "'");
        out << report;
        std::cout << "wrote " << out_path << "\n";
    }
    if (!params_out.empty()) {
        somid::Config pc;
        somid::params_to_config(pc, "params.estimated", res.fitted);
        pc.save(params_out);
        std::cout << "wrote " << params_out << "\n";
    }
    return 0;
}

int cmd_validate(const std::string& params_path, const std::string& section,
                 const std::string& data_path) {
    if (!std::filesystem::exists(params_path))
        throw UsageError("params file '" + params_path + "' does not exist");
    if (!std::filesystem::exists(data_path))
        throw UsageError("dataset file '" + data_path + "' does not exist");
    const somid::Config pc = somid::Config::load(params_path);
    std::string sec = section;
    if (sec.empty()) {
        if (pc.sections().count("params.estimated"))
            sec = "params.estimated";
        else if (pc.sections().count("params.true"))
            sec = "params.true";
        else
            throw UsageError("params file has neither [params.estimated] nor [params.true]");
    }
    const somid::ShipParams model = somid::params_from_config(pc, sec, somid::ShipParams{});
    const somid::Dataset val = somid::read_dataset_csv(data_path);
    const Eigen::Vector3d fit = somid::model_fit(val, model);
    std::printf("fit: surge %.4f  sway %.4f  yaw-rate %.4f\n", fit(0), fit(1), fit(2));
    return 0;
}

int cmd_check(const std::string& data_path, double margin) {
    if (!std::filesystem::exists(data_path))
        throw UsageError("dataset file '" + data_path + "' does not exist");
    somid::Dataset ds = somid::read_dataset_csv(data_path);
    const somid::ExcitationReport rep = somid::check_excitation(ds, margin);
    std::cout << rep.summary();
    return 0;
}

int cmd_study(const std::string& config_path, std::uint64_t seed, bool seed_set,
              const std::string& out_dir, const std::string& estimators,
              const std::string& wind, const std::string& reps, const std::string& grid,
              int threads) {
    const somid::Config cfg = load_config_or_default(config_path);
    somid::StudyConfig sc = somid::study_from_config(cfg);
    if (seed_set) sc.master_seed = seed;
    if (!out_dir.empty()) sc.out_dir = out_dir;
    if (!estimators.empty()) {
        sc.estimators.clear();
        for (const auto& name : split_list(estimators))
            sc.estimators.push_back(somid::parse_predictor_kind(name));
    }
    if (!wind.empty()) {
        sc.wind_cases.clear();
        for (const auto& w : split_list(wind)) sc.wind_cases.push_back(std::stod(w));
    }
    if (!reps.empty()) sc.reps = std::stoi(reps);
    if (!grid.empty()) {
        sc.grid.clear();
        for (const auto& g : split_list(grid)) sc.grid.push_back(std::stoi(g));
    }
    if (threads >= 0) sc.threads = threads;

    const somid::StudyResult res = somid::run_study(sc);
    const auto files = somid::emit_reports(res, sc.out_dir);
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"second-order modulus vessel identification toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate one experiment and write it as CSV");
    std::string sim_config, sim_mode = "circle-offset", sim_out = "dataset.csv";
    std::uint64_t sim_seed = 1;
    int sim_n = 2000;
    double sim_wind = -1.0;
    bool sim_truth = false, sim_flip = false;
    sim->add_option("--config", sim_config, "config file");
    sim->add_option("--seed", sim_seed, "experiment seed");
    sim->add_option("--n", sim_n, "number of samples N_D");
    sim->add_option("--wind", sim_wind, "mean wind speed override (m/s)");
    sim->add_option("--mode", sim_mode, "circle-offset | zigzag-validation");
    sim->add_option("--out", sim_out, "output CSV path");
    sim->add_flag("--truth", sim_truth, "append the ground-truth block");
    sim->add_flag("--flip-quadrant", sim_flip, "negate the sway/yaw static offsets");

    // estimate
    auto* est = app.add_subcommand("estimate", "run an estimator over dataset CSVs");
    std::string est_config, est_kind = "iv3", est_out, est_params_out;
    std::vector<std::string> est_data;
    est->add_option("--config", est_config, "config file");
    est->add_option("--kind", est_kind, "iv1 | iv2 | iv3 | ls");
    est->add_option("--out", est_out, "report output path (default: stdout)");
    est->add_option("--params-out", est_params_out, "write estimated parameters as a config");
    est->add_option("datasets", est_data, "dataset CSV files, one per experiment")
        ->required()
        ->expected(-1);

    // validate
    auto* val = app.add_subcommand("validate", "free-run fit of a model on validation data");
    std::string val_params, val_section, val_data;
    val->add_option("--params", val_params, "parameter config file")->required();
    val->add_option("--section", val_section, "config section holding the parameters");
    val->add_option("--data", val_data, "validation dataset CSV")->required();

    // check
    auto* chk = app.add_subcommand("check", "excitation diagnostics for a dataset");
    std::string chk_data;
    double chk_margin = 4.0;
    chk->add_option("--data", chk_data, "dataset CSV")->required();
    chk->add_option("--margin", chk_margin, "amplitude margin in noise sigmas");

    // study
    auto* stu = app.add_subcommand("study", "Monte Carlo fit-vs-N study");
    std::string stu_config, stu_out, stu_estimators, stu_wind, stu_reps, stu_grid;
    std::uint64_t stu_seed = 0;
    int stu_threads = -1;
    stu->add_option("--config", stu_config, "config file");
    auto* seed_opt = stu->add_option("--seed", stu_seed, "master seed");
    stu->add_option("--out", stu_out, "output directory");
    stu->add_option("--estimators", stu_estimators, "comma list: iv1,iv2,iv3,ls");
    stu->add_option("--wind", stu_wind, "comma list of wind cases (m/s)");
    stu->add_option("--reps", stu_reps, "Monte Carlo repetitions");
    stu->add_option("--grid", stu_grid, "comma list of total N values");
    stu->add_option("--threads", stu_threads, "worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_config, sim_seed, sim_n, sim_wind, sim_mode, sim_truth,
                                sim_out, sim_flip);
        if (est->parsed())
            return cmd_estimate(est_config, est_kind, est_data, est_out, est_params_out);
        if (val->parsed()) return cmd_validate(val_params, val_section, val_data);
        if (chk->parsed()) return cmd_check(chk_data, chk_margin);
        if (stu->parsed())
            return cmd_study(stu_config, stu_seed, seed_opt->count() > 0, stu_out,
                             stu_estimators, stu_wind, stu_reps, stu_grid, stu_threads);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
