#pragma once

// Monte Carlo orchestration: the fit-vs-N study across estimators and wind
// regimes, aggregation, and the CSV/SVG reports.

#include "config.hpp"
#include "estim.hpp"
#include "sim.hpp"
#include "svg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace somid {

struct StudyConfig {
    std::vector<int> grid{1000, 2000, 3000, 4000, 5000};
    int reps = 100;
    std::vector<double> wind_cases{1.0, 10.0};
    std::vector<PredictorKind> estimators{PredictorKind::Basic, PredictorKind::Augmented,
                                          PredictorKind::AugmentedWithAux,
                                          PredictorKind::LeastSquaresAux};
    std::uint64_t master_seed = 1;
    int n_e = 4;
    int n_val = 2000;
    int threads = 1;  // 0 = hardware concurrency

    NoiseConfig noise;                // wind_mean overridden per wind case
    InputDesign estimation_input;     // circle offset; sway/yaw signs alternate per experiment
    InputDesign validation_input = InputDesign::zigzag_validation();
    ShipParams true_params = ShipParams::truth();
    ShipParams nominal_params = ShipParams::nominal();
    EstimOptions estim;

    std::string out_dir = "study_out";

    void validate() const {
        if (grid.empty()) throw std::invalid_argument("study: empty N grid");
        for (int n : grid)
            if (n < 2) throw std::invalid_argument("study: N values must be >= 2");
        if (reps < 1) throw std::invalid_argument("study: repetitions must be >= 1");
        if (n_e < 1) throw std::invalid_argument("study: N_E must be >= 1");
        if (estimators.empty()) throw std::invalid_argument("study: no estimators selected");
    }
};

struct RunRecord {
    PredictorKind estimator = PredictorKind::Basic;
    double wind = 0.0;
    int n_total = 0;
    int rep = 0;
    Eigen::Vector3d fit = Eigen::Vector3d::Zero();
    double param_err = 0.0;
    bool diverged = false;
};

struct Aggregate {
    double mean_fit = 0.0;
    double std_fit = 0.0;
    double median_param_err = 0.0;
    int count = 0;
    int diverged = 0;
};

struct StudyResult {
    StudyConfig cfg;
    std::vector<RunRecord> records;  // deterministic order: wind-major, N, rep, estimator

    using Key = std::tuple<std::string, double, int, int>;  // estimator, wind, N, channel

    std::map<Key, Aggregate> aggregate() const {
        std::map<Key, std::vector<double>> fits;
        std::map<Key, std::vector<double>> errs;
        std::map<Key, int> diverged;
        for (const auto& r : records) {
            for (int c = 0; c < 3; ++c) {
                const Key key{predictor_kind_name(r.estimator), r.wind, r.n_total, c};
                if (r.diverged) {
                    ++diverged[key];
                    continue;
                }
                fits[key].push_back(r.fit(c));
                errs[key].push_back(r.param_err);
            }
        }
        std::map<Key, Aggregate> out;
        for (auto& [key, fs] : fits) {
            Aggregate a;
            a.count = static_cast<int>(fs.size());
            a.diverged = diverged.count(key) ? diverged[key] : 0;
            double mean = 0.0;
            for (double f : fs) mean += f;
            mean /= fs.size();
            double var = 0.0;
            for (double f : fs) var += (f - mean) * (f - mean);
            a.mean_fit = mean;
            a.std_fit = fs.size() > 1 ? std::sqrt(var / (fs.size() - 1)) : 0.0;
            auto& es = errs[key];
            std::sort(es.begin(), es.end());
            a.median_param_err = es.empty() ? 0.0
                                 : (es.size() % 2 ? es[es.size() / 2]
                                                  : 0.5 * (es[es.size() / 2 - 1] +
                                                           es[es.size() / 2]));
            out[key] = a;
        }
        for (auto& [key, d] : diverged)
            if (!out.count(key)) {
                Aggregate a;
                a.diverged = d;
                out[key] = a;
            }
        return out;
    }
};

namespace detail {

inline InputDesign quadrant_design(const InputDesign& base, int experiment) {
    InputDesign d = base;
    if (experiment % 2 == 1) {
        d.tau_static(1) = -d.tau_static(1);
        d.tau_static(2) = -d.tau_static(2);
    }
    return d;
}

}  // namespace detail

/// One Monte Carlo repetition: generates the sign-diverse experiment group
/// and runs every configured estimator against the shared validation set.
inline std::vector<RunRecord> run_repetition(const StudyConfig& cfg, const Dataset& validation,
                                             double wind, int n_total, int rep,
                                             std::uint64_t rep_seed) {
    NoiseConfig noise = cfg.noise;
    noise.wind_mean = Eigen::Vector2d(wind, wind);
    const int n_d = std::max(2, n_total / cfg.n_e);

    std::vector<Dataset> group;
    group.reserve(cfg.n_e);
    for (int e = 0; e < cfg.n_e; ++e) {
        const InputDesign design = detail::quadrant_design(cfg.estimation_input, e);
        group.push_back(run_experiment(cfg.true_params, design, noise, n_d,
                                       split_seed(rep_seed, 100 + e), cfg.estim.dt));
    }

    std::vector<RunRecord> out;
    out.reserve(cfg.estimators.size());
    for (PredictorKind kind : cfg.estimators) {
        RunRecord rec;
        rec.estimator = kind;
        rec.wind = wind;
        rec.n_total = n_total;
        rec.rep = rep;
        try {
            const EstimationResult res = estimate(group, kind, cfg.nominal_params, cfg.estim);
            rec.fit = model_fit(validation, res.fitted, cfg.estim.dt);
            rec.param_err = res.relative_parameter_error(cfg.true_params);
            rec.diverged = !rec.fit.allFinite() || !std::isfinite(rec.param_err);
        } catch (const std::exception&) {
            rec.diverged = true;
            rec.fit.setConstant(-std::numeric_limits<double>::infinity());
            rec.param_err = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(rec);
    }
    return out;
}

/// Runs the full study. Repetitions execute concurrently when threads != 1;
/// results land in pre-assigned slots so the record order (and therefore
/// every emitted byte) is independent of scheduling.
inline StudyResult run_study(const StudyConfig& cfg) {
    cfg.validate();

    const Dataset validation =
        run_experiment(cfg.true_params, cfg.validation_input, NoiseConfig::undisturbed(),
                       cfg.n_val, split_seed(cfg.master_seed, 0xFA11), cfg.estim.dt);

    struct Task {
        double wind;
        int n_total;
        int rep;
        std::uint64_t seed;
        std::size_t slot;
    };
    std::vector<Task> tasks;
    std::size_t slot = 0;
    for (std::size_t wi = 0; wi < cfg.wind_cases.size(); ++wi)
        for (std::size_t ni = 0; ni < cfg.grid.size(); ++ni)
            for (int rep = 0; rep < cfg.reps; ++rep) {
                const std::uint64_t stream =
                    (static_cast<std::uint64_t>(wi) << 40) ^
                    (static_cast<std::uint64_t>(ni) << 24) ^ static_cast<std::uint64_t>(rep);
                tasks.push_back({cfg.wind_cases[wi], cfg.grid[ni], rep,
                                 split_seed(cfg.master_seed, stream), slot++});
            }

    std::vector<std::vector<RunRecord>> slots(tasks.size());
    int n_threads = cfg.threads == 0
                        ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))
                        : cfg.threads;
    n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(tasks.size())));

    if (n_threads == 1) {
        for (const Task& t : tasks)
            slots[t.slot] = run_repetition(cfg, validation, t.wind, t.n_total, t.rep, t.seed);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                const Task& t = tasks[i];
                slots[t.slot] =
                    run_repetition(cfg, validation, t.wind, t.n_total, t.rep, t.seed);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    StudyResult res;
    res.cfg = cfg;
    for (const auto& s : slots) res.records.insert(res.records.end(), s.begin(), s.end());
    return res;
}

namespace detail {

inline std::string fit_cell(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline const char* channel_name(int c) {
    static const char* names[3] = {"u", "v", "r"};
    return names[c];
}

inline const char* estimator_color(const std::string& name) {
    if (name == "iv1") return "#888888";
    if (name == "iv2") return "#d62728";
    if (name == "iv3") return "#1f77b4";
    return "#2ca02c";  // ls
}

}  // namespace detail

/// Writes raw + aggregate CSVs and one fit-vs-N chart per (wind case,
/// channel). The charts clip to fit values in [0, 100]; the CSVs keep
/// everything.
inline std::vector<std::string> emit_reports(const StudyResult& res, const std::string& dir,
                                             const std::vector<int>& channels = {0, 1, 2}) {
    if (channels.empty())
        throw std::invalid_argument("emit_reports: channel filter must not be empty");
    for (int c : channels)
        if (c < 0 || c > 2)
            throw std::invalid_argument("emit_reports: channel index out of range");
    std::filesystem::create_directories(dir);

    std::vector<std::string> written;

    const std::string raw_path = dir + "/fits_raw.csv";
    {
        std::ofstream out(raw_path);
        if (!out) throw std::runtime_error("cannot write '" + raw_path + "'");
        out << "estimator,wind_case,N,channel,run,fit,param_err\n";
        for (const auto& r : res.records)
            for (int c : channels)
                out << predictor_kind_name(r.estimator) << "," << detail::fit_cell(r.wind) << ","
                    << r.n_total << "," << detail::channel_name(c) << "," << r.rep << ","
                    << detail::fit_cell(r.diverged
                                            ? -std::numeric_limits<double>::infinity()
                                            : r.fit(c))
                    << "," << detail::fit_cell(r.param_err) << "\n";
    }
    written.push_back(raw_path);

    const auto agg = res.aggregate();
    const std::string agg_path = dir + "/fits_aggregate.csv";
    {
        std::ofstream out(agg_path);
        if (!out) throw std::runtime_error("cannot write '" + agg_path + "'");
        out << "estimator,wind_case,N,channel,mean_fit,std_fit,median_param_err,count,"
               "diverged\n";
        for (const auto& [key, a] : agg) {
            const auto& [est, wind, n, c] = key;
            if (std::find(channels.begin(), channels.end(), c) == channels.end()) continue;
            out << est << "," << detail::fit_cell(wind) << "," << n << ","
                << detail::channel_name(c) << "," << detail::fit_cell(a.mean_fit) << ","
                << detail::fit_cell(a.std_fit) << "," << detail::fit_cell(a.median_param_err)
                << "," << a.count << "," << a.diverged << "\n";
        }
    }
    written.push_back(agg_path);

    // One chart per (wind case, channel).
    std::vector<double> winds = res.cfg.wind_cases;
    for (double wind : winds) {
        for (int c : channels) {
            const double n_lo = *std::min_element(res.cfg.grid.begin(), res.cfg.grid.end());
            const double n_hi = *std::max_element(res.cfg.grid.begin(), res.cfg.grid.end());
            std::ostringstream title;
            title << "Model fit, " << detail::channel_name(c) << " channel, wind "
                  << detail::fit_cell(wind).substr(0, 6) << " m/s";
            SvgChart chart(title.str(), "N (total samples)", "fit",
                           n_lo, std::max(n_hi, n_lo + 1.0), 0.0, 100.0);
            for (PredictorKind kind : res.cfg.estimators) {
                const std::string name = predictor_kind_name(kind);
                std::vector<SvgChart::Point> line, up, down;
                for (int n : res.cfg.grid) {
                    auto it = agg.find({name, wind, n, c});
                    if (it == agg.end() || it->second.count == 0) continue;
                    const Aggregate& a = it->second;
                    if (chart.in_range(n, a.mean_fit)) line.push_back({double(n), a.mean_fit});
                    if (chart.in_range(n, a.mean_fit + a.std_fit))
                        up.push_back({double(n), a.mean_fit + a.std_fit});
                    if (chart.in_range(n, a.mean_fit - a.std_fit))
                        down.push_back({double(n), a.mean_fit - a.std_fit});
                }
                chart.add_curve(name, detail::estimator_color(name), line, up, down);
            }
            std::ostringstream path;
            path << dir << "/fit_wind" << detail::fit_cell(wind) << "_"
                 << detail::channel_name(c) << ".svg";
            chart.write(path.str());
            written.push_back(path.str());
        }
    }
    return written;
}

}  // namespace somid
