#include "cli.hpp"

#include "mixar/csv_series.hpp"
#include "mixar/errors.hpp"
#include "mixar/estimator.hpp"
#include "mixar/harness.hpp"
#include "mixar/infer.hpp"
#include "mixar/robustscale.hpp"
#include "mixar/simulator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace mixar::cli {

namespace {

using nlohmann::ordered_json;

constexpr const char* kTool = "mixar " MIXAR_VERSION;

std::string fmt(double v, const char* spec = "%.10g") {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string join(const std::vector<double>& v, const char* spec = "%.10g") {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt(v[i], spec);
    }
    return out;
}

/// Destination for a report: the named file, or the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw InvalidInput("cannot open output file '" + path + "'");
            stream_ = &file_;
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

unsigned default_threads() {
    if (const char* env = std::getenv("MIXAR_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return 1;
}

/// Canonical command echo: subcommand plus every option that can change the
/// results. The output path and thread count are left out.
std::string canonical_command(const CLI::App& sub) {
    std::string out = "mixar " + sub.get_name();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string& name = opt->get_name();
        if (name == "--help" || name == "--out" || name == "--threads" || opt->count() == 0) continue;
        out += ' ' + name;
        if (opt->get_expected_max() == 0) continue;
        for (const auto& r : opt->results()) out += ' ' + r;
    }
    return out;
}

void write_comment_header(std::ostream& os, const std::string& command, std::uint64_t seed) {
    os << "# " << kTool << '\n' << "# command: " << command << '\n' << "# seed: " << seed << '\n';
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::size_t T = 500;
    std::vector<double> phi;
    std::vector<double> vphi;
    double nu = 3.0;
    double eta = 1.0;
    std::size_t burn = kDefaultBurn;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a, const std::string& command, std::ostream& out) {
    SimConfig cfg;
    cfg.T = a.T;
    cfg.model.phi = a.phi;
    cfg.model.vphi = a.vphi;
    cfg.model.dist = {a.nu, a.eta};
    cfg.burn = a.burn;
    cfg.seed = a.seed;
    const Series y = simulate_mar(cfg);

    Sink sink(a.out, out);
    std::ostream& os = sink.get();
    write_comment_header(os, command, a.seed);
    os << "# config: T=" << cfg.T << " burn=" << cfg.burn << " r=" << cfg.model.r()
       << " s=" << cfg.model.s() << " phi=" << join(cfg.model.phi) << " vphi=" << join(cfg.model.vphi)
       << " nu=" << fmt(a.nu) << " eta=" << fmt(a.eta) << '\n';
    os << "y\n";
    for (double v : y) os << fmt(v, "%.17g") << '\n';
    return kOk;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
    std::string input;
    std::optional<std::string> column;
    std::size_t p_max = 8;
    std::string criterion = "bic";
    std::optional<std::size_t> p;
    std::optional<std::size_t> r;
    std::optional<std::size_t> s;
    std::uint64_t seed = 1;
    std::string kstar_source = "calibrate";
    std::size_t kstar_n = 100000;
    std::string format = "json";
    std::string out;
    std::optional<unsigned> threads;
    int random_starts = 4;
};

ordered_json se_json(const SeOutcome& o) {
    if (!o.report) return nullptr;
    const auto nan_to_null = [](double v) -> ordered_json {
        return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
    };
    return ordered_json{{"phi", o.report->se_phi},
                        {"vphi", o.report->se_vphi},
                        {"nu", nan_to_null(o.report->se_nu)},
                        {"eta", nan_to_null(o.report->se_eta)}};
}

int cmd_fit(const FitArgs& a, const std::string& command, std::ostream& out) {
    Series y;
    if (a.input == "-") {
        y = read_series(std::cin, a.column);
    } else {
        std::ifstream in(a.input, std::ios::binary);
        if (!in) throw InvalidInput("cannot open input file '" + a.input + "'");
        y = read_series(in, a.column);
    }
    const unsigned threads = a.threads.value_or(default_threads());

    FitOptions opts;
    opts.seed = a.seed;
    opts.n_random_starts = a.random_starts;

    const InfoCriterion criterion =
        a.criterion == "aic" ? InfoCriterion::aic : InfoCriterion::bic;

    std::size_t p = 0;
    std::vector<double> loglik_by_r;
    FitResult fit;
    std::size_t r = 0, s = 0;
    if (a.r && a.s) {
        r = *a.r;
        s = *a.s;
        p = r + s;
        fit = fit_mar(y, r, s, opts);
    } else {
        if (a.p) {
            p = *a.p;
        } else {
            if (y.size() <= 2 * a.p_max + 1) {
                throw InvalidInput("series too short for p_max = " + std::to_string(a.p_max));
            }
            p = select_p(y, a.p_max, criterion);
        }
        RsSelection sel = select_rs(y, p, opts);
        r = sel.r;
        s = sel.s;
        loglik_by_r = sel.logliks;
        fit = std::move(sel.fit);
    }

    std::optional<OmegaStandardErrors> omega;
    std::string omega_reason;
    try {
        omega = omega_standard_errors(y, fit);
    } catch (const std::exception& e) {
        omega_reason = e.what();
    }

    const GammaBlocks blocks = gamma_blocks(fit.model.causal(), fit.model.noncausal());
    SeInputs in;
    in.y = y;
    in.fit = &fit;

    std::string kstar_reason;
    try {
        if (a.kstar_source == "reference") {
            in.kstar = kstar_reference(fit.model.dist.nu, fit.T);
        } else if (!(fit.model.dist.nu > 1.0)) {
            kstar_reason = "nu<=1";
        } else {
            in.kstar = calibrate_kstar(fit.model.dist.nu, fit.T, a.kstar_n, a.seed, threads).kstar;
        }
    } catch (const std::exception& e) {
        kstar_reason = e.what();
    }

    const std::vector<SeMethod> methods{SeMethod::classic, SeMethod::block_hessian, SeMethod::robust};
    std::map<SeMethod, SeOutcome> se;
    for (SeMethod m : methods) {
        se[m] = compute_se(m, in, blocks, omega);
        if (m == SeMethod::robust && !se[m].report && !kstar_reason.empty()) {
            se[m].unavailable_reason = kstar_reason;
        }
    }

    Sink sink(a.out, out);
    std::ostream& os = sink.get();

    if (a.format == "json") {
        ordered_json j;
        j["tool"] = kTool;
        j["command"] = command;
        j["seed"] = a.seed;
        j["input"] = {{"path", a.input}, {"n_obs", fit.T}, {"mean", fit.mean}};
        ordered_json selection{{"p", p}};
        if (!(a.r && a.s)) {
            selection["criterion"] = a.p ? "fixed" : a.criterion;
            selection["p_max"] = a.p_max;
            selection["loglik_by_r"] = loglik_by_r;
        }
        j["selection"] = selection;
        j["model"] = {{"r", r},
                      {"s", s},
                      {"phi", fit.model.phi},
                      {"vphi", fit.model.vphi},
                      {"nu", fit.model.dist.nu},
                      {"eta", fit.model.dist.eta}};
        j["loglik"] = fit.loglik;
        j["se"] = {{"classic", se_json(se[SeMethod::classic])},
                   {"block_hessian", se_json(se[SeMethod::block_hessian])},
                   {"robust", se_json(se[SeMethod::robust])}};
        ordered_json unavailable = ordered_json::object();
        for (SeMethod m : methods) {
            if (!se[m].report) unavailable[to_string(m)] = se[m].unavailable_reason;
        }
        if (!omega) unavailable["omega"] = omega_reason;
        const double var = error_variance(fit.model.dist);
        ordered_json diag{{"converged", fit.converged},
                          {"n_starts", fit.n_starts_used},
                          {"kstar_source", a.kstar_source},
                          {"kstar", in.kstar ? ordered_json(*in.kstar) : ordered_json(nullptr)},
                          {"sigma_hat", in.kstar && !fit.residuals.empty()
                                            ? ordered_json(*in.kstar * mad(fit.residuals))
                                            : ordered_json(nullptr)},
                          {"error_variance", std::isinf(var) ? ordered_json(nullptr) : ordered_json(var)},
                          {"unavailable", unavailable}};
        j["diagnostics"] = diag;
        os << j.dump(2) << '\n';
        return kOk;
    }

    auto cell = [&](SeMethod m, bool causal, std::size_t i) -> std::string {
        const auto& o = se[m];
        if (!o.report) return "/";
        return fmt(causal ? o.report->se_phi[i] : o.report->se_vphi[i], "%.6f");
    };
    auto dist_cell = [&](SeMethod m, bool nu) -> std::string {
        const auto& o = se[m];
        if (!o.report) return "/";
        const double v = nu ? o.report->se_nu : o.report->se_eta;
        return std::isfinite(v) ? fmt(v, "%.6f") : "/";
    };
    struct Line {
        std::string name;
        double estimate;
        std::string classic, hessian, robust;
    };
    std::vector<Line> lines;
    for (std::size_t i = 0; i < r; ++i) {
        lines.push_back({"phi_" + std::to_string(i + 1), fit.model.phi[i], cell(SeMethod::classic, true, i),
                         cell(SeMethod::block_hessian, true, i), cell(SeMethod::robust, true, i)});
    }
    for (std::size_t j = 0; j < s; ++j) {
        lines.push_back({"vphi_" + std::to_string(j + 1), fit.model.vphi[j],
                         cell(SeMethod::classic, false, j), cell(SeMethod::block_hessian, false, j),
                         cell(SeMethod::robust, false, j)});
    }
    lines.push_back({"eta", fit.model.dist.eta, dist_cell(SeMethod::classic, false),
                     dist_cell(SeMethod::block_hessian, false), dist_cell(SeMethod::robust, false)});
    lines.push_back({"nu", fit.model.dist.nu, dist_cell(SeMethod::classic, true),
                     dist_cell(SeMethod::block_hessian, true), dist_cell(SeMethod::robust, true)});

    write_comment_header(os, command, a.seed);
    os << "# MAR(" << r << "," << s << ") T=" << fit.T << " loglik=" << fmt(fit.loglik) << '\n';
    if (a.format == "csv") {
        os << "parameter,estimate,classic,block_hessian,robust\n";
        for (const auto& l : lines) {
            os << l.name << ',' << fmt(l.estimate, "%.6f") << ',' << l.classic << ',' << l.hessian << ','
               << l.robust << '\n';
        }
        return kOk;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-22s %12s %12s %12s\n", "estimate", "Sigma", "Sigma_D", "Sigma_R");
    os << buf;
    for (const auto& l : lines) {
        const std::string head = l.name + "=" + fmt(l.estimate, "%.4f");
        std::snprintf(buf, sizeof buf, "%-22s %12s %12s %12s\n", head.c_str(), l.classic.c_str(),
                      l.hessian.c_str(), l.robust.c_str());
        os << buf;
    }
    return kOk;
}

// ---------------------------------------------------------------- calibrate-k

struct CalibrateArgs {
    std::optional<double> nu;
    bool gaussian = false;
    std::size_t T = 500;
    std::size_t N = 100000;
    std::uint64_t seed = 1;
    bool table = false;
    std::string out;
    std::optional<unsigned> threads;
};

int cmd_calibrate(const CalibrateArgs& a, const std::string& command, std::ostream& out) {
    const unsigned threads = a.threads.value_or(default_threads());
    Sink sink(a.out, out);
    std::ostream& os = sink.get();
    write_comment_header(os, command, a.seed);

    if (a.table) {
        os << "nu,T,N,kstar,reference,rel_error,trimmed_fraction\n";
        for (std::size_t t = 0; t < KStarTable::kT; ++t) {
            for (std::size_t n = 0; n < KStarTable::kNu; ++n) {
                const double nu = KStarTable::nu[n];
                const std::size_t T = KStarTable::T[t];
                const KCalibration cal =
                    calibrate_kstar(nu, T, a.N, derive_seed(a.seed, t * KStarTable::kNu + n), threads);
                const double ref = KStarTable::value[t][n];
                os << fmt(nu) << ',' << T << ',' << a.N << ',' << fmt(cal.kstar, "%.6f") << ','
                   << fmt(ref) << ',' << fmt((cal.kstar - ref) / ref, "%.5f") << ','
                   << fmt(cal.trimmed_fraction, "%.6f") << '\n';
            }
        }
        return kOk;
    }

    if (!a.gaussian && !a.nu) throw CLI::RequiredError("--nu or --gaussian");
    const KCalibration cal = a.gaussian ? calibrate_kstar_gaussian(a.T, a.N, a.seed, threads)
                                        : calibrate_kstar(*a.nu, a.T, a.N, a.seed, threads);
    write_calibration(os, cal);
    return kOk;
}

// ---------------------------------------------------------------- erf / sd-growth

struct ExperimentArgs {
    std::string config;
    std::optional<std::vector<double>> phi;
    std::optional<std::vector<double>> vphi;
    std::optional<double> nu;
    std::optional<double> eta;
    std::optional<std::vector<std::size_t>> T_grid;
    std::optional<std::size_t> N;
    std::optional<double> level;
    std::optional<std::vector<std::string>> methods;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> kstar_source;
    std::optional<std::size_t> kstar_n;
    std::optional<unsigned> threads;
    std::string format = "csv";
    std::string out;
};

ErfConfig experiment_config(const ExperimentArgs& a) {
    ErfConfig cfg;
    cfg.dgp.phi = {0.65};
    cfg.dgp.vphi = {0.35};
    cfg.dgp.dist = {3.0, 3.0};
    cfg.threads = default_threads();

    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) throw InvalidInput("cannot open config file '" + a.config + "'");
        nlohmann::json j;
        try {
            in >> j;
            if (j.contains("phi")) cfg.dgp.phi = j["phi"].get<std::vector<double>>();
            if (j.contains("vphi")) cfg.dgp.vphi = j["vphi"].get<std::vector<double>>();
            if (j.contains("nu")) cfg.dgp.dist.nu = j["nu"].get<double>();
            if (j.contains("eta")) cfg.dgp.dist.eta = j["eta"].get<double>();
            if (j.contains("T_grid")) cfg.T_grid = j["T_grid"].get<std::vector<std::size_t>>();
            if (j.contains("N")) cfg.N = j["N"].get<std::size_t>();
            if (j.contains("burn")) cfg.burn = j["burn"].get<std::size_t>();
            if (j.contains("nominal_level")) cfg.nominal_level = j["nominal_level"].get<double>();
            if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
            if (j.contains("kstar_N")) cfg.kstar_N = j["kstar_N"].get<std::size_t>();
            if (j.contains("kstar_source")) {
                const auto src = j["kstar_source"].get<std::string>();
                if (src != "calibrate" && src != "reference") throw InvalidInput("bad kstar_source " + src);
                cfg.kstar_source = src == "reference" ? KStarSource::reference : KStarSource::calibrate;
            }
            if (j.contains("kstar_per_replication")) {
                cfg.kstar_per_replication = j["kstar_per_replication"].get<bool>();
            }
            if (j.contains("start_at_truth")) cfg.start_at_truth = j["start_at_truth"].get<bool>();
            if (j.contains("n_random_starts")) cfg.fit.n_random_starts = j["n_random_starts"].get<int>();
            if (j.contains("threads")) cfg.threads = j["threads"].get<unsigned>();
            if (j.contains("methods")) {
                cfg.methods.clear();
                for (const auto& m : j["methods"]) cfg.methods.push_back(se_method_from_string(m.get<std::string>()));
            }
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput(std::string("config file: ") + e.what());
        }
    }
    if (a.phi) cfg.dgp.phi = *a.phi;
    if (a.vphi) cfg.dgp.vphi = *a.vphi;
    if (a.nu) cfg.dgp.dist.nu = *a.nu;
    if (a.eta) cfg.dgp.dist.eta = *a.eta;
    if (a.T_grid) cfg.T_grid = *a.T_grid;
    if (a.N) cfg.N = *a.N;
    if (a.level) cfg.nominal_level = *a.level;
    if (a.seed) cfg.seed = *a.seed;
    if (a.kstar_n) cfg.kstar_N = *a.kstar_n;
    if (a.kstar_source) {
        cfg.kstar_source = *a.kstar_source == "reference" ? KStarSource::reference : KStarSource::calibrate;
    }
    if (a.threads) cfg.threads = *a.threads;
    if (a.methods) {
        cfg.methods.clear();
        for (const auto& m : *a.methods) cfg.methods.push_back(se_method_from_string(m));
    }
    return cfg;
}

void write_config_comment(std::ostream& os, const ErfConfig& cfg) {
    os << "# dgp: phi=" << join(cfg.dgp.phi) << " vphi=" << join(cfg.dgp.vphi)
       << " nu=" << fmt(cfg.dgp.dist.nu) << " eta=" << fmt(cfg.dgp.dist.eta) << " N=" << cfg.N
       << " level=" << fmt(cfg.nominal_level) << " kstar="
       << (cfg.kstar_source == KStarSource::reference ? "reference" : "calibrate") << '\n';
}

int cmd_erf(const ExperimentArgs& a, const std::string& command, std::ostream& out) {
    const ErfConfig cfg = experiment_config(a);
    const auto rows = run_erf(cfg);
    Sink sink(a.out, out);
    std::ostream& os = sink.get();
    if (a.format == "json") {
        ordered_json j;
        j["tool"] = kTool;
        j["command"] = command;
        j["seed"] = cfg.seed;
        ordered_json arr = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json r{{"T", row.T}, {"method", to_string(row.method)}, {"defined", row.defined}};
            if (row.defined) {
                r["erf_phi"] = row.erf_phi;
                r["erf_vphi"] = row.erf_vphi;
            } else {
                r["erf_phi"] = nullptr;
                r["erf_vphi"] = nullptr;
                r["reason"] = "nu<=2";
            }
            r["n_used"] = row.n_used;
            r["n_failed"] = row.n_failed_fits;
            if (row.method == SeMethod::robust) r["kstar"] = row.kstar;
            arr.push_back(r);
        }
        j["rows"] = arr;
        os << j.dump(2) << '\n';
        return kOk;
    }
    write_comment_header(os, command, cfg.seed);
    write_config_comment(os, cfg);
    if (a.format == "table") {
        write_erf_table(os, rows);
    } else {
        write_erf_csv(os, rows);
    }
    return kOk;
}

int cmd_sd_growth(const ExperimentArgs& a, const std::string& command, std::ostream& out) {
    const ErfConfig cfg = experiment_config(a);
    const auto rows = run_sd_growth(cfg);
    Sink sink(a.out, out);
    std::ostream& os = sink.get();
    if (a.format == "json") {
        ordered_json j;
        j["tool"] = kTool;
        j["command"] = command;
        j["seed"] = cfg.seed;
        ordered_json arr = ordered_json::array();
        for (const auto& row : rows) {
            arr.push_back({{"T", row.T}, {"min", row.min}, {"q1", row.q1}, {"median", row.median},
                           {"q3", row.q3}, {"max", row.max}, {"n_used", row.n_used},
                           {"n_failed", row.n_failed_fits}, {"kstar", row.kstar}});
        }
        j["rows"] = arr;
        os << j.dump(2) << '\n';
        return kOk;
    }
    write_comment_header(os, command, cfg.seed);
    write_config_comment(os, cfg);
    write_sd_growth_csv(os, rows);
    return kOk;
}

void add_experiment_options(CLI::App* cmd, ExperimentArgs& a) {
    cmd->add_option("--config", a.config, "JSON experiment configuration")->check(CLI::ExistingFile);
    cmd->add_option("--phi", a.phi, "causal coefficients of the DGP");
    cmd->add_option("--vphi", a.vphi, "noncausal coefficients of the DGP");
    cmd->add_option("--nu", a.nu, "degrees of freedom of the DGP");
    cmd->add_option("--eta", a.eta, "scale of the DGP");
    cmd->add_option("--T-grid", a.T_grid, "sample sizes");
    cmd->add_option("--N", a.N, "replications per sample size");
    cmd->add_option("--level", a.level, "nominal significance level");
    cmd->add_option("--methods", a.methods, "classic, block_hessian, robust");
    cmd->add_option("--seed", a.seed, "master seed");
    cmd->add_option("--kstar-source", a.kstar_source, "calibrate or reference")
        ->check(CLI::IsMember({"calibrate", "reference"}));
    cmd->add_option("--kstar-n", a.kstar_n, "replications for each k* calibration");
    cmd->add_option("--threads", a.threads, "worker threads (default: MIXAR_THREADS or 1)");
    cmd->add_option("--out", a.out, "output file (default stdout)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mixed causal/noncausal autoregressions with Student's t errors", "mixar"};
    app.set_version_flag("--version", kTool);
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "simulate a MAR(r,s) path as CSV");
    simulate->add_option("--T", sim.T, "sample size")->required();
    simulate->add_option("--phi", sim.phi, "causal coefficients");
    simulate->add_option("--vphi", sim.vphi, "noncausal coefficients");
    simulate->add_option("--nu", sim.nu, "degrees of freedom")->capture_default_str();
    simulate->add_option("--eta", sim.eta, "scale")->capture_default_str();
    simulate->add_option("--burn", sim.burn, "burn-in on each side")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "random seed")->capture_default_str();
    simulate->add_option("--out", sim.out, "output file (default stdout)");

    FitArgs fit;
    auto* fitcmd = app.add_subcommand("fit", "select orders, fit a MAR model and report standard errors");
    fitcmd->add_option("--input", fit.input, "CSV file ('-' for stdin)")->required();
    fitcmd->add_option("--column", fit.column, "column index or header name (default: last)");
    fitcmd->add_option("--p-max", fit.p_max, "largest AR order considered")->capture_default_str();
    fitcmd->add_option("--criterion", fit.criterion, "aic or bic")
        ->check(CLI::IsMember({"aic", "bic"}))
        ->capture_default_str();
    fitcmd->add_option("--p", fit.p, "fix the total order p = r + s");
    auto* ropt = fitcmd->add_option("--r", fit.r, "fix the causal order");
    auto* sopt = fitcmd->add_option("--s", fit.s, "fix the noncausal order");
    ropt->needs(sopt);
    sopt->needs(ropt);
    fitcmd->add_option("--seed", fit.seed, "seed for starts and k* calibration")->capture_default_str();
    fitcmd->add_option("--kstar-source", fit.kstar_source, "calibrate or reference")
        ->check(CLI::IsMember({"calibrate", "reference"}))
        ->capture_default_str();
    fitcmd->add_option("--kstar-n", fit.kstar_n, "replications for the k* calibration")->capture_default_str();
    fitcmd->add_option("--random-starts", fit.random_starts, "random optimizer starts per split")
        ->capture_default_str();
    fitcmd->add_option("--format", fit.format, "json, table or csv")
        ->check(CLI::IsMember({"json", "table", "csv"}))
        ->capture_default_str();
    fitcmd->add_option("--threads", fit.threads, "worker threads (default: MIXAR_THREADS or 1)");
    fitcmd->add_option("--out", fit.out, "output file (default stdout)");

    CalibrateArgs cal;
    auto* calibrate = app.add_subcommand("calibrate-k", "Monte-Carlo calibration of k*(nu, T)");
    auto* nu_opt = calibrate->add_option("--nu", cal.nu, "degrees of freedom (> 1)");
    auto* gauss_opt = calibrate->add_flag("--gaussian", cal.gaussian, "Gaussian innovations");
    nu_opt->excludes(gauss_opt);
    calibrate->add_option("--T", cal.T, "sample size")->capture_default_str();
    calibrate->add_option("--N", cal.N, "replications")->capture_default_str();
    calibrate->add_option("--seed", cal.seed, "random seed")->capture_default_str();
    auto* table_opt = calibrate->add_flag("--table", cal.table, "regenerate the full reference grid");
    table_opt->excludes(nu_opt)->excludes(gauss_opt);
    calibrate->add_option("--threads", cal.threads, "worker threads (default: MIXAR_THREADS or 1)");
    calibrate->add_option("--out", cal.out, "output file (default stdout)");

    ExperimentArgs erf;
    auto* erfcmd = app.add_subcommand("erf", "empirical rejection frequencies of coefficient t-tests");
    add_experiment_options(erfcmd, erf);
    erfcmd->add_option("--format", erf.format, "csv, table or json")
        ->check(CLI::IsMember({"csv", "table", "json"}))
        ->capture_default_str();

    ExperimentArgs sdg;
    auto* sdcmd = app.add_subcommand("sd-growth", "quartiles of the robust residual scale by T");
    add_experiment_options(sdcmd, sdg);
    sdcmd->add_option("--format", sdg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim, canonical_command(*simulate), out);
        if (fitcmd->parsed()) return cmd_fit(fit, canonical_command(*fitcmd), out);
        if (calibrate->parsed()) return cmd_calibrate(cal, canonical_command(*calibrate), out);
        if (erfcmd->parsed()) return cmd_erf(erf, canonical_command(*erfcmd), out);
        if (sdcmd->parsed()) return cmd_sd_growth(sdg, canonical_command(*sdcmd), out);
    } catch (const CLI::RequiredError& e) {
        err << "error: " << e.what() << " is required\n";
        return kUsage;
    } catch (const ParseError& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const InvalidInput& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const NonConvergenceError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::domain_error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::runtime_error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}

}  // namespace mixar::cli
