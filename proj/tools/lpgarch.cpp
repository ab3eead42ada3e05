// lpgarch: fit, diagnose, simulate and report on log-periodic price models.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "lpgarch/lpgarch.hpp"

namespace {

using lpg::Json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitNumerical = 4;

struct RunConfig {
    std::string input;
    std::string date_column = "date";
    std::string price_column = "close";
    std::string from;
    std::string to;
    std::string model = "extended";
    std::string calendar = "weekends";
    lpg::GsaConfig gsa;
    lpg::BfgsConfig bfgs;
    double level = 0.95;
    std::uint64_t seed = 1;
    // diagnose
    std::string fit;
    std::size_t lb_lag = 20;
    std::size_t bds_replications = 5000;
    std::vector<std::size_t> bds_dims{2, 3, 4, 5, 6};
    std::vector<double> bds_eps{0.5, 1.0, 1.5, 2.0};
    bool bds = true;
    long adf_lags = -1;  ///< negative: automatic
    long pp_lags = -1;
    // simulate
    std::string params;
    std::size_t n = 544;
    std::size_t replications = 1;
    std::string origin = "2000-01-03";
};

Json to_json(const RunConfig& c) {
    return Json{{"input", c.input},
                {"date_column", c.date_column},
                {"price_column", c.price_column},
                {"from", c.from},
                {"to", c.to},
                {"model", c.model},
                {"calendar", c.calendar},
                {"gsa", c.gsa},
                {"bfgs", c.bfgs},
                {"level", c.level},
                {"seed", c.seed},
                {"fit", c.fit},
                {"lb_lag", c.lb_lag},
                {"bds", c.bds},
                {"bds_replications", c.bds_replications},
                {"bds_dims", c.bds_dims},
                {"bds_eps", c.bds_eps},
                {"adf_lags", c.adf_lags},
                {"pp_lags", c.pp_lags},
                {"params", c.params},
                {"n", c.n},
                {"replications", c.replications},
                {"origin", c.origin}};
}

template <class T>
void read(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

RunConfig config_from_json(const Json& doc) {
    // An output file can be used as a config: its embedded config is taken.
    const Json& j = doc.contains("config") && doc.at("config").is_object() ? doc.at("config") : doc;
    if (!j.is_object()) throw lpg::InputError("config must be a JSON object");
    RunConfig c;
    read(j, "input", c.input);
    read(j, "date_column", c.date_column);
    read(j, "price_column", c.price_column);
    read(j, "from", c.from);
    read(j, "to", c.to);
    read(j, "model", c.model);
    read(j, "calendar", c.calendar);
    if (j.contains("gsa")) c.gsa = j.at("gsa").get<lpg::GsaConfig>();
    if (j.contains("bfgs")) c.bfgs = j.at("bfgs").get<lpg::BfgsConfig>();
    read(j, "level", c.level);
    read(j, "seed", c.seed);
    read(j, "fit", c.fit);
    read(j, "lb_lag", c.lb_lag);
    read(j, "bds", c.bds);
    read(j, "bds_replications", c.bds_replications);
    read(j, "bds_dims", c.bds_dims);
    read(j, "bds_eps", c.bds_eps);
    read(j, "adf_lags", c.adf_lags);
    read(j, "pp_lags", c.pp_lags);
    read(j, "params", c.params);
    read(j, "n", c.n);
    read(j, "replications", c.replications);
    read(j, "origin", c.origin);
    return c;
}

Json read_json_file(const std::string& path, std::string_view what) {
    std::ifstream in(path);
    if (!in) throw lpg::InputError(fmt::format("cannot open {} '{}'", what, path));
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw lpg::InputError(fmt::format("{} '{}' is not valid JSON: {}", what, path, e.what()));
    }
}

/// Files are staged in memory and written only after every step succeeded.
class Outputs {
public:
    void add(std::string path, std::string content) {
        if (!path.empty()) files_.emplace_back(std::move(path), std::move(content));
    }

    void commit() const {
        for (const auto& [path, content] : files_) {
            const std::string tmp = path + ".tmp";
            {
                std::ofstream out(tmp, std::ios::binary);
                if (!out) throw lpg::InputError(fmt::format("cannot write '{}'", path));
                out << content;
                if (!out) throw lpg::InputError(fmt::format("failed writing '{}'", path));
            }
            std::filesystem::rename(tmp, path);
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string hex(std::uint64_t v) { return fmt::format("{:016x}", v); }

lpg::PriceSeries load_window(const RunConfig& c) {
    if (c.input.empty()) throw lpg::InputError("no input file given (--input)");
    auto series = lpg::load_csv(c.input, c.date_column, c.price_column);
    if (!c.from.empty() || !c.to.empty()) {
        const auto start = c.from.empty() ? series.dates().front() : lpg::parse_date(c.from);
        const auto end = c.to.empty() ? series.dates().back() : lpg::parse_date(c.to);
        series = lpg::slice_window(series, start, end);
    }
    return series;
}

Json series_summary(const lpg::PriceSeries& s) {
    return Json{{"n", s.size()},
                {"first", lpg::format_date(s.dates().front())},
                {"last", lpg::format_date(s.dates().back())},
                {"t_last", s.last_time()},
                {"fingerprint", hex(lpg::fingerprint(s))}};
}

void validate(const RunConfig& c) {
    if (c.model != "basic" && c.model != "extended")
        throw lpg::InputError(fmt::format("model must be 'basic' or 'extended', got '{}'", c.model));
    lpg::BusinessCalendar::from_name(c.calendar);
    c.gsa.validate();
    c.bfgs.validate();
    lpg::normal_quantile(c.level);
}

// ---------------------------------------------------------------- rendering

std::string param_table(const Json& params) {
    std::string out;
    for (const auto& [name, value] : params.items()) out += fmt::format("  {:<8}{:>16.6g}\n", name, value.get<double>());
    return out;
}

std::string warnings_text(const Json& fit) {
    std::string out;
    for (const auto& w : fit.value("warnings", Json::array())) out += "  warning: " + w.get<std::string>() + "\n";
    return out;
}

std::string render_fit(const Json& doc) {
    const auto& s = doc.at("series");
    const std::string model = doc.at("model").get<std::string>();
    std::string out = fmt::format("{} model, {} observations, {} to {} (t_last = {:.4f})\n", model,
                                  s.at("n").get<std::size_t>(), s.at("first").get<std::string>(),
                                  s.at("last").get<std::string>(), s.at("t_last").get<double>());
    const auto& basic = doc.at("basic");
    out += fmt::format("\nLog-periodic least squares (seed {})\n", basic.at("seed").get<std::uint64_t>());
    out += param_table(basic.at("params"));
    out += fmt::format("  {:<8}{:>16.6g}\n  converged: {}\n", "SSE", lpg::detail::number_from(basic.at("objective")),
                       basic.at("converged").get<bool>() ? "yes" : "no");
    out += warnings_text(basic);
    if (doc.contains("extended")) {
        const auto& ext = doc.at("extended");
        out += "\nLog-periodic AR(1)-GARCH(1,1) maximum likelihood\n";
        out += param_table(ext.at("params"));
        out += fmt::format("  {:<8}{:>16.6f}\n  converged: {}\n", "lnL", lpg::detail::number_from(ext.at("objective")),
                           ext.at("converged").get<bool>() ? "yes" : "no");
        out += warnings_text(ext);
    }
    if (doc.contains("inference") && !doc.at("inference").is_null()) {
        const auto rep = doc.at("inference").get<lpg::InferenceReport>();
        out += "\n" + lpg::render_inference(rep);
        for (const auto& w : rep.warnings) out += "  warning: " + w + "\n";
    }
    if (doc.contains("crash_window") && !doc.at("crash_window").is_null()) {
        const auto& w = doc.at("crash_window");
        out += fmt::format("\nCrash window ({} calendar): {} to {}\n", w.at("calendar").get<std::string>(),
                           w.at("lower").get<std::string>(), w.at("upper").get<std::string>());
    }
    return out;
}

std::string render_diagnose(const Json& doc) {
    std::string out = fmt::format("Diagnostics of the {} model fit ({} residuals)\n\n", doc.at("model").get<std::string>(),
                                  doc.at("residuals").get<std::string>());
    return out + lpg::render_diagnostics(doc.at("diagnostics").get<lpg::DiagnosticsReport>());
}

std::string render_simulate(const Json& doc) {
    if (!doc.contains("study")) {
        const auto& s = doc.at("series");
        return fmt::format("Simulated {} observations from {} to {} (seed {})\n", s.at("n").get<std::size_t>(),
                           s.at("first").get<std::string>(), s.at("last").get<std::string>(),
                           doc.at("config").at("seed").get<std::uint64_t>());
    }
    const auto& st = doc.at("study");
    std::size_t ok = 0;
    for (const auto& r : st.at("records")) ok += r.at("ok").get<bool>();
    std::string out = fmt::format("Recovery study: {} replications of n = {}, {} completed, convergence rate {:.3f}\n\n",
                                  st.at("replications").get<std::size_t>(), st.at("n").get<std::size_t>(), ok,
                                  st.at("convergence_rate").get<double>());
    out += fmt::format("{:<10}{:>14}{:>14}{:>14}{:>14}{:>12}\n", "Parameter", "Truth", "Bias", "RMSE", "Median |err|",
                       "Coverage");
    const auto& truth = st.at("truth");
    for (const auto& s : st.at("summaries")) {
        const std::string name = s.at("name").get<std::string>();
        auto num = [](const Json& v) { return v.is_null() ? std::string("-") : fmt::format("{:.6g}", v.get<double>()); };
        out += fmt::format("{:<10}{:>14.6g}{:>14}{:>14}{:>14}{:>12}\n", name, truth.at(name).get<double>(), num(s.at("bias")),
                           num(s.at("rmse")), num(s.at("median_abs_error")), num(s.at("coverage")));
    }
    return out;
}

std::string render(const Json& doc) {
    const std::string cmd = doc.value("command", "");
    if (cmd == "fit") return render_fit(doc);
    if (cmd == "diagnose") return render_diagnose(doc);
    if (cmd == "simulate") return render_simulate(doc);
    throw lpg::InputError("not an lpgarch output file (missing or unknown 'command')");
}

std::string with_config_footer(const std::string& text, const Json& doc) {
    return text + "\n# config: " + doc.at("config").dump() + "\n";
}

// ---------------------------------------------------------------- commands

struct Paths {
    std::string output;
    std::string report;
    std::string dump_series;
    std::string csv;
};

void emit(Outputs& files, const Json& doc, const Paths& paths) {
    files.add(paths.output, dump(doc));
    const std::string text = with_config_footer(render(doc), doc);
    if (paths.report.empty()) std::cout << text;
    else files.add(paths.report, text);
}

Json header(const char* command, const RunConfig& c) {
    return Json{{"tool", "lpgarch"}, {"command", command}, {"config", to_json(c)}};
}

int cmd_fit(const RunConfig& c, const Paths& paths, unsigned threads) {
    validate(c);
    const auto series = load_window(c);
    const auto calendar = lpg::BusinessCalendar::from_name(c.calendar);
    lpg::GsaConfig gsa = c.gsa;
    gsa.seed = c.seed;
    gsa.threads = threads;

    const auto started = std::chrono::steady_clock::now();
    Json doc = header("fit", c);
    doc["series"] = series_summary(series);
    doc["model"] = c.model;
    bool converged = false;
    const std::size_t n = series.size();
    std::ostringstream dumped;
    dumped << "date,t,price,trend,residual" << (c.model == "extended" ? ",standardized_residual" : "") << "\n";

    if (c.model == "basic") {
        const auto fit = lpg::fit_logperiodic(series, gsa, c.bfgs);
        doc["basic"] = fit;
        converged = fit.converged;
        const auto trend = lpg::fitted_trend(fit.params, series.times());
        for (std::size_t i = 0; i < n; ++i)
            dumped << fmt::format("{},{},{},{},{}\n", lpg::format_date(series.dates()[i]), series.times()[i],
                                  series.prices()[i], trend[i], series.prices()[i] - trend[i]);
    } else {
        const auto fit = lpg::fit_extended(series, lpg::default_lp_bounds(series), gsa, c.bfgs);
        doc["basic"] = fit.stage1;
        doc["residual_garch"] = fit.stage2;
        doc["extended"] = fit.full;
        converged = fit.full.converged;
        Json inference = nullptr, window = nullptr;
        try {
            const auto rep = lpg::infer(fit.full.params, series, c.level, threads);
            inference = rep;
            const auto [lo, hi] = lpg::crash_window(rep, series.dates().front(), calendar);
            window = Json{{"calendar", calendar.name()}, {"lower", lpg::format_date(lo)}, {"upper", lpg::format_date(hi)}};
        } catch (const lpg::NumericalError& e) {
            doc["extended"]["warnings"].push_back(std::string("inference unavailable: ") + e.what());
        } catch (const lpg::DomainError& e) {
            doc["extended"]["warnings"].push_back(std::string("crash window unavailable: ") + e.what());
        } catch (const lpg::InputError& e) {
            doc["extended"]["warnings"].push_back(std::string("crash window unavailable: ") + e.what());
        }
        doc["inference"] = inference;
        doc["crash_window"] = window;
        const auto trend = lpg::fitted_trend(fit.full.params.lp, series.times());
        const auto eps = lpg::standardized_residuals(fit.full.params, series);
        for (std::size_t i = 0; i < n; ++i)
            dumped << fmt::format("{},{},{},{},{},{}\n", lpg::format_date(series.dates()[i]), series.times()[i],
                                  series.prices()[i], trend[i], series.prices()[i] - trend[i],
                                  i == 0 ? std::string() : fmt::format("{}", eps[i - 1]));
    }
    std::cerr << fmt::format("fit finished in {:.2f} s\n",
                             std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());

    Outputs files;
    emit(files, doc, paths);
    if (!paths.dump_series.empty()) {
        files.add(paths.dump_series, dumped.str());
        files.add(paths.dump_series + ".meta.json", dump(header("fit", c)));
    }
    files.commit();
    if (!converged) {
        std::cerr << "warning: the optimizer did not report convergence\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

int cmd_diagnose(const RunConfig& c, const Paths& paths, unsigned threads) {
    if (c.fit.empty()) throw lpg::InputError("no fit file given (--fit)");
    const Json fit = read_json_file(c.fit, "fit file");
    if (fit.value("command", "") != "fit" || !fit.contains("basic") || !fit.contains("series"))
        throw lpg::InputError(fmt::format("'{}' is not an lpgarch fit file", c.fit));

    // The window and columns come from the fit; only the input path may be overridden.
    RunConfig fc = config_from_json(fit);
    if (!c.input.empty()) fc.input = c.input;
    const auto series = load_window(fc);
    const std::string expected = fit.at("series").at("fingerprint").get<std::string>();
    if (hex(lpg::fingerprint(series)) != expected)
        throw lpg::InputError(fmt::format("input series does not match the fit (fingerprint {} != {})",
                                          hex(lpg::fingerprint(series)), expected));

    const std::string model = fit.at("model").get<std::string>();
    std::vector<double> iid_input, levels;
    std::string kind;
    if (model == "extended") {
        const auto theta = fit.at("extended").at("params").get<lpg::FullParams>();
        iid_input = lpg::standardized_residuals(theta, series);
        levels = lpg::residuals(theta.lp, series);
        kind = "standardized";
    } else {
        const auto lp = fit.at("basic").at("params").get<lpg::LPParams>();
        levels = lpg::residuals(lp, series);
        iid_input = levels;
        kind = "trend";
    }

    lpg::DiagnosticsConfig dc;
    dc.lb_lag = c.lb_lag;
    if (c.adf_lags >= 0) dc.adf_lags = static_cast<std::size_t>(c.adf_lags);
    if (c.pp_lags >= 0) dc.pp_lags = static_cast<std::size_t>(c.pp_lags);
    dc.run_bds = c.bds;
    dc.bds.dims = c.bds_dims;
    dc.bds.eps_multipliers = c.bds_eps;
    dc.bds.replications = c.bds_replications;
    dc.bds.seed = c.seed;
    dc.bds.threads = threads;
    const auto report = lpg::run_diagnostics(iid_input, levels, dc);

    RunConfig echo = c;
    echo.input = fc.input;
    Json doc = header("diagnose", echo);
    doc["fit_config"] = fit.at("config");
    doc["series"] = series_summary(series);
    doc["model"] = model;
    doc["residuals"] = kind;
    doc["diagnostics"] = report;
    Outputs files;
    emit(files, doc, paths);
    files.commit();
    return kExitOk;
}

lpg::FullParams read_params(const std::string& path) {
    if (path.empty()) throw lpg::InputError("no parameter file given (--params)");
    const Json j = read_json_file(path, "parameter file");
    try {
        if (j.contains("extended")) return j.at("extended").at("params").get<lpg::FullParams>();
        if (j.contains("params")) return j.at("params").get<lpg::FullParams>();
        return j.get<lpg::FullParams>();
    } catch (const Json::exception& e) {
        throw lpg::InputError(fmt::format("invalid parameter file '{}': {}", path, e.what()));
    }
}

int cmd_simulate(const RunConfig& c, const Paths& paths, unsigned threads) {
    c.gsa.validate();
    c.bfgs.validate();
    if (c.n < lpg::kMinFitLength)
        throw lpg::InputError(fmt::format("series length {} is below the minimum {}", c.n, lpg::kMinFitLength));
    if (c.replications != 1 && c.replications < 10)
        throw lpg::InputError("replications must be 1 (one synthetic series) or at least 10 (a recovery study)");
    const auto truth = read_params(c.params);
    truth.ag.validate();
    Json doc = header("simulate", c);
    doc["truth"] = truth;
    Outputs files;
    if (c.replications == 1) {
        if (paths.output.empty()) throw lpg::InputError("--output is required for the simulated CSV");
        const auto series = lpg::simulate(truth, c.n, c.seed, 0, lpg::parse_date(c.origin));
        doc["series"] = series_summary(series);
        files.add(paths.output, lpg::to_csv_string(series));
        files.add(paths.output + ".meta.json", dump(doc));
        const std::string text = with_config_footer(render(doc), doc);
        if (paths.report.empty()) std::cout << text;
        else files.add(paths.report, text);
    } else {
        lpg::RecoveryConfig rc;
        rc.gsa = c.gsa;
        rc.bfgs = c.bfgs;
        rc.level = c.level;
        rc.lb_lag = c.lb_lag;
        rc.threads = threads;
        const auto study = lpg::recovery_study(truth, c.n, c.replications, rc, c.seed);
        doc["study"] = study;
        emit(files, doc, paths);
        if (!paths.csv.empty()) {
            std::ostringstream csv;
            lpg::write_replications_csv(csv, study);
            files.add(paths.csv, csv.str());
            files.add(paths.csv + ".meta.json", dump(header("simulate", c)));
        }
    }
    files.commit();
    return kExitOk;
}

int cmd_report(const std::string& path, const Paths& paths) {
    const Json doc = read_json_file(path, "report file");
    if (!doc.contains("config")) throw lpg::InputError(fmt::format("'{}' is not an lpgarch output file", path));
    const std::string text = with_config_footer(render(doc), doc);
    Outputs files;
    if (paths.report.empty()) std::cout << text;
    else files.add(paths.report, text);
    files.commit();
    return kExitOk;
}

// ---------------------------------------------------------------- options

/// Flags write into `parsed`; after parsing, given flags override the config file.
class Flags {
public:
    template <class T, class Field>
    void add(CLI::App* app, const std::string& name, Field field, const std::string& help) {
        auto holder = std::make_shared<T>();
        CLI::Option* opt = app->add_option(name, *holder, help);
        apply_.push_back([opt, holder, field](RunConfig& c) {
            if (opt->count() > 0) field(c) = *holder;
        });
    }

    /// A flag that, when given, stores `value` in the field.
    template <class Field>
    void add_switch(CLI::App* app, const std::string& name, Field field, bool value, const std::string& help) {
        CLI::Option* opt = app->add_flag(name, help);
        apply_.push_back([opt, field, value](RunConfig& c) {
            if (opt->count() > 0) field(c) = value;
        });
    }

    void apply(RunConfig& c) const {
        for (const auto& f : apply_) f(c);
    }

private:
    std::vector<std::function<void(RunConfig&)>> apply_;
};

#define FIELD(expr) [](RunConfig& c) -> decltype(auto) { return (c.expr); }

void add_common(CLI::App* app, Flags& f) {
    f.add<std::uint64_t>(app, "--seed", FIELD(seed), "random seed (default 1)");
}

void add_series(CLI::App* app, Flags& f) {
    f.add<std::string>(app, "-i,--input", FIELD(input), "price CSV with a header row");
    f.add<std::string>(app, "--date-column", FIELD(date_column), "date column name (default date)");
    f.add<std::string>(app, "--price-column", FIELD(price_column), "price column name (default close)");
    f.add<std::string>(app, "--from", FIELD(from), "first date of the window, YYYY-MM-DD");
    f.add<std::string>(app, "--to", FIELD(to), "last date of the window, YYYY-MM-DD");
}

void add_optimizer(CLI::App* app, Flags& f) {
    f.add<double>(app, "--gsa-qv", FIELD(gsa.qv), "GSA visiting shape");
    f.add<double>(app, "--gsa-qa", FIELD(gsa.qa), "GSA acceptance shape");
    f.add<double>(app, "--gsa-t0", FIELD(gsa.t0), "GSA acceptance temperature (default: cost spread)");
    f.add<double>(app, "--gsa-visit-t0", FIELD(gsa.visit_t0), "GSA visiting temperature");
    f.add<double>(app, "--gsa-radius", FIELD(gsa.search_radius), "GSA search radius in transformed space");
    f.add<std::size_t>(app, "--gsa-iterations", FIELD(gsa.max_iterations), "GSA cost evaluations per restart");
    f.add<std::size_t>(app, "--gsa-restarts", FIELD(gsa.restarts), "GSA restarts");
    f.add<double>(app, "--bfgs-gtol", FIELD(bfgs.gradient_tolerance), "BFGS gradient tolerance");
    f.add<double>(app, "--bfgs-xtol", FIELD(bfgs.step_tolerance), "BFGS relative step tolerance");
    f.add<std::size_t>(app, "--bfgs-iterations", FIELD(bfgs.max_iterations), "BFGS iteration limit");
}

void add_outputs(CLI::App* app, Paths& p) {
    app->add_option("-o,--output", p.output, "JSON output path");
    app->add_option("--report", p.report, "text report path (default: standard output)");
}

int run(int argc, char** argv) {
    CLI::App app{"Log-periodic and log-periodic AR(1)-GARCH(1,1) price models"};
    app.require_subcommand(1);
    std::string config_path;
    unsigned threads = lpg::default_thread_count();
    app.add_option("--config", config_path, "JSON config; explicit flags take precedence");
    app.add_option("--threads", threads, "worker threads (default: LPGARCH_THREADS or hardware)")->check(CLI::PositiveNumber);
    Flags flags;
    Paths paths;

    auto* fit = app.add_subcommand("fit", "estimate the basic or extended model");
    add_series(fit, flags);
    add_common(fit, flags);
    add_optimizer(fit, flags);
    add_outputs(fit, paths);
    flags.add<std::string>(fit, "--model", FIELD(model), "basic | extended (default extended)");
    flags.add<std::string>(fit, "--calendar", FIELD(calendar), "weekends | nyse, for the crash window");
    flags.add<double>(fit, "--level", FIELD(level), "confidence level (default 0.95)");
    fit->add_option("--dump-series", paths.dump_series, "CSV of prices, fitted trend and residuals");

    auto* diag = app.add_subcommand("diagnose", "residual diagnostics of a saved fit");
    flags.add<std::string>(diag, "--fit", FIELD(fit), "fit JSON written by 'fit'");
    flags.add<std::string>(diag, "-i,--input", FIELD(input), "price CSV (default: the fit's input)");
    add_common(diag, flags);
    add_outputs(diag, paths);
    flags.add<std::size_t>(diag, "--lb-lag", FIELD(lb_lag), "Ljung-Box lag (default 20)");
    flags.add<std::size_t>(diag, "--bds-replications", FIELD(bds_replications), "BDS bootstrap replications");
    flags.add<std::vector<std::size_t>>(diag, "--bds-dims", FIELD(bds_dims), "BDS embedding dimensions");
    flags.add<std::vector<double>>(diag, "--bds-eps", FIELD(bds_eps), "BDS thresholds in standard deviations");
    flags.add_switch(diag, "--no-bds", FIELD(bds), false, "skip the BDS test");
    flags.add<long>(diag, "--adf-lags", FIELD(adf_lags), "ADF lag order (default: AIC)");
    flags.add<long>(diag, "--pp-lags", FIELD(pp_lags), "PP bandwidth (default: Newey-West)");

    auto* sim = app.add_subcommand("simulate", "simulate series or run a recovery study");
    flags.add<std::string>(sim, "--params", FIELD(params), "JSON with the 11 parameters (or a fit file)");
    flags.add<std::size_t>(sim, "-n,--length", FIELD(n), "observations per series (default 544)");
    flags.add<std::size_t>(sim, "--replications", FIELD(replications), "1 for a single CSV, >= 10 for a study");
    flags.add<std::string>(sim, "--origin", FIELD(origin), "first simulated date");
    flags.add<double>(sim, "--level", FIELD(level), "confidence level (default 0.95)");
    flags.add<std::size_t>(sim, "--lb-lag", FIELD(lb_lag), "Ljung-Box lag (default 20)");
    add_common(sim, flags);
    add_optimizer(sim, flags);
    add_outputs(sim, paths);
    sim->add_option("--csv", paths.csv, "per-replication CSV of estimates");

    auto* rep = app.add_subcommand("report", "render a saved JSON output as text");
    std::string report_input;
    rep->add_option("file", report_input, "JSON output of fit, diagnose or simulate")->required();
    rep->add_option("-o,--output", paths.report, "text path (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    if (rep->parsed()) return cmd_report(report_input, paths);

    RunConfig config;
    if (!config_path.empty()) config = config_from_json(read_json_file(config_path, "config file"));
    flags.apply(config);
    if (fit->parsed()) return cmd_fit(config, paths, threads);
    if (diag->parsed()) return cmd_diagnose(config, paths, threads);
    return cmd_simulate(config, paths, threads);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const lpg::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
