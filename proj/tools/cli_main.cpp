// Command-line front end. Everything analytic goes through the C API in
// repsys.h; this file only assembles configs, moves strings, and writes files.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "repsys.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail_from_api(const std::string& context) {
    int code = rs_last_error_kind();
    if (code == 0) code = 3;
    throw CliError{code, context + ": " + rs_last_error_message()};
}

std::string take_string(char* s, const std::string& context) {
    if (!s) fail_from_api(context);
    std::string out(s);
    rs_string_free(s);
    return out;
}

using dataset_ptr = std::unique_ptr<rs_dataset, decltype(&rs_dataset_free)>;
using model_ptr = std::unique_ptr<rs_model, decltype(&rs_model_free)>;

dataset_ptr wrap(rs_dataset* d, const std::string& context) {
    if (!d) fail_from_api(context);
    return dataset_ptr(d, rs_dataset_free);
}

model_ptr wrap(rs_model* m, const std::string& context) {
    if (!m) fail_from_api(context);
    return model_ptr(m, rs_model_free);
}

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Aligned text rendering; the CSV twin is the same cells joined by commas.
std::string text_table(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size() && c < width.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    std::string out;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += row[c];
            if (c + 1 < row.size()) out.append(width[c] - row[c].size() + 2, ' ');
        }
        out += '\n';
    };
    emit(header);
    for (const auto& row : rows) emit(row);
    return out;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += row[c];
            if (c + 1 < row.size()) out += ',';
        }
        out += '\n';
    };
    emit(header);
    for (const auto& row : rows) emit(row);
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError{2, "cannot open output file " + path.string()};
    out << content;
    if (!out) throw CliError{2, "failed writing " + path.string()};
}

// ---- shared option groups -------------------------------------------------

struct DatasetArgs {
    std::string events;
    std::string tau_file;
    std::string covariates;
    double tau = 0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--events", events, "event CSV (system_id,time[,mark])")
            ->required();
        cmd->add_option("--tau-file", tau_file,
                        "observation-window CSV (system_id,censor_time)");
        cmd->add_option("--tau", tau, "shared censoring time (alternative to --tau-file)");
        cmd->add_option("--covariates", covariates, "covariate CSV (system_id,z1,...)");
    }

    dataset_ptr load() const {
        return wrap(rs_dataset_load(events.c_str(),
                                    tau_file.empty() ? nullptr : tau_file.c_str(), tau,
                                    covariates.empty() ? nullptr : covariates.c_str()),
                    "loading " + events);
    }
};

struct ModelArgs {
    std::string model;
    std::string renewal, trend, frailty, hazard, policy, beta;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--model", model,
                        "model kind (hpp|rp|nhpp|trp|virtual-age|modulated) or a full "
                        "'model=... key=...' spec")
            ->required();
        cmd->add_option("--renewal", renewal, "renewal family, e.g. weibull:s=2");
        cmd->add_option("--trend", trend, "trend function, e.g. power:c=1,b=1.5");
        cmd->add_option("--frailty", frailty, "frailty, e.g. gamma:v=0.5");
        cmd->add_option("--hazard", hazard, "virtual-age hazard, e.g. weibull:s=2,scale=10");
        cmd->add_option("--policy", policy, "repair policy, e.g. kijima2:dlaw=uniform");
        cmd->add_option("--beta", beta, "covariate coefficients, comma separated");
    }

    std::string spec_text() const {
        std::string text =
            model.find('=') != std::string::npos ? model : "model=" + model;
        auto append = [&](const char* key, const std::string& value) {
            if (!value.empty()) text += " " + std::string(key) + "=" + value;
        };
        append("renewal", renewal);
        append("trend", trend);
        append("frailty", frailty);
        append("hazard", hazard);
        append("policy", policy);
        append("beta", beta);
        return text;
    }

    model_ptr parse() const {
        const auto text = spec_text();
        return wrap(rs_model_parse(text.c_str()), "parsing model '" + text + "'");
    }
};

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out.empty() ? "." : out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CliError{2, "cannot create output directory " + dir.string()};
    return dir;
}

void echo_config(CLI::App& app, const fs::path& dir) {
    write_file(dir / "config_echo.cfg", app.config_to_str(false, false));
}

void save_dataset(const dataset_ptr& d, const fs::path& dir) {
    write_file(dir / "events.csv", take_string(rs_dataset_events_csv(d.get()), "events"));
    write_file(dir / "windows.csv",
               take_string(rs_dataset_windows_csv(d.get()), "windows"));
}

// ---- table builders -------------------------------------------------------

std::pair<std::string, std::string> fit_tables(const json& f) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : f["estimates"]) {
        rows.push_back({e["name"].get<std::string>(), fmt_num(e["value"].get<double>())});
    }
    rows.push_back({"loglik", fmt_num(f["loglik"].get<double>())});
    rows.push_back({"converged", f["converged"].get<bool>() ? "yes" : "no"});
    std::string boundary;
    for (const auto& b : f["boundary"]) {
        if (!boundary.empty()) boundary += ";";
        boundary += b.get<std::string>();
    }
    rows.push_back({"boundary", boundary.empty() ? "-" : boundary});
    const std::vector<std::string> header = {"quantity", "value"};
    return {text_table(header, rows), csv_table(header, rows)};
}

std::pair<std::string, std::string> trend_tables(const json& results) {
    const std::vector<std::string> header = {"system", "method",    "null",
                                             "statistic", "p",      "sides",
                                             "calibration"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : results) {
        rows.push_back({r.contains("system") ? r["system"].get<std::string>() : "all",
                        r["method"].get<std::string>(), r["null"].get<std::string>(),
                        fmt_num(r["statistic"].get<double>()), fmt_num(r["p"].get<double>()),
                        r["one_sided"].get<bool>() ? "one" : "two",
                        r["calibration"].get<std::string>()});
    }
    return {text_table(header, rows), csv_table(header, rows)};
}

std::pair<std::string, std::string> loglik_tables(const json& rep) {
    const std::vector<std::string> header = {"system", "loglik"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : rep["per_system"]) {
        rows.push_back(
            {p["system"].get<std::string>(), fmt_num(p["loglik"].get<double>())});
    }
    rows.push_back({"total", fmt_num(rep["total"].get<double>())});
    return {text_table(header, rows), csv_table(header, rows)};
}

std::string cube_corners_csv(const json& cube) {
    const std::vector<std::string> header = {"corner", "loglik", "converged",
                                             "boundary", "param", "value"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : cube["corners"]) {
        std::string boundary;
        for (const auto& b : c["boundary"]) {
            if (!boundary.empty()) boundary += ";";
            boundary += b.get<std::string>();
        }
        if (boundary.empty()) boundary = "-";
        for (const auto& e : c["estimates"]) {
            rows.push_back({c["corner"].get<std::string>(),
                            fmt_num(c["loglik"].get<double>()),
                            c["converged"].get<bool>() ? "yes" : "no", boundary,
                            e["name"].get<std::string>(),
                            fmt_num(e["value"].get<double>())});
        }
    }
    return csv_table(header, rows);
}

std::string cube_edges_csv(const json& cube) {
    const std::vector<std::string> header = {"from",    "to",      "statistic",
                                             "df",      "p_naive", "p_boundary"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : cube["edges"]) {
        rows.push_back({e["from"].get<std::string>(), e["to"].get<std::string>(),
                        fmt_num(e["statistic"].get<double>()),
                        std::to_string(e["df"].get<int>()),
                        fmt_num(e["p_naive"].get<double>()),
                        fmt_num(e["p_boundary"].get<double>())});
    }
    return csv_table(header, rows);
}

std::pair<std::string, std::string> residual_check_tables(const json& rep) {
    const std::vector<std::string> header = {"check", "statistic", "p"};
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"exponentiality",
                    fmt_num(rep["exponentiality"]["statistic"].get<double>()),
                    fmt_num(rep["exponentiality"]["p"].get<double>())});
    rows.push_back({"residual-trend",
                    fmt_num(rep["residual_trend"]["statistic"].get<double>()),
                    fmt_num(rep["residual_trend"]["p"].get<double>())});
    rows.push_back({"lag1-autocorrelation", fmt_num(rep["lag1_autocorrelation"].get<double>()),
                    fmt_num(rep["lag1_p"].get<double>())});
    return {text_table(header, rows), csv_table(header, rows)};
}

// ---- subcommand state -----------------------------------------------------

struct Options {
    std::string out = ".";

    DatasetArgs data;
    ModelArgs model;

    int systems = 1;
    double tau = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;

    std::string method;
    int resample = 0;

    std::string family;
    std::string policy;
    std::string labels;
    std::string frailty_variances;
};

int run_simulate(CLI::App& app, const Options& o) {
    const auto dir = prepare_out_dir(o.out);
    echo_config(app, dir);
    const auto model = o.model.parse();
    const auto d = wrap(rs_simulate(model.get(), o.systems, o.tau, o.seed), "simulate");
    save_dataset(d, dir);
    std::cout << "simulated " << rs_dataset_system_count(d.get()) << " systems, "
              << rs_dataset_total_events(d.get()) << " events -> "
              << (dir / "events.csv").string() << "\n";
    return 0;
}

int run_fit(CLI::App& app, const Options& o) {
    const auto dir = prepare_out_dir(o.out);
    echo_config(app, dir);
    const auto d = o.data.load();
    const auto model = o.model.parse();
    const auto report = take_string(rs_fit_json(model.get(), d.get()), "fit");
    const json f = json::parse(report);
    const auto [text, csv] = fit_tables(f);
    write_file(dir / "fit.json", report);
    write_file(dir / "fit.txt", "spec: " + f["spec"].get<std::string>() + "\n" + text);
    write_file(dir / "fit.csv", csv);
    std::cout << "spec: " << f["spec"].get<std::string>() << "\n" << text;
    return 0;
}

int run_cube(CLI::App& app, const Options& o) {
    const auto dir = prepare_out_dir(o.out);
    echo_config(app, dir);
    const auto d = o.data.load();
    const auto report = take_string(rs_fit_cube_json(d.get()), "cube fit");
    const json cube = json::parse(report);
    write_file(dir / "cube.json", report);
    write_file(dir / "cube.txt", cube["rendered"].get<std::string>());
    write_file(dir / "corners.csv", cube_corners_csv(cube));
    write_file(dir / "edges.csv", cube_edges_csv(cube));
    std::cout << cube["rendered"].get<std::string>();
    return 0;
}

int run_trend_test(CLI::App& app, const Options& o) {
    if (o.resample > 0 && !o.seed_given) {
        throw CliError{1, "--resample requires --seed (no wall-clock seeding)"};
    }
    const auto dir = prepare_out_dir(o.out);
    echo_config(app, dir);
    const auto d = o.data.load();
    const auto report = take_string(
        rs_trend_test_json(d.get(), o.method.c_str(), o.resample, o.seed), "trend test");
    const json parsed = json::parse(report);
    const auto [text, csv] = trend_tables(parsed["results"]);
    write_file(dir / "trend_test.json", report);
    write_file(dir / "trend_test.txt", text);
    write_file(dir / "trend_test.csv", csv);
    std::cout << text;
    return 0;
}

int run_diagnose(CLI::App& app, const Options& o) {
    const auto dir = prepare_out_dir(o.out);
    echo_config(app, dir);
    const auto d = o.data.load();
    const auto mcf = take_string(rs_nelson_aalen_csv(d.get()), "mean cumulative function");
    const auto ttt = take_string(rs_ttt_plot_csv(d.get()), "total time on test plot");
    write_file(dir / "mcf.csv", mcf);
    write_file(dir / "ttt.csv", ttt);
    write_file(dir / "mcf.svg",
               take_string(rs_plot_svg(mcf.c_str(), "mean cumulative function"), "mcf svg"));
    write_file(dir / "ttt.svg",
               take_string(rs_plot_svg(ttt.c_str(), "total time on test"), "ttt svg"));
    std::cout << "wrote mcf.csv, mcf.svg, ttt.csv, ttt.svg in " << dir.string() << "\n";
    return 0;
}

int run_residuals(CLI::App& app, const Options& o) {
    const auto dir = prepare_out_dir(o.out);
    echo_config(app, dir);
    const auto d = o.data.load();
    const auto model = o.model.parse();
    const auto report = take_string(rs_residuals_json(model.get(), d.get()), "residuals");
    const json parsed = json::parse(report);
    const auto [text, csv] = residual_check_tables(parsed);
    write_file(dir / "residuals.json", report);
    write_file(dir / "residual_checks.txt", text);
    write_file(dir / "residual_checks.csv", csv);
    std::cout << "fitted: " << parsed["fit"]["spec"].get<std::string>() << "\n" << text;
    return 0;
}

int run_cr_simulate(CLI::App& app, const Options& o) {
    const auto dir = prepare_out_dir(o.out);
    echo_config(app, dir);
    const auto d = wrap(rs_cr_simulate(o.family.c_str(), o.policy.c_str(),
                                       o.labels.c_str(), o.systems, o.tau, o.seed),
                        "marked simulate");
    save_dataset(d, dir);
    std::cout << "simulated " << rs_dataset_system_count(d.get()) << " systems, "
              << rs_dataset_total_events(d.get()) << " marked events -> "
              << (dir / "events.csv").string() << "\n";
    return 0;
}

int run_cr_loglik(CLI::App& app, const Options& o) {
    const auto dir = prepare_out_dir(o.out);
    echo_config(app, dir);
    const auto d = o.data.load();
    const auto report = take_string(
        rs_cr_loglik_json(o.family.c_str(), o.policy.c_str(), o.labels.c_str(), d.get(),
                          o.frailty_variances.c_str()),
        "marked loglik");
    const json parsed = json::parse(report);
    const auto [text, csv] = loglik_tables(parsed);
    write_file(dir / "loglik.json", report);
    write_file(dir / "loglik.txt", text);
    write_file(dir / "loglik.csv", csv);
    std::cout << text;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"repairable-systems failure-process toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "flat key-value configuration (section.key = value), merged "
                   "under explicit-flag precedence");

    Options o;
    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("--out", o.out, "output directory")->capture_default_str();
        cmd->configurable();
    };
    auto add_seed = [&](CLI::App* cmd, bool required) {
        auto* opt = cmd->add_option("--seed", o.seed, "random seed (no wall-clock seeding)");
        if (required) opt->required();
        cmd->callback([&o, opt] { o.seed_given = opt->count() > 0; });
    };

    auto* simulate = app.add_subcommand("simulate", "draw a dataset from a model");
    add_out(simulate);
    o.model.add_to(simulate);
    simulate->add_option("--systems", o.systems, "number of systems")->required();
    simulate->add_option("--tau", o.tau, "censoring time per system")->required();
    add_seed(simulate, true);

    auto* fit = app.add_subcommand("fit", "maximum likelihood for one model family");
    add_out(fit);
    o.data.add_to(fit);
    o.model.add_to(fit);

    auto* cube = app.add_subcommand(
        "cube", "eight-corner renewal x trend x heterogeneity comparison");
    add_out(cube);
    o.data.add_to(cube);
    // fixed families for the sweep; flags kept for config echo readability
    std::string cube_renewal = "weibull", cube_trend = "power", cube_frailty = "gamma";
    cube->add_option("--renewal", cube_renewal, "renewal family of the sweep")
        ->check(CLI::IsMember({"weibull"}))
        ->capture_default_str();
    cube->add_option("--trend", cube_trend, "trend family of the sweep")
        ->check(CLI::IsMember({"power"}))
        ->capture_default_str();
    cube->add_option("--frailty", cube_frailty, "frailty family of the sweep")
        ->check(CLI::IsMember({"gamma"}))
        ->capture_default_str();

    auto* trend = app.add_subcommand("trend-test", "trend tests on a dataset");
    add_out(trend);
    o.data.add_to(trend);
    trend
        ->add_option("--method", o.method,
                     "laplace | military-handbook | anderson-darling | combined-laplace | "
                     "combined-military-handbook | lewis-robinson | mann | mann-pooled")
        ->required();
    trend->add_option("--resample", o.resample,
                      "renewal-null recalibration replicates (per-system methods)");
    add_seed(trend, false);

    auto* diagnose =
        app.add_subcommand("diagnose", "mean cumulative function and total time on test");
    add_out(diagnose);
    o.data.add_to(diagnose);

    auto* residuals =
        app.add_subcommand("residuals", "fit a family and check time-change residuals");
    add_out(residuals);
    o.data.add_to(residuals);
    o.model.add_to(residuals);

    auto add_cr = [&](CLI::App* cmd) {
        cmd->add_option("--family", o.family,
                        "type-specific intensities, e.g. 'family=independent "
                        "marginals=weibull:s=2,scale=1;exponential:scale=2'")
            ->required();
        cmd->add_option("--policy", o.policy,
                        "vector repair policy: perfect-all | minimal-all | partial-repair "
                        "| agered-full:rho=... | agered-incr:rho=... | equal-age:rho=...")
            ->required();
        cmd->add_option("--labels", o.labels, "component labels, comma separated")
            ->required();
    };

    auto* cr_sim = app.add_subcommand("cr-simulate", "draw a marked multi-type dataset");
    add_out(cr_sim);
    add_cr(cr_sim);
    cr_sim->add_option("--systems", o.systems, "number of systems")->required();
    cr_sim->add_option("--tau", o.tau, "censoring time per system")->required();
    add_seed(cr_sim, true);

    auto* cr_ll = app.add_subcommand("cr-loglik", "marked-process log-likelihood");
    add_out(cr_ll);
    o.data.add_to(cr_ll);
    add_cr(cr_ll);
    cr_ll->add_option("--frailty-variances", o.frailty_variances,
                      "per-component gamma frailty variances, comma separated (0 = none)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) return run_simulate(app, o);
        if (fit->parsed()) return run_fit(app, o);
        if (cube->parsed()) return run_cube(app, o);
        if (trend->parsed()) return run_trend_test(app, o);
        if (diagnose->parsed()) return run_diagnose(app, o);
        if (residuals->parsed()) return run_residuals(app, o);
        if (cr_sim->parsed()) return run_cr_simulate(app, o);
        if (cr_ll->parsed()) return run_cr_loglik(app, o);
        return 1;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
