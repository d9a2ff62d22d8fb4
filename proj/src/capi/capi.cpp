#include "repsys.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/common.hpp"
#include "core/competing_risks.hpp"
#include "core/diagnostics.hpp"
#include "core/event_data.hpp"
#include "core/fitting.hpp"
#include "core/intensity.hpp"
#include "core/likelihood.hpp"
#include "core/simulation.hpp"
#include "core/trend_tests.hpp"

using json = nlohmann::json;

struct rs_dataset {
    repsys::EventDataset d;
};

struct rs_model {
    repsys::ModelSpec spec;
};

namespace {

thread_local int g_error_kind = 0;
thread_local std::string g_error_message;

void clear_error() {
    g_error_kind = 0;
    g_error_message.clear();
}

int record_error() {
    try {
        throw;
    } catch (const repsys::Error& e) {
        g_error_kind = static_cast<int>(e.kind());
        g_error_message = e.what();
    } catch (const std::exception& e) {
        g_error_kind = 3;
        g_error_message = e.what();
    } catch (...) {
        g_error_kind = 3;
        g_error_message = "unknown failure";
    }
    return g_error_kind;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename F>
char* guarded_string(F&& f) {
    clear_error();
    try {
        return dup_string(f());
    } catch (...) {
        record_error();
        return nullptr;
    }
}

template <typename F>
rs_dataset* guarded_dataset(F&& f) {
    clear_error();
    try {
        return new rs_dataset{f()};
    } catch (...) {
        record_error();
        return nullptr;
    }
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw repsys::usage_error(msg);
}

json to_json(const repsys::LogLikReport& r, const repsys::EventDataset& d) {
    json per = json::array();
    for (std::size_t i = 0; i < r.per_system.size(); ++i) {
        per.push_back({{"system", d.systems[i].system_id}, {"loglik", r.per_system[i]}});
    }
    json out = {{"total", r.total}, {"method", r.method}, {"per_system", per}};
    if (r.node_count > 0) out["nodes"] = r.node_count;
    return out;
}

json to_json(const repsys::FitResult& f) {
    json est = json::array();
    for (const auto& [name, value] : f.estimates) {
        est.push_back({{"name", name}, {"value", value}});
    }
    return {{"spec", repsys::format_model_spec(f.spec)},
            {"estimates", est},
            {"loglik", f.loglik},
            {"converged", f.converged},
            {"iterations", f.iterations},
            {"boundary", f.boundary_flags}};
}

json to_json(const repsys::TrendTestResult& t) {
    return {{"method", t.method},
            {"null", t.null_label},
            {"statistic", t.statistic},
            {"p", t.p_value},
            {"one_sided", t.one_sided},
            {"calibration", t.calibration}};
}

std::string plot_csv(const repsys::StepFunctionPlot& p) {
    std::ostringstream out;
    repsys::write_plot_csv(p, out);
    return out.str();
}

// Inverse of write_plot_csv, accepting "# note" comments and either a
// t,value[,variance] step header or an x,y piecewise-linear header.
repsys::StepFunctionPlot parse_plot_csv(const std::string& text) {
    repsys::StepFunctionPlot p;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    bool have_variance = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string note = line.substr(1);
            if (!note.empty() && note.front() == ' ') note.erase(0, 1);
            p.note = note;
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (!have_header) {
            require(fields.size() >= 2, "plot csv: malformed header '" + line + "'");
            if (fields[0] == "x") {
                p.kind = repsys::StepFunctionPlot::Kind::PiecewiseLinear;
            } else if (fields[0] == "t") {
                p.kind = repsys::StepFunctionPlot::Kind::RightContinuousStep;
            } else {
                throw repsys::data_error("plot csv: unknown abscissa '" + fields[0] + "'");
            }
            have_variance = fields.size() > 2 && fields[2] == "variance";
            have_header = true;
            continue;
        }
        require(fields.size() >= 2, "plot csv: malformed row '" + line + "'");
        try {
            p.t.push_back(std::stod(fields[0]));
            p.value.push_back(std::stod(fields[1]));
            if (have_variance && fields.size() > 2) p.variance.push_back(std::stod(fields[2]));
        } catch (const std::exception&) {
            throw repsys::data_error("plot csv: bad number in row '" + line + "'");
        }
    }
    require(have_header, "plot csv: empty input");
    return p;
}

std::vector<double> parse_double_csv(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string piece;
    while (std::getline(in, piece, ',')) {
        try {
            out.push_back(std::stod(piece));
        } catch (const std::exception&) {
            throw repsys::usage_error(what + ": bad number '" + piece + "'");
        }
    }
    return out;
}

} // namespace

extern "C" {

int rs_last_error_kind(void) { return g_error_kind; }

const char* rs_last_error_message(void) { return g_error_message.c_str(); }

void rs_string_free(char* s) { std::free(s); }

rs_dataset* rs_dataset_load(const char* events_path, const char* windows_path,
                            double tau, const char* covariates_path) {
    return guarded_dataset([&] {
        require(events_path != nullptr, "dataset load: events path required");
        std::optional<double> tau_opt;
        if (tau > 0) tau_opt = tau;
        return repsys::load_dataset(events_path, windows_path ? windows_path : "",
                                    tau_opt, covariates_path ? covariates_path : "");
    });
}

rs_dataset* rs_dataset_from_csv(const char* events_csv, const char* windows_csv,
                                double tau) {
    return guarded_dataset([&] {
        require(events_csv != nullptr, "dataset: events csv required");
        std::istringstream events(events_csv);
        std::optional<std::istringstream> windows;
        if (windows_csv) windows.emplace(windows_csv);
        std::optional<double> tau_opt;
        if (tau > 0) tau_opt = tau;
        return repsys::parse_dataset(events, windows ? &*windows : nullptr, tau_opt);
    });
}

void rs_dataset_free(rs_dataset* d) { delete d; }

int rs_dataset_system_count(const rs_dataset* d) {
    return d ? static_cast<int>(d->d.systems.size()) : 0;
}

int rs_dataset_total_events(const rs_dataset* d) {
    return d ? static_cast<int>(d->d.total_events()) : 0;
}

char* rs_dataset_events_csv(const rs_dataset* d) {
    return guarded_string([&] {
        require(d != nullptr, "events csv: null dataset");
        std::ostringstream out;
        repsys::write_dataset_csv(d->d, out);
        return out.str();
    });
}

char* rs_dataset_windows_csv(const rs_dataset* d) {
    return guarded_string([&] {
        require(d != nullptr, "windows csv: null dataset");
        std::ostringstream out;
        repsys::write_windows_csv(d->d, out);
        return out.str();
    });
}

rs_model* rs_model_parse(const char* text) {
    clear_error();
    try {
        require(text != nullptr, "model parse: null text");
        return new rs_model{repsys::parse_model_spec(text)};
    } catch (...) {
        record_error();
        return nullptr;
    }
}

char* rs_model_format(const rs_model* m) {
    return guarded_string([&] {
        require(m != nullptr, "model format: null model");
        return repsys::format_model_spec(m->spec);
    });
}

void rs_model_free(rs_model* m) { delete m; }

int rs_loglik(const rs_model* m, const rs_dataset* d, double* out_total) {
    clear_error();
    try {
        require(m != nullptr && d != nullptr && out_total != nullptr,
                "loglik: null argument");
        *out_total = repsys::loglik(m->spec, d->d).total;
        return 0;
    } catch (...) {
        return record_error();
    }
}

char* rs_loglik_json(const rs_model* m, const rs_dataset* d) {
    return guarded_string([&] {
        require(m != nullptr && d != nullptr, "loglik: null argument");
        return to_json(repsys::loglik(m->spec, d->d), d->d).dump(2);
    });
}

char* rs_fit_json(const rs_model* templ, const rs_dataset* d) {
    return guarded_string([&] {
        require(templ != nullptr && d != nullptr, "fit: null argument");
        return to_json(repsys::fit(templ->spec, d->d)).dump(2);
    });
}

namespace {

json cube_json(const repsys::CubeReport& report) {
    json corners = json::array();
    for (const auto c : repsys::kCubeCorners) {
        json one = to_json(report.at(c));
        one["corner"] = repsys::corner_name(c);
        corners.push_back(std::move(one));
    }
    json edges = json::array();
    for (const auto& [from, to, lr] : report.edges) {
        edges.push_back({{"from", repsys::corner_name(from)},
                         {"to", repsys::corner_name(to)},
                         {"statistic", lr.statistic},
                         {"df", lr.df},
                         {"p_naive", lr.p_naive},
                         {"p_boundary", lr.p_boundary}});
    }
    return {{"corners", corners},
            {"edges", edges},
            {"rendered", repsys::render_cube(report)}};
}

} // namespace

char* rs_fit_cube_json(const rs_dataset* d) {
    return guarded_string([&] {
        require(d != nullptr, "cube fit: null dataset");
        return cube_json(repsys::fit_cube(d->d)).dump(2);
    });
}

char* rs_fit_cube_text(const rs_dataset* d) {
    return guarded_string([&] {
        require(d != nullptr, "cube fit: null dataset");
        return repsys::render_cube(repsys::fit_cube(d->d));
    });
}

rs_dataset* rs_simulate(const rs_model* m, int systems, double tau, uint64_t seed) {
    return guarded_dataset([&] {
        require(m != nullptr, "simulate: null model");
        require(systems > 0, "simulate: system count must be positive");
        require(tau > 0, "simulate: censoring time must be positive");
        repsys::SimulationPlan plan;
        plan.spec = m->spec;
        plan.system_count = systems;
        plan.censor_times = {tau};
        plan.seed = seed;
        return repsys::simulate(plan);
    });
}

char* rs_trend_test_json(const rs_dataset* d, const char* method, int resample_b,
                         uint64_t seed) {
    return guarded_string([&] {
        require(d != nullptr && method != nullptr, "trend test: null argument");
        const std::string name = method;
        repsys::PerSystemTest per;
        if (name == "laplace") per = repsys::laplace;
        else if (name == "military-handbook") per = repsys::military_handbook;
        else if (name == "lewis-robinson") per = repsys::lewis_robinson;
        else if (name == "mann") per = repsys::mann;

        json results = json::array();
        if (per) {
            if (resample_b > 0) {
                results.push_back(
                    to_json(repsys::resampled_null(per, d->d, resample_b, seed)));
            } else {
                for (const auto& s : d->d.systems) {
                    json one = to_json(per(s));
                    one["system"] = s.system_id;
                    results.push_back(std::move(one));
                }
            }
            return json{{"results", results}}.dump(2);
        }
        require(resample_b <= 0,
                "trend test: resampling applies to per-system methods only");
        if (name == "anderson-darling") {
            results.push_back(
                to_json(repsys::anderson_darling_uniform(repsys::ttt_transform(d->d))));
        } else if (name == "combined-laplace") {
            results.push_back(to_json(repsys::combined_laplace(d->d)));
        } else if (name == "combined-military-handbook") {
            results.push_back(to_json(repsys::combined_military_handbook(d->d)));
        } else if (name == "mann-pooled") {
            results.push_back(to_json(repsys::mann_pooled(d->d)));
        } else {
            throw repsys::usage_error("trend test: unknown method '" + name + "'");
        }
        return json{{"results", results}}.dump(2);
    });
}

char* rs_nelson_aalen_csv(const rs_dataset* d) {
    return guarded_string([&] {
        require(d != nullptr, "mean cumulative function: null dataset");
        return plot_csv(repsys::nelson_aalen(d->d));
    });
}

char* rs_ttt_plot_csv(const rs_dataset* d) {
    return guarded_string([&] {
        require(d != nullptr, "total time on test plot: null dataset");
        return plot_csv(repsys::ttt_plot(d->d));
    });
}

char* rs_plot_svg(const char* plot_csv_text, const char* title) {
    return guarded_string([&] {
        require(plot_csv_text != nullptr, "plot svg: null csv");
        const auto plot = parse_plot_csv(plot_csv_text);
        std::ostringstream out;
        repsys::write_plot_svg(plot, out, title ? title : "");
        return out.str();
    });
}

char* rs_residuals_json(const rs_model* templ, const rs_dataset* d) {
    return guarded_string([&] {
        require(templ != nullptr && d != nullptr, "residuals: null argument");
        const auto fit = repsys::fit(templ->spec, d->d);
        const auto rep = repsys::cox_snell_residuals(fit, d->d);
        json increments = json::array();
        for (std::size_t i = 0; i < rep.increments.size(); ++i) {
            increments.push_back({{"system", d->d.systems[i].system_id},
                                  {"values", rep.increments[i]},
                                  {"posterior_frailty", rep.posterior_frailty[i]}});
        }
        json out = {{"fit", to_json(fit)},
                    {"increments", increments},
                    {"exponentiality", to_json(rep.exponentiality)},
                    {"residual_trend", to_json(rep.residual_trend)},
                    {"lag1_autocorrelation", rep.lag1_autocorrelation},
                    {"lag1_p", rep.lag1_p}};
        return out.dump(2);
    });
}

rs_dataset* rs_cr_simulate(const char* family, const char* policy, const char* labels,
                           int systems, double tau, uint64_t seed) {
    return guarded_dataset([&] {
        require(family != nullptr && policy != nullptr && labels != nullptr,
                "marked simulate: null argument");
        require(systems > 0, "marked simulate: system count must be positive");
        require(tau > 0, "marked simulate: censoring time must be positive");
        const auto fam = repsys::parse_intensity_family(family);
        const auto pol = repsys::parse_multi_policy(policy);
        const auto comp = repsys::parse_component_labels(labels);
        require(comp.size() == fam.components(),
                "marked simulate: label count must match component count");
        repsys::EventDataset out;
        const int width = systems > 99 ? 4 : 2;
        for (int i = 0; i < systems; ++i) {
            auto h = repsys::simulate_marked(pol, fam, comp, tau, seed,
                                             static_cast<std::uint64_t>(i));
            char id[32];
            std::snprintf(id, sizeof(id), "s%0*d", width, i + 1);
            h.system_id = id;
            out.systems.push_back(std::move(h));
        }
        out.mark_set = comp.labels;
        out.validate();
        return out;
    });
}

char* rs_cr_loglik_json(const char* family, const char* policy, const char* labels,
                        const rs_dataset* d, const char* frailty_variances) {
    return guarded_string([&] {
        require(family != nullptr && policy != nullptr && labels != nullptr &&
                    d != nullptr,
                "marked loglik: null argument");
        const auto fam = repsys::parse_intensity_family(family);
        const auto pol = repsys::parse_multi_policy(policy);
        const auto comp = repsys::parse_component_labels(labels);
        require(comp.size() == fam.components(),
                "marked loglik: label count must match component count");
        repsys::LogLikReport rep;
        if (frailty_variances && frailty_variances[0] != '\0') {
            const auto deltas =
                parse_double_csv(frailty_variances, "marked loglik frailty variances");
            rep = repsys::marked_loglik_frailty(pol, fam, comp, d->d, deltas);
        } else {
            rep = repsys::marked_loglik(pol, fam, comp, d->d);
        }
        return to_json(rep, d->d).dump(2);
    });
}

} // extern "C"
