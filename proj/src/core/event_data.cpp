#include "event_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "common.hpp"

namespace repsys {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, int line_no, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw data_error("line " + std::to_string(line_no) + ": unparseable " + what +
                         " '" + s + "'");
    }
}

} // namespace

std::vector<double> SystemHistory::repair_effects() const {
    std::vector<double> d;
    d.reserve(marks.size());
    for (const auto& m : marks) {
        if (m.rfind("d=", 0) == 0) {
            d.push_back(std::stod(m.substr(2)));
        }
    }
    if (!d.empty() && d.size() != marks.size()) {
        throw data_error("system " + system_id +
                         ": repair-effect marks present on some but not all events");
    }
    return d;
}

void SystemHistory::validate() const {
    if (!(censor_time > 0) || !std::isfinite(censor_time)) {
        throw data_error("system " + system_id + ": censor time must be finite and > 0");
    }
    if (!marks.empty() && marks.size() != times.size()) {
        throw data_error("system " + system_id + ": marks/times length mismatch");
    }
    double prev = 0;
    for (double t : times) {
        if (!(t > 0)) throw data_error("system " + system_id + ": event time <= 0");
        if (!(t > prev)) {
            throw data_error("system " + system_id + ": non-strictly-increasing times");
        }
        if (t > censor_time) {
            throw data_error("system " + system_id + ": event time exceeds censor time");
        }
        prev = t;
    }
}

std::vector<double> interevent_times(const SystemHistory& h) {
    std::vector<double> x;
    x.reserve(h.times.size());
    double prev = 0; // T_0 = 0 convention
    for (double t : h.times) {
        x.push_back(t - prev);
        prev = t;
    }
    return x;
}

std::size_t EventDataset::total_events() const {
    std::size_t n = 0;
    for (const auto& s : systems) n += s.n();
    return n;
}

double EventDataset::max_censor_time() const {
    double m = 0;
    for (const auto& s : systems) m = std::max(m, s.censor_time);
    return m;
}

bool EventDataset::unmarked() const {
    for (const auto& s : systems) {
        for (const auto& m : s.marks) {
            if (m != kDefaultMark) return false;
        }
    }
    return true;
}

void EventDataset::validate() const {
    std::set<std::string> ids;
    std::set<std::string> declared(mark_set.begin(), mark_set.end());
    for (const auto& s : systems) {
        s.validate();
        if (!ids.insert(s.system_id).second) {
            throw data_error("duplicate system_id '" + s.system_id + "'");
        }
        for (const auto& m : s.marks) {
            if (!declared.count(m)) {
                throw data_error("system " + s.system_id + ": mark '" + m +
                                 "' not in declared mark set");
            }
        }
    }
}

SuperposedProcess::SuperposedProcess(const EventDataset& d) {
    struct Ev {
        double t;
        std::string id;
    };
    std::vector<Ev> evs;
    for (const auto& s : d.systems) {
        for (double t : s.times) evs.push_back({t, s.system_id});
        censor_times_.push_back(s.censor_time);
    }
    std::sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) {
        return a.t != b.t ? a.t < b.t : a.id < b.id;
    });
    for (auto& e : evs) {
        times_.push_back(e.t);
        ids_.push_back(std::move(e.id));
    }
    std::sort(censor_times_.begin(), censor_times_.end());
    horizon_ = censor_times_.empty() ? 0 : censor_times_.back();
}

int SuperposedProcess::at_risk(double t) const {
    // y(t) = #{i : tau_i >= t}
    auto it = std::lower_bound(censor_times_.begin(), censor_times_.end(), t);
    return static_cast<int>(censor_times_.end() - it);
}

double SuperposedProcess::total_time_on_test(double t) const {
    double r = 0;
    double prev = 0;
    for (double tau : censor_times_) {
        double seg_end = std::min(tau, t);
        if (seg_end <= prev) break;
        // all censor times >= tau are still at risk over (prev, seg_end]
        r += (seg_end - prev) * static_cast<double>(at_risk(seg_end));
        prev = seg_end;
    }
    return r;
}

EventDataset parse_dataset(std::istream& events_csv, std::istream* windows_csv,
                           std::optional<double> tau, std::istream* covariates_csv) {
    if ((windows_csv == nullptr) == !tau.has_value()) {
        throw usage_error("provide exactly one of a windows file or a global tau");
    }

    struct Row {
        double t;
        std::string mark;
    };
    std::map<std::string, std::vector<Row>> rows;
    std::vector<std::string> order;
    std::string line;
    int line_no = 0;
    bool header = true;
    while (std::getline(events_csv, line)) {
        ++line_no;
        line = strip(line);
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto f = split_csv_line(line);
        if (f.size() < 2 || f.size() > 3) {
            throw data_error("line " + std::to_string(line_no) +
                             ": expected system_id,time[,mark]");
        }
        std::string id = strip(f[0]);
        if (id.empty()) throw data_error("line " + std::to_string(line_no) + ": empty system_id");
        double t = parse_number(strip(f[1]), line_no, "time");
        std::string mark = f.size() == 3 ? strip(f[2]) : "";
        if (mark.empty()) mark = kDefaultMark;
        if (!rows.count(id)) order.push_back(id);
        rows[id].push_back({t, std::move(mark)});
    }

    std::map<std::string, double> windows;
    if (windows_csv) {
        line_no = 0;
        header = true;
        while (std::getline(*windows_csv, line)) {
            ++line_no;
            line = strip(line);
            if (line.empty()) continue;
            if (header) {
                header = false;
                continue;
            }
            auto f = split_csv_line(line);
            if (f.size() != 2) {
                throw data_error("windows line " + std::to_string(line_no) +
                                 ": expected system_id,censor_time");
            }
            std::string id = strip(f[0]);
            double w = parse_number(strip(f[1]), line_no, "censor_time");
            windows[id] = w;
            if (!rows.count(id)) {
                rows[id]; // censored-only system, n = 0
                order.push_back(id);
            }
        }
    }

    std::map<std::string, std::vector<double>> covs;
    if (covariates_csv) {
        line_no = 0;
        header = true;
        while (std::getline(*covariates_csv, line)) {
            ++line_no;
            line = strip(line);
            if (line.empty()) continue;
            if (header) {
                header = false;
                continue;
            }
            auto f = split_csv_line(line);
            if (f.size() < 2) {
                throw data_error("covariates line " + std::to_string(line_no) +
                                 ": expected system_id,z1,...");
            }
            std::vector<double> z;
            for (std::size_t i = 1; i < f.size(); ++i) {
                z.push_back(parse_number(strip(f[i]), line_no, "covariate"));
            }
            covs[strip(f[0])] = std::move(z);
        }
    }

    EventDataset d;
    std::set<std::string> marks_seen;
    for (const auto& id : order) {
        SystemHistory h;
        h.system_id = id;
        if (tau) {
            h.censor_time = *tau;
        } else {
            auto it = windows.find(id);
            if (it == windows.end()) {
                throw data_error("missing censor time for system '" + id + "'");
            }
            h.censor_time = it->second;
        }
        auto& rs = rows[id];
        std::stable_sort(rs.begin(), rs.end(),
                         [](const Row& a, const Row& b) { return a.t < b.t; });
        for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
            if (rs[i].t == rs[i + 1].t) {
                throw data_error("system " + id + ": duplicate event time " +
                                 std::to_string(rs[i].t));
            }
        }
        for (auto& r : rs) {
            h.times.push_back(r.t);
            h.marks.push_back(std::move(r.mark));
            marks_seen.insert(h.marks.back());
        }
        if (auto it = covs.find(id); it != covs.end()) h.covariates = it->second;
        h.validate();
        d.systems.push_back(std::move(h));
    }
    d.mark_set.assign(marks_seen.begin(), marks_seen.end());
    if (d.mark_set.empty()) d.mark_set.push_back(kDefaultMark);
    d.validate();
    return d;
}

EventDataset load_dataset(const std::string& events_path, const std::string& windows_path,
                          std::optional<double> tau, const std::string& covariates_path) {
    std::ifstream ev(events_path);
    if (!ev) throw data_error("cannot open events file '" + events_path + "'");
    std::ifstream win;
    if (!windows_path.empty()) {
        win.open(windows_path);
        if (!win) throw data_error("cannot open windows file '" + windows_path + "'");
    }
    std::ifstream cov;
    if (!covariates_path.empty()) {
        cov.open(covariates_path);
        if (!cov) throw data_error("cannot open covariates file '" + covariates_path + "'");
    }
    return parse_dataset(ev, windows_path.empty() ? nullptr : &win, tau,
                         covariates_path.empty() ? nullptr : &cov);
}

void write_dataset_csv(const EventDataset& d, std::ostream& out) {
    out << "system_id,time,mark\n";
    out.precision(17);
    for (const auto& s : d.systems) {
        for (std::size_t i = 0; i < s.times.size(); ++i) {
            out << s.system_id << ',' << s.times[i] << ','
                << (i < s.marks.size() ? s.marks[i] : kDefaultMark) << '\n';
        }
    }
}

void write_windows_csv(const EventDataset& d, std::ostream& out) {
    out << "system_id,censor_time\n";
    out.precision(17);
    for (const auto& s : d.systems) out << s.system_id << ',' << s.censor_time << '\n';
}

} // namespace repsys
