#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace repsys {

// One system's observed recurrence history on (0, tau].
struct SystemHistory {
    std::string system_id;
    std::vector<double> times;         // strictly increasing, 0 < T_1 < ... <= tau
    std::vector<std::string> marks;    // same length as times (default mark "event")
    double censor_time = 0;            // tau
    std::vector<double> covariates;    // optional fixed covariate vector Z

    // Repair-effect draws D_i attached to events (virtual-age models); parsed
    // from marks of the form "d=<value>".
    std::vector<double> repair_effects() const;

    std::size_t n() const { return times.size(); }
    void validate() const;
};

std::vector<double> interevent_times(const SystemHistory& h);

struct EventDataset {
    std::vector<SystemHistory> systems;
    std::vector<std::string> mark_set;

    std::size_t total_events() const;
    double max_censor_time() const;
    bool unmarked() const;
    void validate() const;
};

// Pooled process across systems, with at-risk count y(t) and TTT r(t).
class SuperposedProcess {
  public:
    explicit SuperposedProcess(const EventDataset& d);

    // Pooled event times, ascending; ties across systems broken by system_id.
    const std::vector<double>& pooled_times() const { return times_; }
    const std::vector<std::string>& pooled_system_ids() const { return ids_; }

    int at_risk(double t) const;          // y(t) = #{i : tau_i >= t}
    double total_time_on_test(double t) const; // r(t) = int_0^t y(u) du
    double horizon() const { return horizon_; } // max tau_i

  private:
    std::vector<double> times_;
    std::vector<std::string> ids_;
    std::vector<double> censor_times_; // sorted ascending
    double horizon_ = 0;
};

constexpr const char* kDefaultMark = "event";

// CSV ingestion per the documented file formats. Exactly one of windows_csv /
// tau must be provided. Streams are header-first comma-separated text.
EventDataset parse_dataset(std::istream& events_csv,
                           std::istream* windows_csv,
                           std::optional<double> tau,
                           std::istream* covariates_csv = nullptr);

EventDataset load_dataset(const std::string& events_path,
                          const std::string& windows_path, // "" if none
                          std::optional<double> tau,
                          const std::string& covariates_path = "");

void write_dataset_csv(const EventDataset& d, std::ostream& events_out);
void write_windows_csv(const EventDataset& d, std::ostream& windows_out);

} // namespace repsys
