#pragma once

// DiagnosticsReport: one NDJSON record per line. A header echoes the
// scenario and configuration, each check carries an explicit pass flag, and
// a summary closes the file.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace nemytskii {

struct CheckRecord {
    std::string check_id;
    /// "abs_diff_le": |achieved - target| <= tolerance
    /// "le":          achieved <= target + tolerance
    /// "ge":          achieved >= target - tolerance
    /// "eq":          achieved == target exactly
    std::string relation;
    double target = 0.0;
    double achieved = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    /// Advisory checks are reported but do not affect the exit status.
    bool advisory = false;
    std::string note;
};

class DiagnosticsReport {
public:
    DiagnosticsReport(std::string scenario, std::vector<std::pair<std::string, std::string>> config);

    const CheckRecord& near(std::string id, double target, double achieved, double tolerance);
    const CheckRecord& at_most(std::string id, double achieved, double bound, double tolerance = 0.0);
    const CheckRecord& at_least(std::string id, double achieved, double bound, double tolerance = 0.0);
    const CheckRecord& exactly(std::string id, double achieved, double target);
    const CheckRecord& add(CheckRecord record);

    /// Extra data rows (coupling time series, scan tables) keyed by `kind`.
    void add_row(std::string kind, std::vector<std::pair<std::string, double>> fields);

    void set_error(std::string message) { error_ = std::move(message); }

    const std::vector<CheckRecord>& checks() const noexcept { return checks_; }
    bool all_passed() const;

    /// Writes header, data rows, checks and the summary.
    void write(std::ostream& out, double wall_time) const;

private:
    std::string scenario_;
    std::vector<std::pair<std::string, std::string>> config_;
    std::vector<CheckRecord> checks_;
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, double>>>> rows_;
    std::string error_;
};

}  // namespace nemytskii
