#include "nemytskii/report.hpp"

#include <json.hpp>

#include <cmath>
#include <ostream>

namespace nemytskii {

using nlohmann::ordered_json;

DiagnosticsReport::DiagnosticsReport(std::string scenario,
                                     std::vector<std::pair<std::string, std::string>> config)
    : scenario_(std::move(scenario)), config_(std::move(config)) {}

const CheckRecord& DiagnosticsReport::near(std::string id, double target, double achieved,
                                           double tolerance) {
    return add({std::move(id), "abs_diff_le", target, achieved, tolerance,
                std::abs(achieved - target) <= tolerance, false, {}});
}

const CheckRecord& DiagnosticsReport::at_most(std::string id, double achieved, double bound,
                                              double tolerance) {
    return add({std::move(id), "le", bound, achieved, tolerance, achieved <= bound + tolerance, false, {}});
}

const CheckRecord& DiagnosticsReport::at_least(std::string id, double achieved, double bound,
                                               double tolerance) {
    return add({std::move(id), "ge", bound, achieved, tolerance, achieved >= bound - tolerance, false, {}});
}

const CheckRecord& DiagnosticsReport::exactly(std::string id, double achieved, double target) {
    return add({std::move(id), "eq", target, achieved, 0.0, achieved == target, false, {}});
}

const CheckRecord& DiagnosticsReport::add(CheckRecord record) {
    // NaN never passes.
    if (std::isnan(record.achieved)) {
        record.pass = false;
    }
    checks_.push_back(std::move(record));
    return checks_.back();
}

void DiagnosticsReport::add_row(std::string kind, std::vector<std::pair<std::string, double>> fields) {
    rows_.emplace_back(std::move(kind), std::move(fields));
}

bool DiagnosticsReport::all_passed() const {
    if (!error_.empty()) {
        return false;
    }
    for (const auto& c : checks_) {
        if (!c.pass && !c.advisory) {
            return false;
        }
    }
    return true;
}

void DiagnosticsReport::write(std::ostream& out, double wall_time) const {
    ordered_json header;
    header["record"] = "header";
    header["scenario"] = scenario_;
    ordered_json cfg = ordered_json::object();
    for (const auto& [k, v] : config_) {
        cfg[k] = v;
    }
    header["config"] = cfg;
    out << header.dump() << '\n';

    for (const auto& [kind, fields] : rows_) {
        ordered_json row;
        row["record"] = kind;
        for (const auto& [k, v] : fields) {
            row[k] = v;
        }
        out << row.dump() << '\n';
    }

    std::size_t failed = 0;
    for (const auto& c : checks_) {
        ordered_json j;
        j["record"] = "check";
        j["check_id"] = c.check_id;
        j["relation"] = c.relation;
        j["target"] = c.target;
        j["achieved"] = c.achieved;
        j["tolerance"] = c.tolerance;
        j["pass"] = c.pass;
        if (c.advisory) {
            j["advisory"] = true;
        }
        if (!c.note.empty()) {
            j["note"] = c.note;
        }
        out << j.dump() << '\n';
        if (!c.pass && !c.advisory) {
            ++failed;
        }
    }

    if (!error_.empty()) {
        ordered_json e;
        e["record"] = "error";
        e["message"] = error_;
        e["pass"] = false;
        out << e.dump() << '\n';
    }

    ordered_json summary;
    summary["record"] = "summary";
    summary["scenario"] = scenario_;
    summary["checks"] = checks_.size();
    summary["failed"] = failed;
    summary["pass"] = all_passed();
    summary["wall_time"] = wall_time;
    out << summary.dump() << '\n';
}

}  // namespace nemytskii
