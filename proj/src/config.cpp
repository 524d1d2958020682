#include "nemytskii/config.hpp"

#include "nemytskii/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

namespace nemytskii {

namespace {

enum class Kind { real, integer, choice, real_list, bandwidth };

struct KeySpec {
    Kind kind;
    std::string fallback;
    std::vector<std::string> choices = {};
    /// Returns an error message for an out-of-range value.
    std::function<std::optional<std::string>(const ParamValue&)> check = {};
};

std::optional<std::string> positive(const ParamValue& v, const char* key) {
    const double x = std::holds_alternative<double>(v) ? std::get<double>(v)
                                                       : static_cast<double>(std::get<std::int64_t>(v));
    if (!(x > 0.0)) {
        return std::string(key) + " must be positive";
    }
    return std::nullopt;
}

auto positive_check(const char* key) {
    return [key](const ParamValue& v) { return positive(v, key); };
}

const std::map<std::string, KeySpec>& schema() {
    static const std::map<std::string, KeySpec> s = [] {
        std::map<std::string, KeySpec> m;
        m["scenario"] = {Kind::choice, "", scenario_names()};
        m["m"] = {Kind::real, "2", {}, [](const ParamValue& v) -> std::optional<std::string> {
                      if (!(std::get<double>(v) > 1.0)) {
                          return "m must exceed 1 (the diffusivity exponent lies in (1, inf))";
                      }
                      return std::nullopt;
                  }};
        m["zeta"] = {Kind::real, "0", {}, [](const ParamValue& v) -> std::optional<std::string> {
                         const double z = std::get<double>(v);
                         if (!(z >= 0.0 && z <= 1.0)) {
                             return "zeta must lie in [0, 1]";
                         }
                         return std::nullopt;
                     }};
        m["beta_samples"] = {Kind::real_list, ""};
        m["beta_r_max"] = {Kind::real, "1", {}, positive_check("beta_r_max")};
        m["d"] = {Kind::integer, "1", {}, [](const ParamValue& v) -> std::optional<std::string> {
                      const auto d = std::get<std::int64_t>(v);
                      if (d < 1 || d == 2) {
                          return "d must be 1 or at least 3";
                      }
                      return std::nullopt;
                  }};
        m["x0"] = {Kind::real, "0"};
        m["seed"] = {Kind::integer, "0", {}, [](const ParamValue& v) -> std::optional<std::string> {
                         if (std::get<std::int64_t>(v) < 0) {
                             return "seed must be nonnegative";
                         }
                         return std::nullopt;
                     }};
        m["t0"] = {Kind::real, "0.1", {}, positive_check("t0")};
        m["T"] = {Kind::real, "1", {}, positive_check("T")};
        m["times"] = {Kind::real_list, "0.1,1,10"};
        m["profile_points"] = {Kind::integer, "401", {}, positive_check("profile_points")};

        m["lo"] = {Kind::real, "-6"};
        m["hi"] = {Kind::real, "6"};
        m["cells"] = {Kind::integer, "4000", {}, [](const ParamValue& v) -> std::optional<std::string> {
                          if (std::get<std::int64_t>(v) < 16) {
                              return "cells must be at least 16";
                          }
                          return std::nullopt;
                      }};
        m["lambda"] = {Kind::real, "0.001", {}, positive_check("lambda")};
        m["epsilon"] = {Kind::real, "1e-10", {}, [](const ParamValue& v) -> std::optional<std::string> {
                            const double e = std::get<double>(v);
                            if (!(e > 0.0 && e < 1.0)) {
                                return "epsilon must lie in (0, 1)";
                            }
                            return std::nullopt;
                        }};
        m["newton_tol"] = {Kind::real, "1e-12", {}, positive_check("newton_tol")};
        m["boundary"] = {Kind::choice, "zero-flux", {"zero-flux", "dirichlet-zero"}};
        m["trajectory_stride"] = {Kind::integer, "100", {}, positive_check("trajectory_stride")};

        m["drift_E"] = {Kind::choice, "zero", {"zero", "tanh", "dipole"}};
        m["E_strength"] = {Kind::real, "1"};
        m["E_width"] = {Kind::real, "1", {}, positive_check("E_width")};
        m["drift_b"] = {Kind::choice, "zero", {"zero", "constant", "monomial", "clipped-identity"}};
        m["b_value"] = {Kind::real, "1", {}, [](const ParamValue& v) -> std::optional<std::string> {
                            if (!(std::get<double>(v) >= 0.0)) {
                                return "b_value must be nonnegative";
                            }
                            return std::nullopt;
                        }};
        m["b_exponent"] = {Kind::real, "1", {}, positive_check("b_exponent")};
        m["b_saturation"] = {Kind::real, "1", {}, positive_check("b_saturation")};

        m["n_particles"] = {Kind::integer, "100000", {}, [](const ParamValue& v) -> std::optional<std::string> {
                                if (std::get<std::int64_t>(v) < 100) {
                                    return "n_particles must be at least 100";
                                }
                                return std::nullopt;
                            }};
        m["dt"] = {Kind::real, "0.001", {}, positive_check("dt")};
        m["kde"] = {Kind::choice, "epanechnikov", {"epanechnikov", "gaussian"}};
        m["bandwidth"] = {Kind::bandwidth, "silverman"};
        m["snapshot_times"] = {Kind::real_list, ""};
        m["histogram_bins"] = {Kind::integer, "80", {}, positive_check("histogram_bins")};
        m["histogram_lo"] = {Kind::real, "-4"};
        m["histogram_hi"] = {Kind::real, "4"};
        m["domain_bound"] = {Kind::real, "10", {}, positive_check("domain_bound")};
        m["particle_dump_stride"] = {Kind::integer, "100", {}, positive_check("particle_dump_stride")};
        m["particle_dump_count"] = {Kind::integer, "1000", {}, positive_check("particle_dump_count")};

        m["perturbation"] = {Kind::real, "0", {}, [](const ParamValue& v) -> std::optional<std::string> {
                                 if (!(std::get<double>(v) >= 0.0)) {
                                     return "perturbation must be nonnegative";
                                 }
                                 return std::nullopt;
                             }};
        m["coupling_delta"] = {Kind::real, "1e-6", {}, positive_check("coupling_delta")};
        m["coupling_bound"] = {Kind::real, "0.01", {}, positive_check("coupling_bound")};

        m["p_exp"] = {Kind::real, "1", {}, positive_check("p_exp")};
        m["norm_p"] = {Kind::real, "2", {}, [](const ParamValue& v) -> std::optional<std::string> {
                           if (!(std::get<double>(v) >= 1.0)) {
                               return "norm_p must be at least 1";
                           }
                           return std::nullopt;
                       }};
        m["s_values"] = {Kind::real_list, "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,0.95"};
        m["scan_cells"] = {Kind::integer, "4000", {}, positive_check("scan_cells")};
        m["scan_t"] = {Kind::real, "1", {}, positive_check("scan_t")};
        return m;
    }();
    return s;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_real(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::optional<std::int64_t> parse_integer(const std::string& s) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& it : items) {
        out += (out.empty() ? "" : ", ") + it;
    }
    return out;
}

std::optional<ParamValue> parse_value(const KeySpec& spec, const std::string& raw,
                                      std::string& why) {
    switch (spec.kind) {
        case Kind::real:
            if (auto v = parse_real(raw)) {
                return ParamValue{*v};
            }
            why = "expected a real number";
            return std::nullopt;
        case Kind::integer:
            if (auto v = parse_integer(raw)) {
                return ParamValue{*v};
            }
            why = "expected an integer";
            return std::nullopt;
        case Kind::choice:
            if (std::find(spec.choices.begin(), spec.choices.end(), raw) != spec.choices.end()) {
                return ParamValue{raw};
            }
            why = "expected one of: " + join(spec.choices);
            return std::nullopt;
        case Kind::bandwidth:
            if (raw == "silverman") {
                return ParamValue{raw};
            }
            if (auto v = parse_real(raw); v && *v > 0.0) {
                return ParamValue{raw};
            }
            why = "expected 'silverman' or a positive real";
            return std::nullopt;
        case Kind::real_list: {
            std::vector<double> out;
            std::stringstream ss(raw);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto v = parse_real(trim(item));
                if (!v) {
                    why = "expected a comma-separated list of reals";
                    return std::nullopt;
                }
                out.push_back(*v);
            }
            return ParamValue{std::move(out)};
        }
    }
    return std::nullopt;
}

std::string describe_issues(const std::vector<ConfigIssue>& issues) {
    std::string out = "invalid configuration:";
    for (const auto& i : issues) {
        out += "\n  ";
        if (i.line > 0) {
            out += "line " + std::to_string(i.line) + ": ";
        }
        out += i.message;
    }
    return out;
}

}  // namespace

ConfigParseError::ConfigParseError(std::vector<ConfigIssue> issues)
    : ConfigError(describe_issues(issues)), issues_(std::move(issues)) {}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "barenblatt-verify", "fpe-run", "particle-run", "compare",
        "regularity-scan",   "coupling", "hypotheses-check"};
    return names;
}

double Scenario::real(const std::string& key) const {
    const auto& v = params.at(key);
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
        return static_cast<double>(*i);
    }
    return std::get<double>(v);
}

std::int64_t Scenario::integer(const std::string& key) const {
    return std::get<std::int64_t>(params.at(key));
}

const std::string& Scenario::text(const std::string& key) const {
    return std::get<std::string>(params.at(key));
}

const std::vector<double>& Scenario::reals(const std::string& key) const {
    return std::get<std::vector<double>>(params.at(key));
}

std::string Scenario::render(const std::string& key) const {
    const auto& v = params.at(key);
    if (const auto* d = std::get_if<double>(&v)) {
        return format_double(*d);
    }
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
        return std::to_string(*i);
    }
    if (const auto* s = std::get_if<std::string>(&v)) {
        return *s;
    }
    std::string out;
    for (double x : std::get<std::vector<double>>(v)) {
        out += (out.empty() ? "" : ",") + format_double(x);
    }
    return out;
}

Scenario parse_config(std::string_view text) {
    const auto& keys = schema();
    std::vector<ConfigIssue> issues;
    Scenario sc;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const std::string body = trim(line);
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            issues.push_back({line_no, "expected 'key = value', got '" + body + "'"});
            continue;
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string raw = trim(std::string_view(body).substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end()) {
            issues.push_back({line_no, "unknown key '" + key + "'"});
            continue;
        }
        if (sc.given(key)) {
            issues.push_back({line_no, "duplicate key '" + key + "' (first set on line " +
                                           std::to_string(sc.given_on_line[key]) + ")"});
            continue;
        }
        sc.given_on_line[key] = line_no;
        std::string why;
        auto value = parse_value(it->second, raw, why);
        if (!value) {
            if (key == "scenario") {
                issues.push_back({line_no, "unknown scenario '" + raw + "'; allowed: " +
                                               join(scenario_names())});
            } else {
                issues.push_back({line_no, "cannot parse '" + raw + "' for key '" + key + "': " + why});
            }
            continue;
        }
        if (it->second.check) {
            if (auto msg = it->second.check(*value)) {
                issues.push_back({line_no, *msg});
            }
        }
        sc.params[key] = std::move(*value);
    }

    // Defaults for everything not given.
    for (const auto& [key, spec] : keys) {
        if (sc.params.count(key) || sc.given(key)) {
            continue;
        }
        if (key == "scenario") {
            continue;
        }
        std::string why;
        sc.params[key] = *parse_value(spec, spec.fallback, why);
    }

    if (!sc.given("scenario")) {
        issues.push_back({0, "missing required key 'scenario'; allowed: " + join(scenario_names())});
    } else if (sc.params.count("scenario")) {
        sc.name = sc.text("scenario");
    }
    if (!sc.name.empty() && !sc.given("m")) {
        issues.push_back({0, "missing required key 'm' for scenario '" + sc.name + "'"});
    }

    auto line_of = [&](const std::string& key) {
        const auto it = sc.given_on_line.find(key);
        return it == sc.given_on_line.end() ? std::size_t{0} : it->second;
    };
    auto ok = [&](const std::string& key) { return sc.params.count(key) != 0; };

    if (ok("t0") && ok("T") && !(sc.real("t0") < sc.real("T"))) {
        issues.push_back({line_of("T"), "T must exceed t0"});
    }
    if (ok("lo") && ok("hi") && !(sc.real("lo") < sc.real("hi"))) {
        issues.push_back({line_of("hi"), "hi must exceed lo"});
    }
    if (ok("histogram_lo") && ok("histogram_hi") &&
        !(sc.real("histogram_lo") < sc.real("histogram_hi"))) {
        issues.push_back({line_of("histogram_hi"), "histogram_hi must exceed histogram_lo"});
    }
    if (ok("zeta") && ok("m") && sc.real("m") > 1.0 && !(2.0 * sc.real("zeta") < sc.real("m"))) {
        issues.push_back({line_of("zeta"), "zeta must satisfy 2*zeta/m < 1"});
    }
    if (ok("d") && sc.integer("d") != 1 && !sc.name.empty() && sc.name != "barenblatt-verify" &&
        sc.name != "hypotheses-check") {
        issues.push_back({line_of("d"), "scenario '" + sc.name + "' is one-dimensional; d must be 1"});
    }
    if (ok("s_values")) {
        for (double s : sc.reals("s_values")) {
            if (!(s > 0.0 && s < 1.0)) {
                issues.push_back({line_of("s_values"), "every s in s_values must lie in (0, 1)"});
                break;
            }
        }
    }
    if (ok("times")) {
        for (double t : sc.reals("times")) {
            if (!(t > 0.0)) {
                issues.push_back({line_of("times"), "every entry of times must be positive"});
                break;
            }
        }
    }
    if (ok("beta_samples") && !sc.reals("beta_samples").empty() && sc.reals("beta_samples").size() < 4) {
        issues.push_back({line_of("beta_samples"), "beta_samples needs at least 4 values"});
    }

    if (!issues.empty()) {
        std::stable_sort(issues.begin(), issues.end(),
                         [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
        throw ConfigParseError(std::move(issues));
    }
    return sc;
}

Scenario load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace nemytskii
