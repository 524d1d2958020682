#pragma once

// Flat `key = value` scenario files with `#` comments.

#include "nemytskii/error.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nemytskii {

using ParamValue = std::variant<double, std::int64_t, std::string, std::vector<double>>;

struct Scenario {
    std::string name;
    /// Every schema key, with defaults filled in for keys not given.
    std::map<std::string, ParamValue> params;
    /// Keys that appeared in the file.
    std::map<std::string, std::size_t> given_on_line;

    double real(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    const std::vector<double>& reals(const std::string& key) const;
    bool given(const std::string& key) const { return given_on_line.count(key) != 0; }

    /// Canonical `key = value` rendering of a parameter.
    std::string render(const std::string& key) const;
};

struct ConfigIssue {
    std::size_t line = 0;  ///< 0 when the issue is not tied to a line
    std::string message;
};

/// Carries every problem found, not only the first.
class ConfigParseError : public ConfigError {
public:
    explicit ConfigParseError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

const std::vector<std::string>& scenario_names();

/// Throws ConfigParseError listing all problems.
Scenario parse_config(std::string_view text);
Scenario load_config(const std::string& path);

}  // namespace nemytskii
