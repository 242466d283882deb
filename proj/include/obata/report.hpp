#pragma once

// Verification reports: named checks (value, tolerance, pass) plus free-form
// data, serialized to JSON or RFC-4180 CSV.

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace obata {

struct Check {
    std::string name;
    double value = 0;
    double tolerance = 0;
    bool pass = false;
};

/// Passes iff value <= tolerance (NaN fails).
Check check_le(const std::string& name, double value, double tolerance);
/// Boolean check recorded as value 0 (true) or 1 (false) against tolerance 0.
Check check_true(const std::string& name, bool ok);

struct Report {
    std::string command;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    std::vector<Check> checks;
    nlohmann::ordered_json data = nlohmann::ordered_json::object();

    void add(Check c) { checks.push_back(std::move(c)); }
    void append(const Report& other);
    bool passed() const;
    const Check* first_failure() const;
    nlohmann::ordered_json to_json() const;
};

/// Shortest round-trip decimal form of x ("inf", "-inf", "nan" for non-finite values).
std::string format_number(double x);

/// Quotes a field when it holds a comma, quote, CR or LF.
std::string csv_quote(const std::string& field);

struct CsvTable {
    std::vector<std::string> comments;  // written as "# ..." lines before the header
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const;
};

/// Checks as CSV rows (name, value, tolerance, pass).
CsvTable checks_table(const Report& report);

}  // namespace obata
