#include "obata/report.hpp"

#include "obata/common.hpp"

#include <charconv>
#include <cmath>

namespace obata {

Check check_le(const std::string& name, double value, double tolerance) {
    return {name, value, tolerance, value <= tolerance};
}

Check check_true(const std::string& name, bool ok) { return {name, ok ? 0.0 : 1.0, 0.0, ok}; }

void Report::append(const Report& other) {
    for (const auto& c : other.checks) {
        Check copy = c;
        copy.name = other.command + "." + c.name;
        checks.push_back(copy);
    }
}

bool Report::passed() const { return first_failure() == nullptr; }

const Check* Report::first_failure() const {
    for (const auto& c : checks)
        if (!c.pass) return &c;
    return nullptr;
}

namespace {

nlohmann::ordered_json number_json(double x) {
    if (std::isfinite(x)) return x;
    return format_number(x);
}

}  // namespace

nlohmann::ordered_json Report::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["pass"] = passed();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["value"] = number_json(c.value);
        e["tolerance"] = number_json(c.tolerance);
        e["pass"] = c.pass;
        arr.push_back(e);
    }
    j["checks"] = arr;
    j["data"] = data;
    return j;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string CsvTable::str() const {
    std::string out;
    for (const auto& c : comments) out += "# " + c + "\r\n";
    auto line = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            out += csv_quote(fields[i]);
        }
        out += "\r\n";
    };
    line(header);
    for (const auto& r : rows) {
        require(r.size() == header.size(), "CSV row width does not match the header");
        line(r);
    }
    return out;
}

CsvTable checks_table(const Report& report) {
    CsvTable t;
    t.header = {"name", "value", "tolerance", "pass"};
    for (const auto& c : report.checks)
        t.rows.push_back({c.name, format_number(c.value), format_number(c.tolerance), c.pass ? "true" : "false"});
    return t;
}

}  // namespace obata
