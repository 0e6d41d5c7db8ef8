#include "wiso/report.hpp"

#include <cmath>
#include <cstdio>

#include "wiso/core.hpp"

namespace wiso {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void Table::add_row(std::vector<double> row) {
    if (row.size() != columns.size())
        throw ArgumentError("table '" + name + "': row has " + std::to_string(row.size()) +
                            " entries, expected " + std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out += ',';
        out += columns[c];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

void ExperimentReport::add_scalar(const std::string& name, double value,
                                  std::optional<double> error) {
    for (auto& s : scalars_) {
        if (s.name == name) {
            s.value = value;
            s.error = error;
            return;
        }
    }
    scalars_.push_back({name, value, error});
}

bool ExperimentReport::has_scalar(const std::string& name) const {
    for (const auto& s : scalars_)
        if (s.name == name) return true;
    return false;
}

double ExperimentReport::scalar(const std::string& name) const {
    for (const auto& s : scalars_)
        if (s.name == name) return s.value;
    throw ArgumentError("report '" + name_ + "' has no scalar '" + name + "'");
}

Table& ExperimentReport::add_table(std::string name, std::vector<std::string> columns) {
    tables_.push_back({std::move(name), std::move(columns), {}});
    return tables_.back();
}

const Table* ExperimentReport::table(const std::string& name) const {
    for (const auto& t : tables_)
        if (t.name == name) return &t;
    return nullptr;
}

void ExperimentReport::add_verdict(std::string name, bool passed, std::string detail) {
    verdicts_.push_back({std::move(name), passed, std::move(detail)});
}

void ExperimentReport::set_error(std::string kind, std::string message) {
    error_ = std::make_pair(std::move(kind), std::move(message));
}

bool ExperimentReport::passed() const {
    if (error_) return false;
    for (const auto& v : verdicts_)
        if (!v.passed) return false;
    return true;
}

void ExperimentReport::merge(const ExperimentReport& other, const std::string& prefix) {
    for (const auto& s : other.scalars_) add_scalar(prefix + s.name, s.value, s.error);
    for (const auto& t : other.tables_) {
        tables_.push_back(t);
        tables_.back().name = prefix + t.name;
    }
    for (const auto& v : other.verdicts_) add_verdict(prefix + v.name, v.passed, v.detail);
    for (const auto& n : other.notes_) add_note(prefix + n);
    if (other.error_ && !error_) error_ = other.error_;
}

nlohmann::ordered_json ExperimentReport::to_json() const {
    using json = nlohmann::ordered_json;
    auto num = [](double v) -> json {
        if (std::isfinite(v)) return v;
        return format_double(v);
    };
    json j;
    j["experiment"] = name_;
    j["config"] = config_;
    json scalars = json::object();
    for (const auto& s : scalars_) {
        json e;
        e["value"] = num(s.value);
        if (s.error) e["error"] = num(*s.error);
        scalars[s.name] = e;
    }
    j["scalars"] = scalars;
    json tables = json::object();
    for (const auto& t : tables_) {
        json tj;
        tj["columns"] = t.columns;
        json rows = json::array();
        for (const auto& r : t.rows) {
            json row = json::array();
            for (double v : r) row.push_back(num(v));
            rows.push_back(row);
        }
        tj["rows"] = rows;
        tables[t.name] = tj;
    }
    j["tables"] = tables;
    json verdicts = json::array();
    for (const auto& v : verdicts_)
        verdicts.push_back({{"name", v.name}, {"passed", v.passed}, {"detail", v.detail}});
    j["verdicts"] = verdicts;
    j["notes"] = notes_;
    if (error_) j["error"] = {{"kind", error_->first}, {"message", error_->second}};
    j["passed"] = passed();
    j["elapsed_seconds"] = elapsed_;
    return j;
}

}  // namespace wiso
