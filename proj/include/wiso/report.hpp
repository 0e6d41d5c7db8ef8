#pragma once

// Structured experiment output: scalars with error estimates, per-point
// tables (exported as CSV) and named pass/fail verdicts.

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace wiso {

struct Verdict {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Scalar {
    std::string name;
    double value = 0.0;
    std::optional<double> error;
};

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
    /// Header line plus one line per row, values printed with 17 significant
    /// digits so identical inputs give byte-identical files.
    std::string to_csv() const;
};

class ExperimentReport {
public:
    ExperimentReport() = default;
    explicit ExperimentReport(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }

    void set_config(nlohmann::ordered_json config) { config_ = std::move(config); }
    const nlohmann::ordered_json& config() const { return config_; }

    void add_scalar(const std::string& name, double value,
                    std::optional<double> error = std::nullopt);
    /// Throws ArgumentError when the scalar is absent.
    double scalar(const std::string& name) const;
    bool has_scalar(const std::string& name) const;
    const std::vector<Scalar>& scalars() const { return scalars_; }

    Table& add_table(std::string name, std::vector<std::string> columns);
    const Table* table(const std::string& name) const;
    const std::deque<Table>& tables() const { return tables_; }

    void add_verdict(std::string name, bool passed, std::string detail = {});
    const std::vector<Verdict>& verdicts() const { return verdicts_; }

    void add_note(std::string note) { notes_.push_back(std::move(note)); }
    const std::vector<std::string>& notes() const { return notes_; }

    void set_error(std::string kind, std::string message);
    bool has_error() const { return error_.has_value(); }

    void set_elapsed_seconds(double s) { elapsed_ = s; }
    double elapsed_seconds() const { return elapsed_; }

    /// True iff there is no error and every verdict passed.
    bool passed() const;

    /// Appends another report's scalars, tables, verdicts and notes, each
    /// name prefixed by `prefix`.
    void merge(const ExperimentReport& other, const std::string& prefix);

    nlohmann::ordered_json to_json() const;

private:
    std::string name_;
    nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
    std::vector<Scalar> scalars_;
    std::deque<Table> tables_;  // stable references from add_table
    std::vector<Verdict> verdicts_;
    std::vector<std::string> notes_;
    std::optional<std::pair<std::string, std::string>> error_;
    double elapsed_ = 0.0;
};

/// Formats a double with 17 significant digits ("nan", "inf" spelled out).
std::string format_double(double v);
/// Six significant digits, for messages and verdict details.
std::string format_short(double v);

}  // namespace wiso
