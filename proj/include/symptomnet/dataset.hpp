#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace symptomnet {

class DatasetError : public std::runtime_error {
public:
    explicit DatasetError(const std::string& what) : std::runtime_error(what) {}
};

// Codes index into `domain`; kMissing marks an empty cell.
struct DiscreteColumn {
    static constexpr int kMissing = -1;
    std::vector<std::string> domain;
    std::vector<int> codes;
};

// NaN marks an empty cell.
struct NumericColumn {
    std::vector<double> values;
};

using Column = std::variant<DiscreteColumn, NumericColumn>;

// Column-oriented record table. Columns keep insertion order, which is also
// the CSV column order.
class DatasetTable {
public:
    DatasetTable() = default;

    std::size_t rows() const { return rows_; }
    const std::vector<std::string>& names() const { return names_; }
    bool has(std::string_view name) const;
    bool is_numeric(std::string_view name) const;

    void add_discrete(std::string name, std::vector<std::string> domain, std::vector<int> codes);
    // Convenience: encodes labels against a domain; unknown labels throw.
    void add_labels(std::string name, std::vector<std::string> domain, const std::vector<std::string>& labels);
    void add_numeric(std::string name, std::vector<double> values);

    const DiscreteColumn& discrete(std::string_view name) const;
    const NumericColumn& numeric(std::string_view name) const;

    // Label of a discrete cell, or the shortest round-trip text of a numeric one.
    std::string cell(std::string_view name, std::size_t row) const;

    // Re-encodes a discrete column against `domain`. Throws DatasetError naming
    // the column and row for labels outside the domain; missing stays kMissing.
    std::vector<int> codes_in(std::string_view name, const std::vector<std::string>& domain) const;

    DatasetTable select_rows(std::span<const std::size_t> rows) const;

    std::string to_csv() const;
    void write_csv(const std::filesystem::path& path) const;

    // Columns for which `numeric` returns true are parsed as numbers; all other
    // columns are discrete with a lexicographically sorted domain.
    static DatasetTable from_csv(std::string_view text, const std::function<bool(std::string_view)>& numeric);
    static DatasetTable from_csv(std::string_view text);
    static DatasetTable read_csv(const std::filesystem::path& path);

private:
    std::size_t column_index(std::string_view name) const;
    void check_rows(std::size_t n, const std::string& name);

    std::vector<std::string> names_;
    std::vector<Column> columns_;
    std::size_t rows_ = 0;
};

// Cohort CSV convention: raw surrogate scores end in "_score" and questionnaire
// totals in "_total"; both are numeric. Everything else is a label.
bool is_numeric_column(std::string_view name);

// Column name carrying the raw score of a surrogate node.
std::string score_column(std::string_view surrogate_node);

std::string format_number(double v);

}  // namespace symptomnet
