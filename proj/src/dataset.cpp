#include "symptomnet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace symptomnet {

namespace {

// Quoted fields may hold commas and doubled quotes but not line breaks.
std::vector<std::string> split_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string field;
    std::size_t i = 0;
    while (true) {
        field.clear();
        if (i < line.size() && line[i] == '"') {
            ++i;
            while (true) {
                if (i >= line.size()) throw DatasetError("CSV line " + std::to_string(line_no) + ": unterminated quote");
                if (line[i] == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        field += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                field += line[i++];
            }
            if (i < line.size() && line[i] != ',') {
                throw DatasetError("CSV line " + std::to_string(line_no) + ": text after closing quote");
            }
        } else {
            const std::size_t comma = std::min(line.find(',', i), line.size());
            field.assign(line.substr(i, comma - i));
            i = comma;
        }
        out.push_back(field);
        if (i >= line.size()) break;
        ++i;  // skip the comma
    }
    return out;
}

void append_field(std::string& out, std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        out += field;
        return;
    }
    out += '"';
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
}

double parse_number(std::string_view text, std::string_view column, std::size_t row) {
    if (text.empty()) return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw DatasetError("column '" + std::string(column) + "' row " + std::to_string(row) +
                           ": '" + std::string(text) + "' is not a number");
    }
    return v;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return {};
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

bool is_numeric_column(std::string_view name) {
    auto ends_with = [&](std::string_view suffix) {
        return name.size() >= suffix.size() && name.substr(name.size() - suffix.size()) == suffix;
    };
    return ends_with("_score") || ends_with("_total");
}

std::string score_column(std::string_view surrogate_node) { return std::string(surrogate_node) + "_score"; }

bool DatasetTable::has(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t DatasetTable::column_index(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw DatasetError("missing column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

bool DatasetTable::is_numeric(std::string_view name) const {
    return std::holds_alternative<NumericColumn>(columns_[column_index(name)]);
}

void DatasetTable::check_rows(std::size_t n, const std::string& name) {
    if (has(name)) throw DatasetError("duplicate column '" + name + "'");
    if (!names_.empty() && n != rows_) {
        throw DatasetError("column '" + name + "' has " + std::to_string(n) + " rows, table has " +
                           std::to_string(rows_));
    }
    rows_ = n;
}

void DatasetTable::add_discrete(std::string name, std::vector<std::string> domain, std::vector<int> codes) {
    for (std::size_t r = 0; r < codes.size(); ++r) {
        if (codes[r] != DiscreteColumn::kMissing &&
            (codes[r] < 0 || static_cast<std::size_t>(codes[r]) >= domain.size())) {
            throw DatasetError("column '" + name + "' row " + std::to_string(r) + ": code outside domain");
        }
    }
    check_rows(codes.size(), name);
    names_.push_back(std::move(name));
    columns_.emplace_back(DiscreteColumn{std::move(domain), std::move(codes)});
}

void DatasetTable::add_labels(std::string name, std::vector<std::string> domain,
                              const std::vector<std::string>& labels) {
    std::map<std::string_view, int> lookup;
    for (std::size_t i = 0; i < domain.size(); ++i) lookup.emplace(domain[i], static_cast<int>(i));
    std::vector<int> codes(labels.size());
    for (std::size_t r = 0; r < labels.size(); ++r) {
        if (labels[r].empty()) {
            codes[r] = DiscreteColumn::kMissing;
            continue;
        }
        auto it = lookup.find(labels[r]);
        if (it == lookup.end()) {
            throw DatasetError("column '" + name + "' row " + std::to_string(r) + ": label '" + labels[r] +
                               "' outside domain");
        }
        codes[r] = it->second;
    }
    add_discrete(std::move(name), std::move(domain), std::move(codes));
}

void DatasetTable::add_numeric(std::string name, std::vector<double> values) {
    check_rows(values.size(), name);
    names_.push_back(std::move(name));
    columns_.emplace_back(NumericColumn{std::move(values)});
}

const DiscreteColumn& DatasetTable::discrete(std::string_view name) const {
    const auto& col = columns_[column_index(name)];
    if (const auto* d = std::get_if<DiscreteColumn>(&col)) return *d;
    throw DatasetError("column '" + std::string(name) + "' is numeric, expected discrete");
}

const NumericColumn& DatasetTable::numeric(std::string_view name) const {
    const auto& col = columns_[column_index(name)];
    if (const auto* n = std::get_if<NumericColumn>(&col)) return *n;
    throw DatasetError("column '" + std::string(name) + "' is discrete, expected numeric");
}

std::string DatasetTable::cell(std::string_view name, std::size_t row) const {
    const auto& col = columns_[column_index(name)];
    if (const auto* d = std::get_if<DiscreteColumn>(&col)) {
        const int code = d->codes.at(row);
        return code == DiscreteColumn::kMissing ? std::string{} : d->domain[static_cast<std::size_t>(code)];
    }
    return format_number(std::get<NumericColumn>(col).values.at(row));
}

std::vector<int> DatasetTable::codes_in(std::string_view name, const std::vector<std::string>& domain) const {
    const DiscreteColumn& col = discrete(name);
    std::vector<int> remap(col.domain.size(), DiscreteColumn::kMissing);
    for (std::size_t i = 0; i < col.domain.size(); ++i) {
        auto it = std::find(domain.begin(), domain.end(), col.domain[i]);
        if (it != domain.end()) remap[i] = static_cast<int>(it - domain.begin());
    }
    std::vector<int> out(col.codes.size());
    for (std::size_t r = 0; r < col.codes.size(); ++r) {
        const int code = col.codes[r];
        if (code == DiscreteColumn::kMissing) {
            out[r] = DiscreteColumn::kMissing;
            continue;
        }
        out[r] = remap[static_cast<std::size_t>(code)];
        if (out[r] == DiscreteColumn::kMissing) {
            throw DatasetError("column '" + std::string(name) + "' row " + std::to_string(r) + ": value '" +
                               col.domain[static_cast<std::size_t>(code)] + "' outside declared domain");
        }
    }
    return out;
}

DatasetTable DatasetTable::select_rows(std::span<const std::size_t> rows) const {
    DatasetTable out;
    for (std::size_t c = 0; c < names_.size(); ++c) {
        if (const auto* d = std::get_if<DiscreteColumn>(&columns_[c])) {
            std::vector<int> codes;
            codes.reserve(rows.size());
            for (auto r : rows) codes.push_back(d->codes.at(r));
            out.add_discrete(names_[c], d->domain, std::move(codes));
        } else {
            const auto& n = std::get<NumericColumn>(columns_[c]);
            std::vector<double> values;
            values.reserve(rows.size());
            for (auto r : rows) values.push_back(n.values.at(r));
            out.add_numeric(names_[c], std::move(values));
        }
    }
    out.rows_ = rows.size();
    return out;
}

std::string DatasetTable::to_csv() const {
    std::string out;
    for (std::size_t c = 0; c < names_.size(); ++c) {
        if (c) out += ',';
        append_field(out, names_[c]);
    }
    out += '\n';
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < names_.size(); ++c) {
            if (c) out += ',';
            if (const auto* d = std::get_if<DiscreteColumn>(&columns_[c])) {
                const int code = d->codes[r];
                if (code != DiscreteColumn::kMissing) append_field(out, d->domain[static_cast<std::size_t>(code)]);
            } else {
                out += format_number(std::get<NumericColumn>(columns_[c]).values[r]);
            }
        }
        out += '\n';
    }
    return out;
}

void DatasetTable::write_csv(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DatasetError("cannot open '" + path.string() + "' for writing");
    os << to_csv();
    if (!os) throw DatasetError("failed writing '" + path.string() + "'");
}

DatasetTable DatasetTable::from_csv(std::string_view text, const std::function<bool(std::string_view)>& numeric) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = nl + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();

    DatasetTable table;
    if (lines.empty()) return table;

    const auto header = split_line(lines.front(), 1);
    std::vector<std::vector<std::string>> cells(header.size());
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = split_line(lines[i], i + 1);
        if (fields.size() != header.size()) {
            throw DatasetError("CSV line " + std::to_string(i + 1) + " has " + std::to_string(fields.size()) +
                               " fields, header has " + std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < header.size(); ++c) cells[c].push_back(std::move(fields[c]));
    }

    for (std::size_t c = 0; c < header.size(); ++c) {
        if (numeric(header[c])) {
            std::vector<double> values(cells[c].size());
            for (std::size_t r = 0; r < values.size(); ++r) values[r] = parse_number(cells[c][r], header[c], r);
            table.add_numeric(header[c], std::move(values));
        } else {
            std::set<std::string> labels;
            for (const auto& s : cells[c]) {
                if (!s.empty()) labels.insert(s);
            }
            table.add_labels(header[c], std::vector<std::string>(labels.begin(), labels.end()), cells[c]);
        }
    }
    table.rows_ = lines.size() - 1;
    return table;
}

DatasetTable DatasetTable::from_csv(std::string_view text) { return from_csv(text, is_numeric_column); }

DatasetTable DatasetTable::read_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DatasetError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << is.rdbuf();
    return from_csv(buf.str());
}

}  // namespace symptomnet
