#include "conformal/cli/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "conformal/cli/format.hpp"

namespace conformal::cli {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_cell(std::string_view cell, std::size_t line_no, const std::string& column) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    const std::string where = " at line " + std::to_string(line_no) + ", column '" + column + "'";
    if (cell.empty() || ec != std::errc{} || ptr != last) {
        throw std::runtime_error("non-numeric value '" + std::string(cell) + "'" + where);
    }
    if (!std::isfinite(value)) {
        throw std::runtime_error("non-finite value '" + std::string(cell) + "'" + where);
    }
    return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column, TargetKind kind) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty (no header row)");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    std::vector<std::string> header;
    for (auto cell : split(line)) header.emplace_back(cell);
    const auto target_it = std::find(header.begin(), header.end(), target_column);
    if (target_it == header.end()) {
        throw std::runtime_error("target column '" + target_column + "' not found");
    }
    const auto target_col = static_cast<std::size_t>(target_it - header.begin());

    std::vector<std::string> names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != target_col) names.push_back(header[c]);
    }

    std::vector<double> features;
    std::vector<double> targets;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error("line " + std::to_string(line_no) + " has " +
                                     std::to_string(cells.size()) + " cells, header has " +
                                     std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const double v = parse_cell(cells[c], line_no, header[c]);
            if (c == target_col) {
                if (kind == TargetKind::label && (v < 0 || v != std::floor(v))) {
                    throw std::runtime_error("class label '" + std::string(cells[c]) + "' at line " +
                                             std::to_string(line_no) +
                                             " is not a non-negative integer");
                }
                targets.push_back(v);
            } else {
                features.push_back(v);
            }
        }
    }

    const std::size_t rows = targets.size();
    Matrix x(rows, names.size(), std::move(features));
    if (kind == TargetKind::real) return Dataset::regression(std::move(x), std::move(targets), names);

    std::vector<int> labels(targets.begin(), targets.end());
    const int n_classes = labels.empty() ? 1 : *std::max_element(labels.begin(), labels.end()) + 1;
    return Dataset::classification(std::move(x), std::move(labels), n_classes, names);
}

void write_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    const auto& names = data.feature_names();
    for (std::size_t j = 0; j < data.dims(); ++j) {
        out << (names.empty() ? "x" + std::to_string(j) : names[j]) << ',';
    }
    out << "y\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.row(i)) out << format_double(v) << ',';
        out << format_double(data.target(i)) << '\n';
    }
}

}  // namespace conformal::cli
