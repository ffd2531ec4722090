#include "hpod/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hpod {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace and CR
        auto b = cell.find_first_not_of(" \t\r\n");
        auto e = cell.find_last_not_of(" \t\r\n");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& s, const std::string& ctx) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("non-numeric cell '" + s + "' in " + ctx);
    }
}

}  // namespace

Dataset load_dataset(const std::string& path,
                     const std::optional<std::string>& label_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string header_line;
    if (!std::getline(in, header_line)) throw DataError("empty file: " + path);
    const auto header = split_csv_line(header_line);

    int label_idx = -1;
    if (label_column) {
        for (size_t c = 0; c < header.size(); ++c)
            if (header[c] == *label_column) label_idx = static_cast<int>(c);
        if (label_idx < 0)
            throw DataError("label column '" + *label_column + "' absent in " + path);
    }

    const int d = static_cast<int>(header.size()) - (label_idx >= 0 ? 1 : 0);
    if (d < 1) throw DataError("no feature columns in " + path);

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    int dropped = 0;
    std::string line;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        std::vector<double> row;
        row.reserve(d);
        bool has_nan = false;
        for (size_t c = 0; c < cells.size(); ++c) {
            if (static_cast<int>(c) == label_idx) continue;
            const double v =
                parse_double(cells[c], path + ":" + std::to_string(lineno));
            if (!std::isfinite(v)) has_nan = true;
            row.push_back(v);
        }
        if (has_nan) {
            ++dropped;
            continue;
        }
        if (label_idx >= 0) {
            const double lv = parse_double(cells[label_idx],
                                           path + ":" + std::to_string(lineno));
            if (lv != 0.0 && lv != 1.0)
                throw DataError(path + ":" + std::to_string(lineno) +
                                ": label must be 0 or 1");
            labels.push_back(static_cast<int>(lv));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("no rows survive NaN filter in " + path);

    Dataset ds;
    ds.name = std::filesystem::path(path).stem().string();
    ds.source = path;
    ds.dropped_rows = dropped;
    ds.X.resize(static_cast<Eigen::Index>(rows.size()), d);
    for (size_t i = 0; i < rows.size(); ++i)
        for (int c = 0; c < d; ++c) ds.X(static_cast<Eigen::Index>(i), c) = rows[i][c];
    if (label_idx >= 0) {
        Eigen::VectorXi y(static_cast<Eigen::Index>(labels.size()));
        for (size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i)) = labels[i];
        ds.y = y;
    }
    return ds;
}

Matrix standardize_matrix(const Matrix& X) {
    Matrix out = X;
    const auto n = X.rows();
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        const double mean = X.col(c).mean();
        const double var =
            (X.col(c).array() - mean).square().sum() / static_cast<double>(n);
        const double sd = std::sqrt(var);
        if (sd > 0.0)
            out.col(c) = (X.col(c).array() - mean) / sd;
        else
            out.col(c).setZero();
    }
    return out;
}

Dataset standardize(const Dataset& ds) {
    Dataset out = ds;
    out.X = standardize_matrix(ds.X);
    return out;
}

Corpus load_corpus(const std::string& dir, const std::string& label_column) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ConfigError("corpus directory missing: " + dir);
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv")
            files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError("no .csv files in " + dir);

    Corpus corpus;
    for (const auto& f : files) corpus.datasets.push_back(load_dataset(f, label_column));
    std::sort(corpus.datasets.begin(), corpus.datasets.end(),
              [](const Dataset& a, const Dataset& b) { return a.name < b.name; });
    for (size_t i = 1; i < corpus.datasets.size(); ++i)
        if (corpus.datasets[i].name == corpus.datasets[i - 1].name)
            throw DataError("duplicate dataset name: " + corpus.datasets[i].name);
    for (const auto& d : corpus.datasets)
        if (!d.labeled()) throw DataError("corpus dataset lacks labels: " + d.name);
    return corpus;
}

}  // namespace hpod
