#include "ddqncd/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "ddqncd/errors.hpp"
#include "ddqncd/normal.hpp"

namespace ddqncd {

namespace {

std::vector<std::string> default_names(int p) {
    std::vector<std::string> names;
    for (int j = 0; j < p; ++j) names.push_back("X" + std::to_string(j));
    return names;
}

std::vector<bool> detect_binary_columns(const Eigen::MatrixXd& raw) {
    std::vector<bool> out(raw.cols(), true);
    for (Eigen::Index j = 0; j < raw.cols(); ++j)
        for (Eigen::Index i = 0; i < raw.rows(); ++i)
            if (raw(i, j) != 0.0 && raw(i, j) != 1.0) {
                out[j] = false;
                break;
            }
    return out;
}

std::string column_label(const std::vector<std::string>& names, Eigen::Index j) {
    if (j < static_cast<Eigen::Index>(names.size()) && !names[j].empty())
        return "column " + std::to_string(j + 1) + " ('" + names[j] + "')";
    return "column " + std::to_string(j + 1);
}

std::string trim(std::string s) {
    auto b = s.find_first_not_of(" \t\r\n\"");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n\"");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string to_string(DataKind k) { return k == DataKind::CopulaGaussian ? "CopulaGaussian" : "DiscreteBinary"; }

Eigen::MatrixXd rank_gaussian_transform(const Eigen::MatrixXd& raw) {
    const Eigen::Index n = raw.rows();
    if (n < 3) throw DataError("rank-Gaussian transform needs at least 3 samples, got " + std::to_string(n));
    Eigen::MatrixXd out(n, raw.cols());
    std::vector<Eigen::Index> order(n);
    std::vector<double> rank(n);
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return raw(a, j) < raw(b, j); });
        if (raw(order.front(), j) == raw(order.back(), j))
            throw DataError("degenerate column " + std::to_string(j + 1) + ": all values are equal");
        for (Eigen::Index k = 0; k < n;) {
            Eigen::Index end = k + 1;
            while (end < n && raw(order[end], j) == raw(order[k], j)) ++end;
            // 1-based ranks k+1..end share their average.
            const double avg = 0.5 * static_cast<double>(k + 1 + end);
            for (Eigen::Index t = k; t < end; ++t) rank[order[t]] = avg;
            k = end;
        }
        const double nd = static_cast<double>(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            // Quantiles above the median are taken as exact negatives of their mirror rank.
            const double num = rank[i] - 0.5;
            const double mirror = nd - num;
            out(i, j) = num <= mirror ? normal_quantile(num / nd) : -normal_quantile(mirror / nd);
        }
    }
    return out;
}

ScoredDataset ScoredDataset::copula(const Eigen::MatrixXd& raw, std::vector<std::string> names) {
    if (!raw.allFinite()) throw DataError("dataset contains non-finite values");
    ScoredDataset d;
    d.kind_ = DataKind::CopulaGaussian;
    d.binary_columns_ = detect_binary_columns(raw);
    d.values_ = rank_gaussian_transform(raw);
    d.gram_ = d.values_.transpose() * d.values_;
    d.names_ = names.empty() ? default_names(static_cast<int>(raw.cols())) : std::move(names);
    return d;
}

ScoredDataset ScoredDataset::binary(const Eigen::MatrixXd& raw, std::vector<std::string> names) {
    ScoredDataset d;
    d.kind_ = DataKind::DiscreteBinary;
    d.binary_columns_ = detect_binary_columns(raw);
    for (std::size_t j = 0; j < d.binary_columns_.size(); ++j)
        if (!d.binary_columns_[j])
            throw DataError(column_label(names, static_cast<Eigen::Index>(j)) + " is not binary (entries must be 0 or 1)");
    d.values_ = raw;
    d.names_ = names.empty() ? default_names(static_cast<int>(raw.cols())) : std::move(names);
    return d;
}

ScoredDataset ScoredDataset::detect(const Eigen::MatrixXd& raw, std::vector<std::string> names) {
    if (raw.rows() == 0 || raw.cols() == 0) throw DataError("dataset is empty");
    const auto cols = detect_binary_columns(raw);
    const auto nbin = std::count(cols.begin(), cols.end(), true);
    if (nbin == static_cast<long>(cols.size())) return binary(raw, std::move(names));
    if (nbin == 0) return copula(raw, std::move(names));
    std::string which;
    for (std::size_t j = 0; j < cols.size(); ++j)
        if (cols[j]) {
            which = column_label(names, static_cast<Eigen::Index>(j));
            break;
        }
    throw DataError("mixed binary/continuous dataset is not supported (" + which +
                    " is binary while other columns are continuous)");
}

RawTable read_dataset_csv(std::istream& in) {
    RawTable t;
    std::string line;
    if (!std::getline(in, line)) throw DataError("dataset CSV is empty");
    t.names = split_commas(line);
    const std::size_t p = t.names.size();
    std::vector<double> cells;
    std::size_t rows = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto parts = split_commas(line);
        if (parts.size() != p)
            throw DataError("row " + std::to_string(rows + 1) + " (line " + std::to_string(lineno) + ") has " +
                            std::to_string(parts.size()) + " cells, expected " + std::to_string(p));
        for (std::size_t j = 0; j < p; ++j) {
            const auto& cell = parts[j];
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            const bool bad = cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size();
            if (bad || !std::isfinite(v))
                throw DataError("row " + std::to_string(rows + 1) + ", " +
                                column_label(t.names, static_cast<Eigen::Index>(j)) + ": " +
                                (cell.empty() ? std::string("blank cell") : "invalid value '" + cell + "'"));
            cells.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw DataError("dataset CSV has a header but no rows");
    t.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < p; ++j) t.values(i, j) = cells[i * p + j];
    return t;
}

RawTable load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset '" + path + "'");
    try {
        return read_dataset_csv(in);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

void write_dataset_csv(std::ostream& out, const Eigen::MatrixXd& values, const std::vector<std::string>& names) {
    const auto header = names.empty() ? default_names(static_cast<int>(values.cols())) : names;
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << values(i, j);
        out << '\n';
    }
}

}  // namespace ddqncd
