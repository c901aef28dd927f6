#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ddqncd {

enum class DataKind { CopulaGaussian, DiscreteBinary };

std::string to_string(DataKind k);

// Column-wise rank-Gaussian (normal scores) transform. Rank r (1-based,
// ties averaged) maps to the standard normal quantile of (r - 0.5) / n.
// Throws DataError when n < 3 or a column is constant.
Eigen::MatrixXd rank_gaussian_transform(const Eigen::MatrixXd& raw);

// Immutable scoring carrier: sample matrix (already transformed for the
// copula scorer) plus the scorer kind chosen for it.
class ScoredDataset {
public:
    // Rank-Gaussian transform, then Gaussian scoring.
    static ScoredDataset copula(const Eigen::MatrixXd& raw, std::vector<std::string> names = {});
    // Every entry must be 0 or 1.
    static ScoredDataset binary(const Eigen::MatrixXd& raw, std::vector<std::string> names = {});
    // Binary iff every entry is 0/1; continuous iff no column is 0/1-valued;
    // mixed tables are rejected with DataError.
    static ScoredDataset detect(const Eigen::MatrixXd& raw, std::vector<std::string> names = {});

    int n() const { return static_cast<int>(values_.rows()); }
    int p() const { return static_cast<int>(values_.cols()); }
    DataKind kind() const { return kind_; }
    const Eigen::MatrixXd& values() const { return values_; }
    const std::vector<std::string>& names() const { return names_; }
    // Per column: did every raw entry lie in {0, 1}?
    const std::vector<bool>& binary_columns() const { return binary_columns_; }
    // X^T X of the stored values (copula kind only; empty otherwise).
    const Eigen::MatrixXd& gram() const { return gram_; }

private:
    ScoredDataset() = default;

    DataKind kind_ = DataKind::CopulaGaussian;
    Eigen::MatrixXd values_;
    Eigen::MatrixXd gram_;
    std::vector<std::string> names_;
    std::vector<bool> binary_columns_;
};

struct RawTable {
    std::vector<std::string> names;
    Eigen::MatrixXd values;
};

// CSV with one header row and numeric cells. Blank, NaN or non-numeric cells
// raise DataError naming the row and column.
RawTable read_dataset_csv(std::istream& in);
RawTable load_dataset_csv(const std::string& path);
void write_dataset_csv(std::ostream& out, const Eigen::MatrixXd& values, const std::vector<std::string>& names = {});

}  // namespace ddqncd
