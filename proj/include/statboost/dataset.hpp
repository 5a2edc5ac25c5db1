#ifndef STATBOOST_DATASET_HPP
#define STATBOOST_DATASET_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "statboost/common.hpp"

namespace statboost {

enum class ColumnKind { Numeric, Categorical };

/// Affine transform applied to a numeric column at standardization,
/// mapping raw values to the stored ones: stored = (raw - mean) / sd.
struct ColumnScaling {
    double mean = 0.0;
    double sd = 1.0;
};

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    std::vector<std::string> levels;  // categorical only, lexicographic order
    std::optional<ColumnScaling> scaling;

    int level_count() const { return static_cast<int>(levels.size()); }
};

/// Immutable after construction; the single data source all engines consume.
/// Categorical columns hold non-negative integer level codes stored as
/// doubles. The response is kept separate from the covariate matrix.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<ColumnSpec> columns, Eigen::MatrixXd values,
            Eigen::VectorXd response);

    Eigen::Index rows() const { return values_.rows(); }
    Eigen::Index cols() const { return values_.cols(); }

    const std::vector<ColumnSpec>& columns() const { return columns_; }
    const Eigen::MatrixXd& values() const { return values_; }
    const Eigen::VectorXd& response() const { return response_; }

    /// Index of a named column; throws DataError if absent.
    Eigen::Index column_index(const std::string& name) const;
    bool has_column(const std::string& name) const;
    const ColumnSpec& column(const std::string& name) const;
    Eigen::VectorXd column_values(const std::string& name) const;

    /// Row subset (indices may repeat, e.g. bootstrap training multisets).
    Dataset subset(const std::vector<std::size_t>& row_indices) const;

private:
    std::vector<ColumnSpec> columns_;
    Eigen::MatrixXd values_;
    Eigen::VectorXd response_;
};

/// Reads a comma-separated file with a mandatory header row. Columns whose
/// values all parse as numbers become numeric; anything else becomes
/// categorical with lexicographic level coding. Missing (empty) cells are
/// rejected with the offending row and column named. An empty
/// response_column loads every column as a covariate with a zero response
/// (prediction on unlabeled data).
Dataset load_csv(const std::string& path, const std::string& response_column);

/// Parses CSV text directly (same contract as load_csv); `origin` is used in
/// error messages.
Dataset parse_csv(const std::string& text, const std::string& response_column,
                  const std::string& origin = "<memory>");

/// Centers each numeric column to mean 0 and scales to sd 1 (n-1
/// denominator), recording the raw->stored transform in the column spec.
/// Categorical columns and the response are untouched. Repeated application
/// composes the recorded transforms, so the stored scaling always maps raw
/// data to the current representation.
Dataset standardize(const Dataset& d);

}  // namespace statboost

#endif  // STATBOOST_DATASET_HPP
