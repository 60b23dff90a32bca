#pragma once

#include <sparsepsi/types.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sparsepsi {

/// Response vector and design matrix (rows are observations).
struct DataSet
{
    Vector y;
    Matrix X;
    std::vector<std::string> names; ///< labels of the X columns; may be empty

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }

    /// Throws std::invalid_argument unless n >= 2, p >= 1, sizes agree and
    /// every entry is finite.
    void validate() const;

    /// Rows `rows` (in the given order) and columns `cols`.
    DataSet subset(const std::vector<Index>& rows, const std::vector<Index>& cols) const;
    DataSet select_rows(const std::vector<Index>& rows) const;
    DataSet select_columns(const std::vector<Index>& cols) const;
};

/// Sample second moment S = n⁻¹ Σ xᵢxᵢᵀ of centered X and the
/// response-weighted moment Q = n⁻¹ Σ (yᵢ − ȳ) xᵢxᵢᵀ.
struct MomentPair
{
    Matrix S;
    Matrix Q;
    Index n = 0;
    Index p = 0;
};

struct CsvLayout
{
    std::string response = "y";
    std::optional<std::size_t> response_index; ///< 0-based; overrides `response`
};

DataSet load_csv(const std::filesystem::path& path, const CsvLayout& layout = {});

Vector column_means(const Matrix& X);

/// Subtracts each column mean of X; y is left untouched.
DataSet center(const DataSet& data);

/// Centers and scales every X column to unit sample standard deviation
/// (divisor n). Constant columns are left at zero.
DataSet standardize(const DataSet& data);

/// Moments with the empirical column means and ȳ removed.
MomentPair compute_moments(const DataSet& data);

/// Moments with externally supplied centering offsets, e.g. training-fold
/// means applied to a validation fold.
MomentPair compute_moments(const DataSet& data, const Vector& x_offset, double y_offset);

} // namespace sparsepsi
