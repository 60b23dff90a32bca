#include <sparsepsi/moments.hpp>

#include <sparsepsi/csv.hpp>

#include <cmath>
#include <stdexcept>

namespace sparsepsi {

void DataSet::validate() const
{
    if (X.rows() < 2)
        throw std::invalid_argument("data set needs at least 2 observations");
    if (X.cols() < 1)
        throw std::invalid_argument("data set needs at least 1 predictor");
    if (y.size() != X.rows())
        throw std::invalid_argument("response length does not match design rows");
    if (!names.empty() && static_cast<Index>(names.size()) != X.cols())
        throw std::invalid_argument("column label count does not match design columns");
    if (!y.allFinite() || !X.allFinite())
        throw std::invalid_argument("data set contains non-finite entries");
}

DataSet DataSet::subset(const std::vector<Index>& rows, const std::vector<Index>& cols) const
{
    DataSet out;
    out.y.resize(static_cast<Index>(rows.size()));
    out.X.resize(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.y(static_cast<Index>(r)) = y(rows[r]);
        for (std::size_t c = 0; c < cols.size(); ++c)
            out.X(static_cast<Index>(r), static_cast<Index>(c)) = X(rows[r], cols[c]);
    }
    if (!names.empty())
        for (Index c : cols)
            out.names.push_back(names[static_cast<std::size_t>(c)]);
    return out;
}

namespace {

std::vector<Index> iota_indices(Index count)
{
    std::vector<Index> idx(static_cast<std::size_t>(count));
    for (Index k = 0; k < count; ++k)
        idx[static_cast<std::size_t>(k)] = k;
    return idx;
}

} // namespace

DataSet DataSet::select_rows(const std::vector<Index>& rows) const
{
    return subset(rows, iota_indices(p()));
}

DataSet DataSet::select_columns(const std::vector<Index>& cols) const
{
    return subset(iota_indices(n()), cols);
}

DataSet load_csv(const std::filesystem::path& path, const CsvLayout& layout)
{
    const NumericTable table = read_numeric_csv(path);
    const auto ncols = table.header.size();

    std::size_t response = ncols;
    if (layout.response_index) {
        response = *layout.response_index;
        if (response >= ncols)
            throw ParseError("response index " + std::to_string(response + 1) +
                             " exceeds column count " + std::to_string(ncols));
    } else {
        for (std::size_t c = 0; c < ncols; ++c)
            if (table.header[c] == layout.response) {
                response = c;
                break;
            }
        if (response == ncols)
            throw ParseError("response column '" + layout.response + "' not found in header", 1);
    }
    if (ncols < 2)
        throw ParseError("need a response column and at least one predictor", 1);
    if (table.values.rows() < 2)
        throw ParseError("insufficient rows: need at least 2 data rows, found " +
                         std::to_string(table.values.rows()));

    DataSet data;
    data.y = table.values.col(static_cast<Index>(response));
    data.X.resize(table.values.rows(), static_cast<Index>(ncols - 1));
    Index out = 0;
    for (std::size_t c = 0; c < ncols; ++c) {
        if (c == response)
            continue;
        data.X.col(out++) = table.values.col(static_cast<Index>(c));
        data.names.push_back(table.header[c]);
    }
    data.validate();
    return data;
}

Vector column_means(const Matrix& X)
{
    return X.colwise().mean().transpose();
}

DataSet center(const DataSet& data)
{
    DataSet out = data;
    out.X.rowwise() -= column_means(data.X).transpose();
    return out;
}

DataSet standardize(const DataSet& data)
{
    DataSet out = center(data);
    const double n = static_cast<double>(out.n());
    for (Index j = 0; j < out.p(); ++j) {
        const double sd = std::sqrt(out.X.col(j).squaredNorm() / n);
        if (sd > 0.0)
            out.X.col(j) /= sd;
    }
    return out;
}

MomentPair compute_moments(const DataSet& data)
{
    return compute_moments(data, column_means(data.X), data.y.mean());
}

MomentPair compute_moments(const DataSet& data, const Vector& x_offset, double y_offset)
{
    if (!data.X.allFinite() || !data.y.allFinite() || !x_offset.allFinite() || !std::isfinite(y_offset))
        throw std::invalid_argument("moments: non-finite input");
    if (data.y.size() != data.X.rows() || x_offset.size() != data.X.cols())
        throw std::invalid_argument("moments: dimension mismatch");

    const double n = static_cast<double>(data.n());
    const Matrix Xc = data.X.rowwise() - x_offset.transpose();
    const Vector w = data.y.array() - y_offset;

    MomentPair m;
    m.n = data.n();
    m.p = data.p();
    m.S.noalias() = Xc.transpose() * Xc;
    m.S /= n;
    m.Q.noalias() = Xc.transpose() * (w.asDiagonal() * Xc);
    m.Q /= n;
    m.S = 0.5 * (m.S + m.S.transpose()).eval();
    m.Q = 0.5 * (m.Q + m.Q.transpose()).eval();
    return m;
}

} // namespace sparsepsi
