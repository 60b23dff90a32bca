#pragma once

#include <sparsepsi/types.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparsepsi {

/// Malformed tabular input. `row` is the 1-based line number in the file
/// (the header is line 1) and `column` the 1-based field; 0 when the error
/// is not tied to a cell.
class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0);

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

struct NumericTable
{
    std::vector<std::string> header;
    Matrix values; // one row per data line
};

/// Comma-separated file with one header row; every data cell must parse as
/// a finite real number.
NumericTable read_numeric_csv(const std::filesystem::path& path);

/// Round-trip precision (%.17g) writers.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
void write_table_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& header,
                     const Matrix& values);

/// Dense matrix without a header row, as written by write_matrix_csv.
Matrix read_matrix_csv(const std::filesystem::path& path);

std::string format_real(double v);

} // namespace sparsepsi
