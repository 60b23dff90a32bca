#include <sparsepsi/csv.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sparsepsi {

namespace {

std::string location(std::size_t row, std::size_t column)
{
    std::ostringstream os;
    os << " (line " << row;
    if (column > 0)
        os << ", column " << column;
    os << ")";
    return os.str();
}

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_real(const std::string& text, double& out)
{
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    if (begin != end && *begin == '+')
        ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

} // namespace

ParseError::ParseError(const std::string& what, std::size_t row, std::size_t column)
    : std::runtime_error(row > 0 ? what + location(row, column) : what), row_(row), column_(column)
{}

NumericTable read_numeric_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open file '" + path.string() + "'");

    NumericTable table;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::vector<double>> rows;

    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
            line.erase(0, 3);
        if (trim(line).empty()) {
            if (line_no == 1)
                throw ParseError("missing header row", line_no);
            continue;
        }
        auto fields = split_line(line);
        if (line_no == 1) {
            for (auto& f : fields)
                table.header.push_back(trim(f));
            continue;
        }
        if (fields.size() != table.header.size())
            throw ParseError("ragged row: expected " + std::to_string(table.header.size()) +
                                 " fields, found " + std::to_string(fields.size()),
                             line_no);
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const std::string cell = trim(fields[c]);
            if (cell.empty())
                throw ParseError("blank cell in column '" + table.header[c] + "'", line_no, c + 1);
            if (!parse_real(cell, row[c]))
                throw ParseError("non-numeric cell '" + cell + "' in column '" + table.header[c] + "'",
                                 line_no, c + 1);
        }
        rows.push_back(std::move(row));
    }
    if (line_no == 0)
        throw ParseError("empty file '" + path.string() + "'");

    table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(table.header.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            table.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    return table;
}

std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_rows(std::ofstream& out, const Matrix& m)
{
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0)
                out << ',';
            out << format_real(m(i, j));
        }
        out << '\n';
    }
}

std::ofstream open_for_write(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

} // namespace

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m)
{
    auto out = open_for_write(path);
    write_rows(out, m);
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const Matrix& values)
{
    auto out = open_for_write(path);
    for (std::size_t c = 0; c < header.size(); ++c)
        out << (c > 0 ? "," : "") << header[c];
    out << '\n';
    write_rows(out, values);
}

Matrix read_matrix_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open file '" + path.string() + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        auto fields = split_line(line);
        if (!rows.empty() && fields.size() != rows.front().size())
            throw ParseError("ragged row", line_no);
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c)
            if (!parse_real(trim(fields[c]), row[c]))
                throw ParseError("non-numeric cell", line_no, c + 1);
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError("empty matrix file '" + path.string() + "'");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    return m;
}

} // namespace sparsepsi
