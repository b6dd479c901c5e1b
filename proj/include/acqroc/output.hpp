#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace acqroc::harness {

/// Ten significant digits, shortest of fixed/scientific ("%.10g").
std::string format_number(double value);

/// Comma-separated table with a fixed header. Empty optional cells stay
/// empty so the column count never changes.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    using Cell = std::optional<double>;
    void add_row(const std::vector<Cell>& cells);
    std::string str() const;

    std::size_t columns() const { return header_.size(); }
    std::size_t rows() const { return rows_; }

private:
    std::vector<std::string> header_;
    std::string body_;
    std::size_t rows_ = 0;
};

/// Writes through a temporary file in the same directory and renames it
/// over `path`. Throws std::runtime_error on I/O failure.
void write_atomic(const std::string& path, std::string_view content);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal SVG line chart; log_x plots log10(x).
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series,
                           bool log_x);

}  // namespace acqroc::harness
