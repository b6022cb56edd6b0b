#pragma once

#include <string>
#include <vector>

namespace ouinv {

/// One CSV artifact: header row, finite numeric rows, trailing "# key = value"
/// metadata lines. Written atomically (temp file + rename); identical content
/// produces identical bytes.
struct CsvReport {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    void add_row(std::initializer_list<double> values);
    void add_row(const std::vector<double>& values);
    void add_meta(const std::string& key, const std::string& value);
    void add_meta(const std::string& key, double value);
    std::string to_string() const;
    void write_atomic(const std::string& path) const;
};

std::string format_double(double v);

} // namespace ouinv
