#include "ouinv/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ouinv/errors.hpp"

namespace ouinv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvReport::add_row(std::initializer_list<double> values) {
    rows.emplace_back(values);
}

void CsvReport::add_row(const std::vector<double>& values) {
    rows.push_back(values);
}

void CsvReport::add_meta(const std::string& key, const std::string& value) {
    metadata.emplace_back(key, value);
}

void CsvReport::add_meta(const std::string& key, double value) {
    metadata.emplace_back(key, format_double(value));
}

std::string CsvReport::to_string() const {
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw NonFiniteData("CsvReport: row width does not match header");
        for (size_t i = 0; i < row.size(); ++i) {
            if (!std::isfinite(row[i]))
                throw NonFiniteData("CsvReport: non-finite value in data row");
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    for (const auto& [k, v] : metadata) out += "# " + k + " = " + v + "\n";
    return out;
}

void CsvReport::write_atomic(const std::string& path) const {
    std::string content = to_string(); // may throw before anything is written
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("CsvReport: cannot open " + tmp);
        os << content;
        os.flush();
        if (!os) throw Error("CsvReport: write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw Error("CsvReport: rename to " + path + " failed");
    }
}

} // namespace ouinv
