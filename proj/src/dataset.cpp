#include "pcot/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pcot/errors.hpp"

namespace pcot {

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    Dataset data;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        size_t start = 0;
        while (start <= line.size()) {
            size_t comma = line.find(',', start);
            std::string_view cell(line.data() + start,
                                  (comma == std::string::npos ? line.size() : comma) - start);
            double v;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size())
                throw FormatError(path + ":" + std::to_string(lineno) + ": bad number '" + std::string(cell) + "'");
            row.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!data.empty() && row.size() != data[0].size())
            throw FormatError(path + ":" + std::to_string(lineno) + ": ragged row");
        data.push_back(std::move(row));
    }
    if (data.empty()) throw FormatError(path + ": empty dataset");
    return data;
}

void save_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    std::ostringstream ss;
    ss.precision(17);
    for (const auto& row : data) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) ss << ',';
            ss << row[i];
        }
        ss << '\n';
    }
    out << ss.str();
}

} // namespace pcot
