#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vesselkit/interp.hpp"

namespace vesselkit::io {

using nlohmann::json;

// Complex values are [re, im]; a bare number is a real value.
json to_json(cplx z);
json to_json(const CMatrix& m); // array of rows
cplx complex_from(const json& j, const char* what);
CMatrix matrix_from(const json& j, const char* what);
CRow row_from(const json& j, const char* what);

json to_json(const Realization& r);
Realization realization_from(const json& j);
json to_json(const ODEGrid& g);
// Missing fields fall back to fallback.
ODEGrid grid_from(const json& j, const ODEGrid& fallback);

// {"model": "sl" | "nls" | "constant", "interval": [a, b], "sigma1", "sigma2", "gamma"}
VesselParams params_from(const json& j);
std::vector<InterpNode> nodes_from(const json& j);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string dump(const json& j); // two-space indent, trailing LF

// Shortest round-trip decimal.
std::string format_double(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(const std::vector<double>& row);
    std::string str() const;

    // appends "name_re", "name_im" for each entry of an r x c matrix, row-major
    static void matrix_columns(std::vector<std::string>& header, const std::string& name, Eigen::Index rows,
                               Eigen::Index cols);
    static void append_matrix(std::vector<double>& row, const CMatrix& m);

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

} // namespace vesselkit::io
