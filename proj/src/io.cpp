#include "vesselkit/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "vesselkit/models.hpp"

namespace vesselkit::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); }

double number(const json& j, const std::string& what) {
    if (!j.is_number()) bad(what + ": expected a number");
    return j.get<double>();
}

} // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

cplx complex_from(const json& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    bad(std::string(what) + ": expected a number or [re, im]");
}

CMatrix matrix_from(const json& j, const char* what) {
    if (!j.is_array()) bad(std::string(what) + ": expected an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return CMatrix(0, 0);
    if (!j[0].is_array()) bad(std::string(what) + ": expected an array of rows");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            bad(std::string(what) + ": ragged rows");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from(row[static_cast<std::size_t>(k)], what);
    }
    return m;
}

CRow row_from(const json& j, const char* what) {
    if (!j.is_array()) bad(std::string(what) + ": expected an array");
    CRow r(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) r(static_cast<Eigen::Index>(k)) = complex_from(j[k], what);
    return r;
}

json to_json(const Realization& r) {
    return {{"a1", to_json(r.a1)}, {"b", to_json(r.b)}, {"x", to_json(r.x)}, {"sigma1", to_json(r.sigma1)}};
}

Realization realization_from(const json& j) {
    if (!j.is_object()) bad("realization: expected an object");
    for (const char* key : {"a1", "b", "x", "sigma1"})
        if (!j.contains(key)) bad(std::string("realization: missing ") + key);
    Realization r;
    r.a1 = matrix_from(j["a1"], "realization.a1");
    r.b = matrix_from(j["b"], "realization.b");
    r.x = matrix_from(j["x"], "realization.x");
    r.sigma1 = matrix_from(j["sigma1"], "realization.sigma1");
    // empty state space: shapes follow sigma1
    if (r.a1.size() == 0) {
        r.b = CMatrix(0, r.sigma1.rows());
        r.x = CMatrix(0, 0);
    }
    r.validate();
    return r;
}

json to_json(const ODEGrid& g) { return {{"t_start", g.t_start}, {"t_end", g.t_end}, {"steps", g.steps}}; }

ODEGrid grid_from(const json& j, const ODEGrid& fallback) {
    ODEGrid g = fallback;
    if (j.is_null()) return g;
    if (!j.is_object()) bad("grid: expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "t_start") g.t_start = number(*it, "grid.t_start");
        else if (it.key() == "t_end") g.t_end = number(*it, "grid.t_end");
        else if (it.key() == "steps") {
            if (!it->is_number_unsigned() || it->get<std::size_t>() == 0) bad("grid.steps: expected a positive integer");
            g.steps = it->get<std::size_t>();
        } else bad("grid: unknown field " + it.key());
    }
    try {
        g.validate();
    } catch (const Error& e) {
        bad(std::string("grid: ") + e.what());
    }
    return g;
}

VesselParams params_from(const json& j) {
    if (!j.is_object()) bad("params: expected an object");
    double a = 0.0, b = 1.0;
    if (j.contains("interval")) {
        const json& iv = j["interval"];
        if (!iv.is_array() || iv.size() != 2) bad("params.interval: expected [a, b]");
        a = number(iv[0], "params.interval");
        b = number(iv[1], "params.interval");
        if (!(a < b)) bad("params.interval: need a < b");
    }
    const std::string model = j.value("model", std::string("constant"));
    VesselParams p;
    if (model == "sl") {
        p = sl_vessel_params(a, b);
    } else if (model == "nls") {
        p = nls_vessel_params(a, b);
    } else if (model == "constant") {
        for (const char* key : {"sigma1", "sigma2", "gamma"})
            if (!j.contains(key)) bad(std::string("params: missing ") + key);
        p = VesselParams::constant(a, b, matrix_from(j["sigma1"], "params.sigma1"),
                                   matrix_from(j["sigma2"], "params.sigma2"), matrix_from(j["gamma"], "params.gamma"));
    } else {
        bad("params.model: unknown model " + model);
    }
    try {
        p.validate();
    } catch (const Error& e) {
        bad(std::string("params: ") + e.what());
    }
    return p;
}

std::vector<InterpNode> nodes_from(const json& j) {
    if (!j.is_array()) bad("nodes: expected an array");
    std::vector<InterpNode> out;
    for (const json& n : j) {
        if (!n.is_object() || !n.contains("w") || !n.contains("xi") || !n.contains("eta"))
            bad("nodes: each node needs w, xi, eta");
        InterpNode node;
        node.w = complex_from(n["w"], "node.w");
        node.xi = row_from(n["xi"], "node.xi");
        node.eta = row_from(n["eta"], "node.eta");
        node.t2 = n.contains("t2") ? number(n["t2"], "node.t2") : 0.0;
        out.push_back(std::move(node));
    }
    return out;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IOFailure, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        bad(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IOFailure, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::IOFailure, "write failed for " + path.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& row) {
    if (row.size() != header_.size()) throw Error(ErrorKind::DimensionMismatch, "CSV row width differs from header");
    rows_.push_back(row);
}

std::string CsvTable::str() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < header_.size(); ++k) os << (k ? "," : "") << header_[k];
    os << '\n';
    for (const auto& row : rows_) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << format_double(row[k]);
        os << '\n';
    }
    return os.str();
}

void CsvTable::matrix_columns(std::vector<std::string>& header, const std::string& name, Eigen::Index rows,
                              Eigen::Index cols) {
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index k = 0; k < cols; ++k) {
            const std::string base = name + "_" + std::to_string(i + 1) + "_" + std::to_string(k + 1);
            header.push_back(base + "_re");
            header.push_back(base + "_im");
        }
}

void CsvTable::append_matrix(std::vector<double>& row, const CMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            row.push_back(m(i, k).real());
            row.push_back(m(i, k).imag());
        }
}

} // namespace vesselkit::io
