#include "qcc/statefile.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace qcc {

namespace {

using nlohmann::json;

std::vector<int> read_dims(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].empty())
        throw ParseError(std::string("missing or empty \"") + key + "\"");
    std::vector<int> dims;
    for (const auto& v : j[key]) {
        if (!v.is_number_integer() || v.get<long long>() < 1)
            throw ParseError(std::string("\"") + key + "\" entries must be positive integers");
        dims.push_back(v.get<int>());
    }
    return dims;
}

Matrix read_matrix(const json& j, int dim) {
    if (!j.contains("re") || !j.contains("im"))
        throw ParseError("missing \"re\" or \"im\"");
    const auto& re = j["re"];
    const auto& im = j["im"];
    if (!re.is_array() || !im.is_array() || int(re.size()) != dim || int(im.size()) != dim)
        throw ParseError("\"re\"/\"im\" must be dim x dim arrays");
    Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        const auto& rr = re[r];
        const auto& ri = im[r];
        if (!rr.is_array() || !ri.is_array() || int(rr.size()) != dim || int(ri.size()) != dim)
            throw ParseError("\"re\"/\"im\" must be dim x dim arrays");
        for (int c = 0; c < dim; ++c) {
            if (!rr[c].is_number() || !ri[c].is_number())
                throw ParseError("matrix entries must be numbers");
            m(r, c) = Complex(rr[c].get<double>(), ri[c].get<double>());
        }
    }
    return m;
}

json matrix_to_json(const Matrix& m, bool imag) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c)
            row.push_back(imag ? m(r, c).imag() : m(r, c).real());
        rows.push_back(std::move(row));
    }
    return rows;
}

Vector read_vector(const json& j, const char* re_key, const char* im_key) {
    if (!j.contains(re_key) || !j.contains(im_key))
        throw ParseError(std::string("term missing \"") + re_key + "\"/\"" + im_key + "\"");
    const auto& re = j[re_key];
    const auto& im = j[im_key];
    if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.empty())
        throw ParseError("term vectors must be equal-length nonempty arrays");
    Vector v(re.size());
    for (size_t i = 0; i < re.size(); ++i) {
        if (!re[i].is_number() || !im[i].is_number())
            throw ParseError("term vector entries must be numbers");
        v[long(i)] = Complex(re[i].get<double>(), im[i].get<double>());
    }
    return v;
}

json vector_to_json(const Vector& v, bool imag) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(imag ? v[i].imag() : v[i].real());
    return arr;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

} // namespace

DensityMatrix parse_state(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    const std::vector<int> da = read_dims(j, "dims_a");
    const std::vector<int> db = read_dims(j, "dims_b");
    std::vector<int> dims = da;
    dims.insert(dims.end(), db.begin(), db.end());
    long long total = 1;
    for (int d : dims) total *= d;
    if (total > 4096) throw ParseError("state dimension too large");
    Matrix m = read_matrix(j, int(total));
    return DensityMatrix::make(std::move(m), std::move(dims), int(da.size()));
}

std::string serialize_state(const DensityMatrix& rho) {
    json j;
    j["dims_a"] = rho.dims_a();
    j["dims_b"] = rho.dims_b();
    j["re"] = matrix_to_json(rho.mat(), false);
    j["im"] = matrix_to_json(rho.mat(), true);
    return j.dump() + "\n";
}

DensityMatrix load_state(const std::string& path) { return parse_state(read_file(path)); }

void save_state(const std::string& path, const DensityMatrix& rho) {
    write_file(path, serialize_state(rho));
}

SeparableDecomposition parse_decomposition(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty())
        throw ParseError("missing or empty \"terms\"");
    SeparableDecomposition dec;
    for (const auto& t : j["terms"]) {
        if (!t.contains("weight") || !t["weight"].is_number())
            throw ParseError("term missing numeric \"weight\"");
        SeparableDecomposition::Term term;
        term.weight = t["weight"].get<double>();
        term.alpha = read_vector(t, "alpha_re", "alpha_im");
        term.beta = read_vector(t, "beta_re", "beta_im");
        dec.terms.push_back(std::move(term));
    }
    const int da = dec.dim_a(), db = dec.dim_b();
    for (const auto& term : dec.terms)
        if (int(term.alpha.size()) != da || int(term.beta.size()) != db)
            throw ParseError("terms have inconsistent dimensions");
    return dec;
}

std::string serialize_decomposition(const SeparableDecomposition& dec) {
    json terms = json::array();
    for (const auto& t : dec.terms) {
        json jt;
        jt["weight"] = t.weight;
        jt["alpha_re"] = vector_to_json(t.alpha, false);
        jt["alpha_im"] = vector_to_json(t.alpha, true);
        jt["beta_re"] = vector_to_json(t.beta, false);
        jt["beta_im"] = vector_to_json(t.beta, true);
        terms.push_back(std::move(jt));
    }
    json j;
    j["terms"] = std::move(terms);
    return j.dump() + "\n";
}

SeparableDecomposition load_decomposition(const std::string& path) {
    return parse_decomposition(read_file(path));
}

void save_decomposition(const std::string& path, const SeparableDecomposition& dec) {
    write_file(path, serialize_decomposition(dec));
}

} // namespace qcc
