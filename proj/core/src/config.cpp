#include "spocb/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace spocb {

namespace {

using nlohmann::json;

Matrix matrix_from_json(const json& j, const char* key, Index rows, Index cols) {
    if (!j.contains(key)) {
        throw SchemaError(std::string("missing matrix key: ") + key);
    }
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != static_cast<size_t>(rows)) {
        throw SchemaError(std::string("matrix ") + key + ": expected " +
                          std::to_string(rows) + " rows");
    }
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const json& row = v.at(static_cast<size_t>(i));
        if (!row.is_array() || row.size() != static_cast<size_t>(cols)) {
            throw SchemaError(std::string("matrix ") + key + ": row " + std::to_string(i) +
                              " must have " + std::to_string(cols) + " entries");
        }
        for (Index jcol = 0; jcol < cols; ++jcol) {
            const json& e = row.at(static_cast<size_t>(jcol));
            if (!e.is_number()) {
                throw SchemaError(std::string("matrix ") + key + ": non-numeric entry");
            }
            M(i, jcol) = e.get<double>();
        }
    }
    return M;
}

json matrix_to_json(const Matrix& M) {
    json rows = json::array();
    for (Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < M.cols(); ++j) {
            row.push_back(M(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

ProblemConfig parse_problem_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("problem file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw SchemaError("problem file must be a JSON object");
    }

    ProblemConfig c;
    try {
        if (!j.contains("dims") || !j["dims"].is_object()) {
            throw SchemaError("missing dims object");
        }
        const json& d = j["dims"];
        for (const char* key : {"m", "n", "k"}) {
            if (!d.contains(key) || !d[key].is_number_integer()) {
                throw SchemaError(std::string("dims.") + key + " must be an integer");
            }
        }
        c.m = d["m"].get<Index>();
        c.n = d["n"].get<Index>();
        c.k = d["k"].get<Index>();
        if (c.m < 1 || c.n < 0 || c.k < 1) {
            throw SchemaError("dims require m >= 1, n >= 0, k >= 1");
        }
        if (!j.contains("epsilon") || !j["epsilon"].is_number()) {
            throw SchemaError("missing numeric epsilon");
        }
        c.epsilon = j["epsilon"].get<double>();
        c.horizon = j.value("horizon", 1.0);

        c.A11 = matrix_from_json(j, "A11", c.m, c.m);
        c.A12 = matrix_from_json(j, "A12", c.m, c.n);
        c.A21 = matrix_from_json(j, "A21", c.n, c.m);
        c.A22 = matrix_from_json(j, "A22", c.n, c.n);
        c.b1 = matrix_from_json(j, "b1", c.m, c.k);
        c.b2 = matrix_from_json(j, "b2", c.n, c.k);
        c.Q = matrix_from_json(j, "Q", c.m + c.n, c.m + c.n);
        c.R = matrix_from_json(j, "R", c.k, c.k);
        c.pi11 = matrix_from_json(j, "pi11", c.m, c.m);
        c.pi12 = matrix_from_json(j, "pi12", c.m, c.n);
        c.pi22 = matrix_from_json(j, "pi22", c.n, c.n);

        if (!j.contains("z0") || !j["z0"].is_array() ||
            j["z0"].size() != static_cast<size_t>(c.m + c.n)) {
            throw SchemaError("z0 must be an array of length m+n");
        }
        c.z0 = Vector(c.m + c.n);
        for (Index i = 0; i < c.m + c.n; ++i) {
            c.z0[i] = j["z0"].at(static_cast<size_t>(i)).get<double>();
        }

        if (j.contains("options")) {
            const json& o = j["options"];
            c.tol = o.value("tol", c.tol);
            c.grid_min = o.value("grid_min", c.grid_min);
            if (o.contains("eps_sweep")) {
                for (const auto& e : o["eps_sweep"]) {
                    c.eps_sweep.push_back(e.get<double>());
                }
            }
            c.out_dir = o.value("out", c.out_dir);
            if (o.contains("eps")) {
                c.eps_override = o["eps"].get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("problem file schema error: ") + e.what());
    }
    return c;
}

ProblemConfig load_problem_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open problem file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_json(buf.str());
}

SpLqProblem load_problem_file(const std::string& path) {
    ProblemConfig c = load_problem_config(path);
    if (c.eps_override) {
        c.epsilon = *c.eps_override;
    }
    return build_problem(c);
}

std::string config_to_json(const ProblemConfig& c) {
    json j;
    j["dims"] = {{"m", c.m}, {"n", c.n}, {"k", c.k}};
    j["epsilon"] = c.epsilon;
    j["horizon"] = c.horizon;
    j["A11"] = matrix_to_json(c.A11);
    j["A12"] = matrix_to_json(c.A12);
    j["A21"] = matrix_to_json(c.A21);
    j["A22"] = matrix_to_json(c.A22);
    j["b1"] = matrix_to_json(c.b1);
    j["b2"] = matrix_to_json(c.b2);
    j["Q"] = matrix_to_json(c.Q);
    j["R"] = matrix_to_json(c.R);
    j["pi11"] = matrix_to_json(c.pi11);
    j["pi12"] = matrix_to_json(c.pi12);
    j["pi22"] = matrix_to_json(c.pi22);
    json z = json::array();
    for (Index i = 0; i < c.z0.size(); ++i) z.push_back(c.z0[i]);
    j["z0"] = std::move(z);
    return j.dump(2) + "\n";
}

std::string problem_to_json(const SpLqProblem& p) {
    ProblemConfig c;
    c.m = p.m; c.n = p.n; c.k = p.k;
    c.epsilon = p.epsilon;
    c.horizon = p.horizon;
    c.A11 = p.A11; c.A12 = p.A12; c.A21 = p.A21; c.A22 = p.A22;
    c.b1 = p.b1; c.b2 = p.b2;
    c.Q = p.Q; c.R = p.R;
    c.pi11 = p.pi11; c.pi12 = p.pi12; c.pi22 = p.pi22;
    c.z0 = p.z0;
    return config_to_json(c);
}

} // namespace spocb
