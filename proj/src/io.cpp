#include "entroq/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "entroq/errors.hpp"

namespace entroq::io {

namespace {

using nlohmann::json;

double number_at(const json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError(where + ": expected a number");
    return j.get<double>();
}

const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
    return *it;
}

double number_field(const json& j, const char* key, const std::string& where) {
    return number_at(field(j, key, where), where + "." + key);
}

int int_field(const json& j, const char* key, const std::string& where) {
    const json& v = field(j, key, where);
    if (!v.is_number_integer()) throw ParseError(where + "." + key + ": expected an integer");
    return v.get<int>();
}

Complex entry_from_pair(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError(where + ": complex entries are [re,im] pairs");
    return Complex(number_at(j[0], where + "[0]"), number_at(j[1], where + "[1]"));
}

bool is_perfect_square(std::size_t n, std::size_t& root) {
    root = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    return root * root == n;
}

}  // namespace

ComplexMatrix matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ParseError(where + ": matrix must be a nonempty array");
    const std::size_t outer = j.size();
    if (!j[0].is_array() || j[0].empty())
        throw ParseError(where + ": matrix rows must be nonempty arrays");

    if (j[0][0].is_array()) {
        // Rows of [re,im] entries.
        ComplexMatrix m(outer, outer);
        for (std::size_t r = 0; r < outer; ++r) {
            const std::string row_where = where + "[" + std::to_string(r) + "]";
            if (!j[r].is_array() || j[r].size() != outer)
                throw ParseError(row_where + ": expected " + std::to_string(outer) +
                                 " entries for a square matrix");
            for (std::size_t c = 0; c < outer; ++c)
                m(r, c) = entry_from_pair(j[r][c], row_where + "[" + std::to_string(c) + "]");
        }
        return m;
    }

    std::size_t inner = j[0].size();
    for (std::size_t r = 0; r < outer; ++r) {
        if (!j[r].is_array() || j[r].size() != inner)
            throw ParseError(where + "[" + std::to_string(r) + "]: ragged rows");
        for (std::size_t c = 0; c < inner; ++c)
            if (!j[r][c].is_number())
                throw ParseError(where + "[" + std::to_string(r) + "][" + std::to_string(c) +
                                 "]: expected a number");
    }
    if (inner == outer) {
        // Rows of real numbers.
        ComplexMatrix m(outer, outer);
        for (std::size_t r = 0; r < outer; ++r)
            for (std::size_t c = 0; c < outer; ++c)
                m(r, c) = Complex(j[r][c].get<double>(), 0.0);
        return m;
    }
    std::size_t dim = 0;
    if (inner == 2 && is_perfect_square(outer, dim)) {
        // Flat row-major [re,im] entries.
        ComplexMatrix m(dim, dim);
        for (std::size_t i = 0; i < outer; ++i)
            m(i / dim, i % dim) = Complex(j[i][0].get<double>(), j[i][1].get<double>());
        return m;
    }
    throw ParseError(where + ": expected square rows of numbers, rows of [re,im] pairs, or a "
                             "flat row-major [re,im] list of square length");
}

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

QuantumChannel channel_from_json(const json& j, const std::string& where) {
    const json& type = field(j, "type", where);
    if (!type.is_string()) throw ParseError(where + ".type: expected a string");
    const std::string name = type.get<std::string>();
    if (name == "depolarizing") {
        const double lambda = number_field(j, "lambda", where);
        const int dim = j.contains("dim") ? int_field(j, "dim", where) : 2;
        return QuantumChannel::depolarizing(lambda, dim);
    }
    if (name == "kraus") {
        const json& ops = field(j, "ops", where);
        if (!ops.is_array() || ops.empty())
            throw ParseError(where + ".ops: expected a nonempty array of matrices");
        std::vector<ComplexMatrix> mats;
        mats.reserve(ops.size());
        for (std::size_t i = 0; i < ops.size(); ++i)
            mats.push_back(matrix_from_json(ops[i], where + ".ops[" + std::to_string(i) + "]"));
        return QuantumChannel::kraus(std::move(mats));
    }
    if (name == "unitary")
        return QuantumChannel::unitary(matrix_from_json(field(j, "matrix", where), where + ".matrix"));
    throw ParseError(where + ".type: unknown channel type '" + name + "'");
}

NoiseSpec noise_from_json(const json& j, const std::string& where) {
    return NoiseSpec{number_field(j, "epsilon", where),
                     channel_from_json(field(j, "channel", where), where + ".channel")};
}

Circuit circuit_from_json(const json& j) {
    const std::string where = "circuit";
    const int num_qubits = int_field(j, "num_qubits", where);
    const json& layers = field(j, "layers", where);
    if (!layers.is_array()) throw ParseError(where + ".layers: expected an array");
    std::vector<GateLayer> parsed;
    parsed.reserve(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string layer_where = where + ".layers[" + std::to_string(l) + "]";
        const json& gates = field(layers[l], "gates", layer_where);
        if (!gates.is_array()) throw ParseError(layer_where + ".gates: expected an array");
        GateLayer layer;
        for (std::size_t g = 0; g < gates.size(); ++g) {
            const std::string gate_where = layer_where + ".gates[" + std::to_string(g) + "]";
            const json& targets = field(gates[g], "targets", gate_where);
            if (!targets.is_array() || targets.empty() || targets.size() > 2)
                throw ParseError(gate_where + ".targets: expected 1 or 2 qubit indices");
            Gate gate;
            for (std::size_t t = 0; t < targets.size(); ++t) {
                if (!targets[t].is_number_integer())
                    throw ParseError(gate_where + ".targets[" + std::to_string(t) +
                                     "]: expected an integer");
                gate.targets.push_back(targets[t].get<int>());
            }
            gate.matrix = matrix_from_json(field(gates[g], "matrix", gate_where),
                                           gate_where + ".matrix");
            layer.gates.push_back(std::move(gate));
        }
        parsed.push_back(std::move(layer));
    }
    const int gate_bound = j.contains("gate_bound") ? int_field(j, "gate_bound", where) : 0;
    return Circuit(num_qubits, std::move(parsed), gate_bound);
}

LayoutSpec layout_from_json(const json& j, const std::string& where) {
    LayoutSpec spec;
    spec.n = int_field(j, "n", where);
    spec.k = int_field(j, "k", where);
    spec.d = int_field(j, "d", where);
    spec.lambda = number_field(j, "lambda", where);
    spec.seed = 0;
    if (j.contains("seed")) {
        const json& s = j["seed"];
        if (!s.is_number_integer() || s.get<std::int64_t>() < 0)
            throw ParseError(where + ".seed: expected a nonnegative integer");
        spec.seed = s.get<std::uint64_t>();
    }
    return spec;
}

json parse_json_text(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(where + ": " + e.what());
    }
}

json load_json_arg(const std::string& arg, const std::string& where) {
    if (!arg.empty() && (arg.front() == '{' || arg.front() == '['))
        return parse_json_text(arg, where);
    std::ifstream in(arg);
    if (!in) throw ParseError(where + ": cannot open file '" + arg + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str(), where + " (" + arg + ")");
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& params,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows) {
    for (const auto& [key, value] : params) os << "# " << key << " = " << value << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        os << columns[i] << (i + 1 < columns.size() ? "," : "");
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? "," : "");
        os << "\n";
    }
}

}  // namespace entroq::io
