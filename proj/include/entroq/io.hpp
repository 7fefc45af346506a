#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "entroq/channels.hpp"
#include "entroq/linalg.hpp"
#include "entroq/simulator.hpp"
#include "entroq/spatial.hpp"

namespace entroq::io {

// Accepted matrix shapes, all row-major:
//   - rows of [re,im] entries: [[[1,0],[0,0]],[[0,0],[1,0]]]
//   - rows of real numbers:    [[1,0],[0,1]]
//   - flat [re,im] entries of square count: [[1,0],[0,0],[0,0],[1,0]]
// `where` prefixes every error message with the field path.
ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json matrix_to_json(const ComplexMatrix& m);

// {"type":"depolarizing","lambda":0.1,"dim":2} (dim optional),
// {"type":"kraus","ops":[matrix,...]}, or {"type":"unitary","matrix":...}.
QuantumChannel channel_from_json(const nlohmann::json& j, const std::string& where);

struct NoiseSpec {
    double epsilon;
    QuantumChannel channel;
};
// {"epsilon":0.05,"channel":{...}}; the qubit count is bound by the caller.
NoiseSpec noise_from_json(const nlohmann::json& j, const std::string& where);

// {"num_qubits":4,"layers":[{"gates":[{"targets":[0],"matrix":...},...]},...],
//  "gate_bound":4}  (gate_bound optional)
Circuit circuit_from_json(const nlohmann::json& j);

struct LayoutSpec {
    int n;
    int k;
    int d;
    double lambda;
    std::uint64_t seed;
};
// {"n":3,"k":2,"d":1,"lambda":0.5,"seed":7} (seed optional, default 0)
LayoutSpec layout_from_json(const nlohmann::json& j, const std::string& where);

// Wraps nlohmann parse failures into ParseError.
nlohmann::json parse_json_text(const std::string& text, const std::string& where);

// Inline JSON when the argument starts with '{' or '[', else a file path.
nlohmann::json load_json_arg(const std::string& arg, const std::string& where);

// 17 significant digits; round-trips every double exactly.
std::string fmt17(double x);

// '#'-prefixed parameter lines, a column-name row, then data rows.
void write_csv(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& params,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace entroq::io
