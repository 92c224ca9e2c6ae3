#pragma once

#include <string>

#include <json.hpp>

#include "crng/channel_code.hpp"
#include "crng/ensemble.hpp"
#include "crng/matrix.hpp"
#include "crng/pmf.hpp"
#include "crng/regions.hpp"
#include "crng/source_code.hpp"

namespace crng {

using Json = nlohmann::json;

// Matrices travel as sparse coordinate lists sorted row-major:
// {q, rows, cols, coords: [[r, c, val], ...]}.
Json to_json(const FieldMatrix& m);
FieldMatrix matrix_from_json(const Json& j);

Json to_json(const FieldVector& v);
FieldVector vector_from_json(const Json& j);

// {variables: [{name, size}], probs: [...]} row-major.
Json to_json(const JointPMF& p);
JointPMF pmf_from_json(const Json& j);

// {inputs: [{name, size}], outputs: [{name, size}], rows: [[...]]}.
Json to_json(const ConditionalKernel& k);
ConditionalKernel kernel_from_json(const Json& j);

// {vars: [...], ineqs: [{coeffs: {var: num | [num, den]}, bound}]}.
Json to_json(const Polytope& p);
Polytope polytope_from_json(const Json& j);

Json to_json(const EnsembleSpec& spec);
EnsembleSpec ensemble_from_json(const Json& j);

Json to_json(const SourceCodeSpec& spec);
SourceCodeSpec source_spec_from_json(const Json& j);

Json to_json(const ChannelCodeSpec& spec);
ChannelCodeSpec channel_spec_from_json(const Json& j);

// Shortest round-trip decimal form; the CSV emitters use it so reruns are
// byte-identical.
std::string format_double(double x);

// Stable 64-bit FNV-1a over the canonical (key-sorted) dump.
std::string config_hash(const Json& config);

}  // namespace crng
