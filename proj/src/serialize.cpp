#include "crng/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "crng/experiment.hpp"

namespace crng {
namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("missing field: ") + key);
  return j.at(key);
}

std::vector<Variable> variables_from_json(const Json& j) {
  std::vector<Variable> vars;
  for (const auto& v : j)
    vars.push_back({field(v, "name").get<std::string>(), field(v, "size").get<uint32_t>()});
  return vars;
}

Json variables_to_json(const std::vector<Variable>& vars) {
  Json arr = Json::array();
  for (const auto& v : vars) arr.push_back({{"name", v.name}, {"size", v.size}});
  return arr;
}

}  // namespace

Json to_json(const FieldMatrix& m) {
  Json coords = Json::array();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (m.at(r, c) != 0) coords.push_back({r, c, m.at(r, c)});
  return {{"q", m.modulus()}, {"rows", m.rows()}, {"cols", m.cols()}, {"coords", coords}};
}

FieldMatrix matrix_from_json(const Json& j) {
  FieldMatrix m(field(j, "q").get<uint32_t>(), field(j, "rows").get<int>(),
                field(j, "cols").get<int>());
  for (const auto& entry : field(j, "coords")) {
    if (!entry.is_array() || entry.size() != 3) throw SchemaError("coords entries are [r,c,val]");
    m.set(entry[0].get<int>(), entry[1].get<int>(), entry[2].get<uint32_t>());
  }
  return m;
}

Json to_json(const FieldVector& v) {
  return {{"q", v.modulus()}, {"values", v.values()}};
}

FieldVector vector_from_json(const Json& j) {
  return FieldVector(field(j, "q").get<uint32_t>(),
                     field(j, "values").get<std::vector<uint32_t>>());
}

Json to_json(const JointPMF& p) {
  return {{"variables", variables_to_json(p.variables())}, {"probs", p.probs()}};
}

JointPMF pmf_from_json(const Json& j) {
  return JointPMF(variables_from_json(field(j, "variables")),
                  field(j, "probs").get<std::vector<double>>());
}

Json to_json(const ConditionalKernel& k) {
  Json rows = Json::array();
  for (uint64_t i = 0; i < k.input_cells(); ++i) rows.push_back(k.row_by_index(i));
  return {{"inputs", variables_to_json(k.input_variables())},
          {"outputs", variables_to_json(k.output_variables())},
          {"rows", rows}};
}

ConditionalKernel kernel_from_json(const Json& j) {
  std::vector<std::vector<double>> rows;
  for (const auto& row : field(j, "rows")) rows.push_back(row.get<std::vector<double>>());
  return ConditionalKernel(variables_from_json(field(j, "inputs")),
                           variables_from_json(field(j, "outputs")), std::move(rows));
}

Json to_json(const Polytope& p) {
  Json ineqs = Json::array();
  for (const auto& ineq : p.inequalities) {
    Json coeffs = Json::object();
    for (const auto& [name, c] : ineq.coeffs) {
      if (c.den() == 1)
        coeffs[name] = c.num();
      else
        coeffs[name] = Json::array({c.num(), c.den()});
    }
    Json row = {{"coeffs", coeffs}, {"bound", ineq.bound}};
    if (!ineq.provenance.empty()) row["provenance"] = ineq.provenance;
    ineqs.push_back(std::move(row));
  }
  return {{"vars", p.variables}, {"ineqs", ineqs}};
}

Polytope polytope_from_json(const Json& j) {
  Polytope p;
  p.variables = field(j, "vars").get<std::vector<std::string>>();
  for (const auto& row : field(j, "ineqs")) {
    LinearInequality ineq;
    for (const auto& [name, c] : field(row, "coeffs").items()) {
      if (c.is_array())
        ineq.coeffs[name] = Rational(c[0].get<int64_t>(), c[1].get<int64_t>());
      else
        ineq.coeffs[name] = Rational(c.get<int64_t>());
    }
    ineq.bound = field(row, "bound").get<double>();
    if (row.contains("provenance")) ineq.provenance = row["provenance"].get<std::string>();
    p.inequalities.push_back(std::move(ineq));
  }
  return p;
}

Json to_json(const EnsembleSpec& spec) {
  const char* kind = nullptr;
  switch (spec.kind) {
    case EnsembleKind::UniformLinear: kind = "uniform-linear"; break;
    case EnsembleKind::SparseColumnWeight: kind = "sparse-column-weight"; break;
    case EnsembleKind::RandomBinningTable: kind = "random-binning-table"; break;
  }
  Json j = {{"kind", kind}, {"q", spec.q}, {"rows", spec.rows}, {"cols", spec.cols}};
  if (spec.kind == EnsembleKind::SparseColumnWeight) j["column_weight"] = spec.column_weight;
  return j;
}

EnsembleSpec ensemble_from_json(const Json& j) {
  EnsembleSpec spec;
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "uniform-linear")
    spec.kind = EnsembleKind::UniformLinear;
  else if (kind == "sparse-column-weight")
    spec.kind = EnsembleKind::SparseColumnWeight;
  else if (kind == "random-binning-table")
    spec.kind = EnsembleKind::RandomBinningTable;
  else
    throw SchemaError("unknown ensemble kind: " + kind);
  spec.q = field(j, "q").get<uint32_t>();
  spec.rows = field(j, "rows").get<int>();
  spec.cols = field(j, "cols").get<int>();
  if (j.contains("column_weight")) spec.column_weight = j["column_weight"].get<int>();
  spec.validate();
  return spec;
}

namespace {

Json decoder_to_json(const SourceDecoder& dec, const std::vector<std::string>& names) {
  Json decodes = Json::array();
  for (int si : dec.decode_set) decodes.push_back(names[static_cast<size_t>(si)]);
  return {{"decodes", decodes}, {"side_info", dec.side_info}};
}

SourceDecoder decoder_from_json(const Json& j, const std::vector<std::string>& names) {
  SourceDecoder dec;
  for (const auto& name : field(j, "decodes")) {
    const std::string s = name.get<std::string>();
    auto it = std::find(names.begin(), names.end(), s);
    if (it == names.end()) throw SchemaError("decoder references unknown source: " + s);
    dec.decode_set.push_back(static_cast<int>(it - names.begin()));
  }
  if (j.contains("side_info")) dec.side_info = j["side_info"].get<std::vector<std::string>>();
  return dec;
}

}  // namespace

Json to_json(const SourceCodeSpec& spec) {
  Json encoders = Json::array();
  for (const auto& f : spec.encoders) encoders.push_back(to_json(f));
  Json decoders = Json::array();
  for (const auto& d : spec.decoders) decoders.push_back(decoder_to_json(d, spec.sources));
  return {{"n", spec.n},       {"q", spec.q},           {"sources", spec.sources},
          {"encoders", encoders}, {"decoders", decoders}, {"letter", to_json(spec.letter)}};
}

SourceCodeSpec source_spec_from_json(const Json& j) {
  SourceCodeSpec spec;
  spec.n = field(j, "n").get<int>();
  spec.q = field(j, "q").get<uint32_t>();
  spec.sources = field(j, "sources").get<std::vector<std::string>>();
  for (const auto& m : field(j, "encoders")) spec.encoders.push_back(matrix_from_json(m));
  for (const auto& d : field(j, "decoders"))
    spec.decoders.push_back(decoder_from_json(d, spec.sources));
  spec.letter = pmf_from_json(field(j, "letter"));
  spec.validate();
  return spec;
}

Json to_json(const ChannelCodeSpec& spec) {
  Json f = Json::array(), g = Json::array(), c = Json::array();
  for (const auto& m : spec.f) f.push_back(to_json(m));
  for (const auto& m : spec.g) g.push_back(to_json(m));
  for (const auto& v : spec.c) c.push_back(to_json(v));
  Json encoders = Json::array();
  for (size_t i = 0; i < spec.encoder_sources.size(); ++i) {
    Json sources = Json::array();
    for (int mi : spec.encoder_sources[i])
      sources.push_back(spec.messages[static_cast<size_t>(mi)]);
    encoders.push_back({{"sources", sources}, {"kernel", to_json(spec.input_kernels[i])}});
  }
  Json decoders = Json::array();
  for (const auto& d : spec.decode_specs) decoders.push_back(decoder_to_json(d, spec.messages));
  return {{"n", spec.n},
          {"q", spec.q},
          {"messages", spec.messages},
          {"f", f},
          {"g", g},
          {"c", c},
          {"encoders", encoders},
          {"prior", to_json(spec.z_prior_letter)},
          {"channel", to_json(spec.channel)},
          {"decoders", decoders}};
}

ChannelCodeSpec channel_spec_from_json(const Json& j) {
  ChannelCodeSpec spec;
  spec.n = field(j, "n").get<int>();
  spec.q = field(j, "q").get<uint32_t>();
  spec.messages = field(j, "messages").get<std::vector<std::string>>();
  for (const auto& m : field(j, "f")) spec.f.push_back(matrix_from_json(m));
  for (const auto& m : field(j, "g")) spec.g.push_back(matrix_from_json(m));
  for (const auto& v : field(j, "c")) spec.c.push_back(vector_from_json(v));
  for (const auto& enc : field(j, "encoders")) {
    std::vector<int> group;
    for (const auto& name : field(enc, "sources")) {
      const std::string s = name.get<std::string>();
      auto it = std::find(spec.messages.begin(), spec.messages.end(), s);
      if (it == spec.messages.end()) throw SchemaError("encoder references unknown message: " + s);
      group.push_back(static_cast<int>(it - spec.messages.begin()));
    }
    spec.encoder_sources.push_back(std::move(group));
    spec.input_kernels.push_back(kernel_from_json(field(enc, "kernel")));
  }
  spec.z_prior_letter = pmf_from_json(field(j, "prior"));
  spec.channel = kernel_from_json(field(j, "channel"));
  for (const auto& d : field(j, "decoders"))
    spec.decode_specs.push_back(decoder_from_json(d, spec.messages));
  spec.validate();
  return spec;
}

std::string format_double(double x) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), x);
  return std::string(buffer, result.ptr);
}

std::string config_hash(const Json& config) {
  const std::string dump = config.dump();  // object keys are already sorted
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buffer, 16);
}

}  // namespace crng
