#include "crng/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "crng/hashing.hpp"
#include "crng/linprog.hpp"
#include "crng/serialize.hpp"
#include "crng/spectral.hpp"

namespace crng {
namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("missing field: ") + key);
  return j.at(key);
}

std::string string_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw SchemaError(std::string(key) + " must be a string");
  return v.get<std::string>();
}

uint64_t seed_of(const Json& config) {
  const Json& s = field(config, "seed");
  if (!s.is_number_integer() && !s.is_number_unsigned())
    throw SchemaError("seed must be an integer");
  return s.get<uint64_t>();
}

void write_output(const Json& config, const std::string& text) {
  if (!config.contains("output")) return;
  const std::string path = config["output"].get<std::string>();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

// Deterministic fan-out of Monte Carlo trials: trial i always runs on
// Rng::derived(seed, i), so the flag vector is independent of the worker
// count and the CSV bytes never change.
std::vector<uint8_t> run_trials(uint64_t trials, uint64_t seed, int workers,
                                const std::function<bool(uint64_t, Rng&)>& trial_fn) {
  std::vector<uint8_t> flags(trials, 0);
  const int nw = std::max(1, workers);
  if (nw == 1) {
    for (uint64_t i = 0; i < trials; ++i) {
      Rng rng = Rng::derived(seed, i);
      flags[i] = trial_fn(i, rng) ? 1 : 0;
    }
    return flags;
  }
  std::vector<std::thread> pool;
  std::atomic<uint64_t> next{0};
  for (int w = 0; w < nw; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const uint64_t i = next.fetch_add(1);
        if (i >= trials) return;
        Rng rng = Rng::derived(seed, i);
        flags[i] = trial_fn(i, rng) ? 1 : 0;
      }
    });
  }
  for (auto& t : pool) t.join();
  return flags;
}

struct CsvWriter {
  std::ostringstream rows;
  std::string config_id;
  std::string kind;

  CsvWriter(const Json& config, std::string kind_name) : kind(std::move(kind_name)) {
    // the hash identifies the experiment, not the destination file
    Json canonical = config;
    canonical.erase("output");
    config_id = config_hash(canonical);
    rows << "config,kind,params,metric,value,ci_low,ci_high\n";
  }

  void add(const std::string& params, const std::string& metric, double value, double ci_low,
           double ci_high) {
    rows << config_id << "," << kind << "," << params << "," << metric << ","
         << format_double(value) << "," << format_double(ci_low) << ","
         << format_double(ci_high) << "\n";
  }
  void add(const std::string& params, const std::string& metric, double value) {
    add(params, metric, value, value, value);
  }
};

// ---------------------------------------------------------------- region --

// Tight per-variable intervals via LP, for the human-readable summary.
std::string interval_summary(const Polytope& poly) {
  std::ostringstream os;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::map<std::string, size_t> var_index;
  for (size_t i = 0; i < poly.variables.size(); ++i) var_index[poly.variables[i]] = i;
  for (const auto& ineq : poly.inequalities) {
    std::vector<double> row(poly.variables.size(), 0.0);
    for (const auto& [name, c] : ineq.coeffs) row[var_index.at(name)] = c.to_double();
    a.push_back(row);
    b.push_back(ineq.bound);
  }
  for (size_t v = 0; v < poly.variables.size(); ++v) {
    std::vector<double> up(poly.variables.size(), 0.0), down(poly.variables.size(), 0.0);
    up[v] = 1.0;
    down[v] = -1.0;
    const LpResult hi = lp_maximize(a, b, up);
    const LpResult lo = lp_maximize(a, b, down);
    os << (lo.status == LpStatus::Optimal ? format_double(-lo.value) : std::string("-inf"))
       << " <= " << poly.variables[v] << " <= "
       << (hi.status == LpStatus::Optimal ? format_double(hi.value) : std::string("inf")) << "\n";
  }
  return os.str();
}

std::vector<DecoderSpec> decoder_specs_from_json(const Json& j) {
  std::vector<DecoderSpec> decoders;
  for (const auto& d : j) {
    DecoderSpec spec;
    spec.decodes = field(d, "decodes").get<std::vector<std::string>>();
    if (d.contains("side_info")) spec.side_info = d["side_info"].get<std::vector<std::string>>();
    decoders.push_back(std::move(spec));
  }
  if (decoders.empty()) throw SchemaError("at least one decoder required");
  return decoders;
}

std::string run_region(const Json& config) {
  const Json& model = field(config, "model");
  const std::string family = string_field(model, "family");
  Json out;
  std::ostringstream text;

  if (family == "source") {
    const JointPMF p = pmf_from_json(field(model, "pmf"));
    const Polytope region = source_region(p, decoder_specs_from_json(field(model, "decoders")));
    out["region"] = to_json(region);
    text << "source region over auxiliary rates\n" << region.pretty();
  } else if (family == "channel-general" || family == "channel-disjoint") {
    const JointPMF p = pmf_from_json(field(model, "pmf"));
    const auto messages = field(model, "messages").get<std::vector<std::string>>();
    const auto decoders = decoder_specs_from_json(field(model, "decoders"));
    std::vector<std::vector<std::string>> groups;
    ChannelVariant variant = ChannelVariant::General;
    if (family == "channel-disjoint") {
      variant = ChannelVariant::Disjoint;
      for (const auto& g : field(model, "groups"))
        groups.push_back(g.get<std::vector<std::string>>());
    }
    const Polytope raw = channel_region_raw(p, messages, decoders, variant, groups);
    const Polytope region = eliminate_aux_rates(raw);
    out["raw"] = to_json(raw);
    out["region"] = to_json(region);
    text << "channel region after eliminating auxiliary rates\n"
         << region.pretty() << interval_summary(region);
  } else if (family == "mac") {
    JointPMF joint = pmf_from_json(field(model, "priors")[0]);
    joint = product(joint, pmf_from_json(field(model, "priors")[1]));
    joint = product(joint, pmf_from_json(field(model, "priors")[2]));
    const std::string z0 = joint.variables()[0].name;
    const std::string z1 = joint.variables()[1].name;
    const std::string z2 = joint.variables()[2].name;
    joint = compose(joint, kernel_from_json(field(model, "w1")));
    joint = compose(joint, kernel_from_json(field(model, "w2")));
    const ConditionalKernel channel = kernel_from_json(field(model, "channel"));
    joint = compose(joint, channel);
    const std::string y = channel.output_variables()[0].name;

    // common message Z0 decoded alongside the private ones
    std::vector<DecoderSpec> decoders = {{{z0, z1, z2}, {y}}};
    const Polytope raw =
        channel_region_raw(joint, {z0, z1, z2}, decoders, ChannelVariant::General);
    const Polytope region = eliminate_aux_rates(raw);
    const Polytope explicit_region = mac_explicit_region(joint, z0, z1, z2, y);
    out["region"] = to_json(region);
    out["explicit"] = to_json(explicit_region);
    out["equal"] = polytope_equal(region, explicit_region);
    text << "MAC region (Fourier-Motzkin)\n"
         << region.pretty() << "seven-bound explicit form agrees: "
         << (out["equal"].get<bool>() ? "yes" : "no") << "\n"
         << interval_summary(region);
  } else if (family == "bc" || family == "marton") {
    const JointPMF base = pmf_from_json(field(model, "joint"));
    const ConditionalKernel channel = kernel_from_json(field(model, "channel"));
    const JointPMF joint = compose(base, channel);
    const std::string x = string_field(model, "x");
    const auto z = field(model, "z").get<std::vector<std::string>>();
    if (z.size() != 3) throw SchemaError("broadcast model needs three auxiliary names");
    const std::string y1 = channel.output_variables()[0].name;
    const std::string y2 = channel.output_variables()[1].name;
    (void)x;
    if (family == "marton") {
      const Polytope region = marton_region(joint, z[0], z[1], z[2], y1, y2);
      out["region"] = to_json(region);
      text << "Marton inner region\n" << region.pretty();
    } else {
      std::vector<DecoderSpec> decoders = {{{z[0], z[1]}, {y1}}, {{z[0], z[2]}, {y2}}};
      const Polytope raw = channel_region_raw(joint, {z[0], z[1], z[2]}, decoders,
                                              ChannelVariant::Disjoint, {{z[0], z[1], z[2]}});
      const Polytope region = eliminate_aux_rates(raw);
      const Polytope explicit_region = bc_explicit_region(joint, z[0], z[1], z[2], y1, y2);
      out["region"] = to_json(region);
      out["explicit"] = to_json(explicit_region);
      out["equal"] = polytope_equal(region, explicit_region);
      text << "BC region (Fourier-Motzkin)\n"
           << region.pretty() << "explicit inequality list agrees: "
           << (out["equal"].get<bool>() ? "yes" : "no") << "\n"
           << interval_summary(region);
    }
  } else {
    throw SchemaError("unknown region family: " + family);
  }

  write_output(config, out.dump(2) + "\n");
  return text.str();
}

// -------------------------------------------------------- simulate-source --

DecoderKind decoder_kind_of(const std::string& name) {
  if (name == "crng") return DecoderKind::Crng;
  if (name == "map") return DecoderKind::Map;
  if (name == "typicality") return DecoderKind::Typicality;
  throw SchemaError("unknown decoder kind: " + name);
}

int rows_for_rate(double rate, int n, uint32_t q) {
  const int rows = static_cast<int>(std::floor(rate * n / std::log2(q) + 1e-9));
  return std::max(0, rows);
}

// Narrow fast-path eligibility for the difference-space MAP evaluator.
bool dsbs_fast_applicable(const SourceCodeSpec& spec) {
  if (spec.q != 2 || spec.sources.size() != 2 || spec.decoders.size() != 1) return false;
  const auto& dec = spec.decoders[0];
  if (!dec.side_info.empty() || dec.decode_set.size() != 2) return false;
  const JointPMF dsbs_check = spec.letter.marginal(spec.sources);
  // doubly symmetric: p(0,0) = p(1,1), p(0,1) = p(1,0)
  const auto& probs = dsbs_check.probs();
  return probs.size() == 4 && std::abs(probs[0] - probs[3]) < 1e-12 &&
         std::abs(probs[1] - probs[2]) < 1e-12 && probs[1] < probs[0];
}

std::string run_simulate_source(const Json& config, const RunOptions& options) {
  const Json& model = field(config, "model");
  const uint64_t seed = seed_of(config);
  const uint64_t budget = options.budget ? options.budget : kDefaultEnumerationBudget;
  CsvWriter csv(config, "simulate-source");

  const std::string decoder_name =
      model.contains("decoder") ? model["decoder"].get<std::string>() : "crng";
  const DecoderKind kind = decoder_kind_of(decoder_name);
  const std::string mode = model.contains("mode") ? model["mode"].get<std::string>() : "exact";
  const uint64_t trials = model.contains("trials") ? model["trials"].get<uint64_t>() : 10000;
  const double epsilon = model.contains("epsilon") ? model["epsilon"].get<double>() : 0.2;

  auto evaluate = [&](const SourceCodeSpec& spec, const std::string& params,
                      uint64_t stream_seed) {
    if (mode == "exact") {
      double error;
      if (kind == DecoderKind::Map && model.value("evaluator", "auto") != "generic" &&
          dsbs_fast_applicable(spec)) {
        const double flip = 2.0 * spec.letter.marginal(spec.sources).probs()[1];
        error = dsbs_pair_map_exact_error(spec.encoders[0], spec.encoders[1], flip);
      } else {
        error = exact_error(spec, kind, epsilon, budget);
      }
      csv.add(params, "error", error);
    } else if (mode == "mc") {
      const auto flags = run_trials(trials, stream_seed, options.workers,
                                    [&](uint64_t, Rng& rng) {
                                      return mc_error(spec, kind, 1, rng, epsilon, budget)
                                                 .errors > 0;
                                    });
      uint64_t errors = 0;
      for (uint8_t f : flags) errors += f;
      const WilsonInterval ci = wilson95(errors, trials);
      csv.add(params + ";trials=" + std::to_string(trials), "error", ci.estimate, ci.low,
              ci.high);
    } else {
      throw SchemaError("unknown mode: " + mode);
    }
  };

  if (model.contains("spec")) {
    const SourceCodeSpec spec = source_spec_from_json(model["spec"]);
    evaluate(spec, "n=" + std::to_string(spec.n) + ";decoder=" + decoder_name + ";mode=" + mode,
             seed);
  } else {
    // generator form: random codes over a sweep grid
    const JointPMF letter = pmf_from_json(field(model, "letter"));
    const auto sources = field(model, "sources").get<std::vector<std::string>>();
    const uint32_t q = model.contains("q") ? model["q"].get<uint32_t>() : 2;
    const Json& sweep = field(config, "sweep");
    const auto n_list = field(sweep, "n").get<std::vector<int>>();
    const uint64_t codes = sweep.contains("codes") ? sweep["codes"].get<uint64_t>() : 1;
    const Json& rates = field(sweep, "rates");

    SourceCodeSpec base;
    base.q = q;
    base.sources = sources;
    base.letter = letter;
    for (const auto& d : field(model, "decoders")) {
      SourceDecoder dec;
      for (const auto& name : field(d, "decodes")) {
        const std::string s = name.get<std::string>();
        auto it = std::find(sources.begin(), sources.end(), s);
        if (it == sources.end()) throw SchemaError("decoder references unknown source: " + s);
        dec.decode_set.push_back(static_cast<int>(it - sources.begin()));
      }
      if (d.contains("side_info"))
        dec.side_info = d["side_info"].get<std::vector<std::string>>();
      base.decoders.push_back(std::move(dec));
    }

    for (int n : n_list) {
      for (uint64_t code = 0; code < codes; ++code) {
        SourceCodeSpec spec = base;
        spec.n = n;
        std::string params = "n=" + std::to_string(n) + ";code=" + std::to_string(code) +
                             ";decoder=" + decoder_name + ";mode=" + mode;
        uint64_t stream = seed ^ (static_cast<uint64_t>(n) << 32) ^ code;
        for (size_t s = 0; s < sources.size(); ++s) {
          const double rate = field(rates, sources[s].c_str()).get<double>();
          const int rows = rows_for_rate(rate, n, q);
          Rng rng = Rng::derived(stream, 1000 + s);
          EnsembleSpec ens;
          ens.kind = EnsembleKind::UniformLinear;
          ens.q = q;
          spec.encoders.push_back(sample_matrix(ens, rows, n, rng));
          params += ";rate_" + sources[s] + "=" + format_double(rate);
        }
        evaluate(spec, params, Rng::splitmix64(stream));
      }
    }
  }

  const std::string text = csv.rows.str();
  write_output(config, text);
  return text;
}

// ------------------------------------------------------- simulate-channel --

std::string run_simulate_channel(const Json& config, const RunOptions& options) {
  const Json& model = field(config, "model");
  const uint64_t seed = seed_of(config);
  const uint64_t budget = options.budget ? options.budget : kDefaultEnumerationBudget;
  CsvWriter csv(config, "simulate-channel");

  const ChannelCodeSpec spec = channel_spec_from_json(field(model, "spec"));
  const std::string mode = model.contains("mode") ? model["mode"].get<std::string>() : "exact";
  const std::string params = "n=" + std::to_string(spec.n) + ";mode=" + mode;

  if (mode == "exact") {
    csv.add(params, "error", end_to_end_error_exact(spec, budget));
    const ErrorDecomposition dec = error_decomposition(spec, budget);
    csv.add(params, "encoder_failure_mass", dec.encoder_failure_mass);
    csv.add(params, "decoding_mass", dec.decoding_mass);
    csv.add(params, "mismatch_tv", dec.mismatch_tv);
  } else if (mode == "mc") {
    const uint64_t trials = model.contains("trials") ? model["trials"].get<uint64_t>() : 10000;
    // optional JSON-lines dump of every trace, for debugging
    std::vector<std::string> trace_lines(model.contains("trace_output") ? trials : 0);
    const bool dump = !trace_lines.empty();
    const auto flags = run_trials(trials, seed, options.workers, [&](uint64_t trial, Rng& rng) {
      const TransmissionTrace trace = run_trial(spec, rng, budget);
      if (dump) {
        Json line;
        line["trial"] = trial;
        line["encoder_failed"] = trace.encoder_failed;
        Json ms = Json::array(), zs = Json::array(), dec = Json::array();
        for (const auto& m : trace.messages) ms.push_back(m.values());
        for (const auto& z : trace.auxiliaries) zs.push_back(z.values());
        for (const auto& d : trace.decoded) {
          Json one = Json::array();
          for (const auto& m : d) one.push_back(m.values());
          dec.push_back(one);
        }
        line["messages"] = ms;
        line["auxiliaries"] = zs;
        line["inputs"] = trace.inputs;
        line["outputs"] = trace.outputs;
        line["decoded"] = dec;
        trace_lines[trial] = line.dump();
      }
      if (trace.encoder_failed) return true;
      for (size_t j = 0; j < spec.decode_specs.size(); ++j) {
        const auto& dec_spec = spec.decode_specs[j];
        if (trace.decoded[j].size() != dec_spec.decode_set.size()) return true;
        for (size_t k = 0; k < dec_spec.decode_set.size(); ++k)
          if (!(trace.decoded[j][k] ==
                trace.messages[static_cast<size_t>(dec_spec.decode_set[k])]))
            return true;
      }
      return false;
    });
    if (dump) {
      std::ofstream out(model["trace_output"].get<std::string>(), std::ios::binary);
      for (const auto& line : trace_lines) out << line << "\n";
    }
    uint64_t errors = 0;
    for (uint8_t f : flags) errors += f;
    const WilsonInterval ci = wilson95(errors, trials);
    csv.add(params + ";trials=" + std::to_string(trials), "error", ci.estimate, ci.low, ci.high);
  } else {
    throw SchemaError("unknown mode: " + mode);
  }

  const std::string text = csv.rows.str();
  write_output(config, text);
  return text;
}

// ------------------------------------------------------------ verify-hash --

std::string run_verify_hash(const Json& config, const RunOptions& options) {
  const Json& model = field(config, "model");
  const uint64_t budget = options.budget ? options.budget : kDefaultEnumerationBudget;
  CsvWriter csv(config, "verify-hash");
  Json records = Json::array();

  auto weighted_set_from = [&](const Json& j,
                               const std::vector<EnsembleSpec>& specs) -> WeightedSet {
    WeightedSet t;
    for (const auto& member : field(j, "members")) {
      std::vector<FieldVector> tuple;
      for (const auto& v : member) tuple.push_back(vector_from_json(v));
      t.members.push_back(std::move(tuple));
    }
    if (j.contains("weights"))
      t.weights = j["weights"].get<std::vector<double>>();
    else
      t.weights.assign(t.members.size(), 1.0);
    (void)specs;
    return t;
  };

  int index = 0;
  for (const auto& check : field(model, "checks")) {
    const std::string type = string_field(check, "type");
    const std::string params = "check=" + std::to_string(index++);
    Json record = {{"type", type}};

    if (type == "hash-inequality") {
      const EnsembleSpec spec = ensemble_from_json(field(check, "ensemble"));
      const double alpha = field(check, "alpha").get<double>();
      const double beta = field(check, "beta").get<double>();
      bool holds = true;
      double worst = 0;
      const uint64_t domain = spec.domain_size();
      for (uint64_t zi = 0; zi < domain; ++zi) {
        const auto report = verify_hash_inequality(
            spec, alpha, beta, FieldVector::from_index(spec.q, spec.cols, zi), budget);
        holds = holds && report.holds;
        worst = std::max(worst, report.lhs);
      }
      record["lhs"] = worst;
      record["rhs"] = beta;
      record["holds"] = holds;
      csv.add(params, "hash_lhs_worst", worst);
      csv.add(params, "holds", holds ? 1.0 : 0.0);
    } else if (type == "profile") {
      const EnsembleSpec spec = ensemble_from_json(field(check, "ensemble"));
      const HashProfile profile = profile_ensemble(spec, budget);
      record["alpha"] = profile.alpha;
      record["beta"] = profile.beta;
      csv.add(params, "alpha", profile.alpha);
      csv.add(params, "beta", profile.beta);
    } else if (type == "balanced-coloring" || type == "collision") {
      std::vector<EnsembleSpec> specs;
      for (const auto& e : field(check, "ensembles")) specs.push_back(ensemble_from_json(e));
      const WeightedSet t = weighted_set_from(field(check, "set"), specs);
      BoundReport report;
      if (type == "balanced-coloring") {
        report = verify_balanced_coloring_bound(specs, t, budget);
      } else {
        std::vector<FieldVector> z;
        for (const auto& v : field(check, "z")) z.push_back(vector_from_json(v));
        report = verify_collision_bound(specs, t, z, budget);
      }
      record["lhs"] = report.lhs;
      record["rhs"] = report.rhs;
      record["holds"] = report.holds;
      csv.add(params, "lhs", report.lhs);
      csv.add(params, "rhs", report.rhs);
      csv.add(params, "holds", report.holds ? 1.0 : 0.0);
      if (!report.holds)
        throw InvariantBreach("bound violated by check " + std::to_string(index - 1));
    } else {
      throw SchemaError("unknown check type: " + type);
    }
    record["config"] = check;
    records.push_back(std::move(record));
  }

  write_output(config, records.dump(2) + "\n");
  return csv.rows.str();
}

// --------------------------------------------------------------- spectral --

SpectralQuantity quantity_of(const std::string& name) {
  if (name == "sup_entropy_rate") return SpectralQuantity::SupEntropyRate;
  if (name == "inf_entropy_rate") return SpectralQuantity::InfEntropyRate;
  if (name == "cond_sup_entropy_rate") return SpectralQuantity::CondSupEntropyRate;
  if (name == "inf_information_rate") return SpectralQuantity::InfInformationRate;
  throw SchemaError("unknown spectral quantity: " + name);
}

std::string run_spectral(const Json& config, const RunOptions& options) {
  const Json& model = field(config, "model");
  const uint64_t seed = seed_of(config);
  const uint64_t budget = options.budget ? options.budget : kDefaultEnumerationBudget;
  CsvWriter csv(config, "spectral");

  const JointPMF p = pmf_from_json(field(model, "pmf"));
  const SpectralQuantity quantity = quantity_of(string_field(model, "quantity"));
  const auto target = field(model, "target").get<std::vector<std::string>>();
  std::vector<std::string> given;
  if (model.contains("given")) given = model["given"].get<std::vector<std::string>>();
  const double epsilon = model.contains("epsilon") ? model["epsilon"].get<double>() : 0.2;

  const Json& sweep = field(config, "sweep");
  const auto n_list = field(sweep, "n").get<std::vector<int>>();
  const int trials = sweep.contains("trials") ? sweep["trials"].get<int>() : 2000;

  int run = 0;
  for (int n : n_list) {
    Rng rng = Rng::derived(seed, static_cast<uint64_t>(run++));
    const SpectralEstimate est =
        spectral_entropy_estimate(p, quantity, target, given, n, trials, epsilon, rng, budget);
    csv.add("n=" + std::to_string(n) + ";trials=" + std::to_string(trials) +
                ";epsilon=" + format_double(epsilon),
            string_field(model, "quantity"), est.value);
  }

  const std::string text = csv.rows.str();
  write_output(config, text);
  return text;
}

}  // namespace

std::string run_experiment(const Json& config, const RunOptions& options) {
  if (!config.is_object()) throw SchemaError("config must be a JSON object");
  const std::string kind = string_field(config, "kind");
  seed_of(config);  // mandatory even where unused, per the config contract
  if (kind == "region") return run_region(config);
  if (kind == "simulate-source") return run_simulate_source(config, options);
  if (kind == "simulate-channel") return run_simulate_channel(config, options);
  if (kind == "verify-hash") return run_verify_hash(config, options);
  if (kind == "spectral") return run_spectral(config, options);
  throw SchemaError("unknown experiment kind: " + kind);
}

std::string validate_experiment(const Json& config) {
  std::ostringstream report;
  auto complain = [&](const std::string& what) { report << what << "\n"; };
  try {
    if (!config.is_object()) throw SchemaError("config must be a JSON object");
    const std::string kind = string_field(config, "kind");
    seed_of(config);
    const Json& model = field(config, "model");

    if (kind == "region") {
      const std::string family = string_field(model, "family");
      if (family == "source") {
        const JointPMF p = pmf_from_json(field(model, "pmf"));
        source_region(p, decoder_specs_from_json(field(model, "decoders")));
      } else if (family == "channel-general" || family == "channel-disjoint") {
        const JointPMF p = pmf_from_json(field(model, "pmf"));
        const auto messages = field(model, "messages").get<std::vector<std::string>>();
        std::vector<std::vector<std::string>> groups;
        if (family == "channel-disjoint")
          for (const auto& g : field(model, "groups"))
            groups.push_back(g.get<std::vector<std::string>>());
        channel_region_raw(p, messages, decoder_specs_from_json(field(model, "decoders")),
                           family == "channel-disjoint" ? ChannelVariant::Disjoint
                                                        : ChannelVariant::General,
                           groups);
      }
      // mac/bc/marton families validate during composition in run_experiment
    } else if (kind == "simulate-source") {
      if (model.contains("spec")) source_spec_from_json(model["spec"]);
    } else if (kind == "simulate-channel") {
      channel_spec_from_json(field(model, "spec"));
    } else if (kind == "verify-hash") {
      for (const auto& check : field(model, "checks")) string_field(check, "type");
    } else if (kind == "spectral") {
      pmf_from_json(field(model, "pmf"));
      quantity_of(string_field(model, "quantity"));
    } else {
      complain("unknown experiment kind: " + kind);
    }
  } catch (const std::exception& e) {
    complain(e.what());
  }
  return report.str();
}

}  // namespace crng
