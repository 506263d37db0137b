#include "efqse/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "efqse/casci.hpp"
#include "efqse/parallel.hpp"

namespace efqse {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

// Strict view of one JSON object: every key must be consumed.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError("unknown configuration key '" + path(item.key()) + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

[[noreturn]] void type_error(const std::string& key, const char* expected) {
  throw ConfigError("configuration key '" + key + "' must be " + expected);
}

bool to_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) type_error(key, "a boolean");
  return v.get<bool>();
}

long long to_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) type_error(key, "an integer");
  return v.get<long long>();
}

std::uint64_t to_uint(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  type_error(key, "a non-negative integer");
}

double to_double(const json& v, const std::string& key) {
  if (!v.is_number()) type_error(key, "a number");
  return v.get<double>();
}

std::string to_string(const json& v, const std::string& key) {
  if (!v.is_string()) type_error(key, "a string");
  return v.get<std::string>();
}

std::vector<int> to_int_list(const json& v, const std::string& key) {
  if (!v.is_array()) type_error(key, "an array of integers");
  std::vector<int> out;
  for (const auto& e : v) out.push_back(static_cast<int>(to_int(e, key)));
  return out;
}

std::vector<double> to_double_list(const json& v, const std::string& key) {
  if (!v.is_array()) type_error(key, "an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(to_double(e, key));
  return out;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + p.string());
}

template <class F>
auto in_stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw StageError(name, e.what(), 2);
  } catch (const ParseError& e) {
    throw StageError(name, e.what(), 2);
  } catch (const BoundsError& e) {
    throw StageError(name, e.what(), 2);
  } catch (const std::exception& e) {
    throw StageError(name, e.what(), 3);
  }
}

std::uint64_t mode_id(ExecutionMode m) { return static_cast<std::uint64_t>(m); }

}  // namespace

std::string RunConfig::fcidump_path() const {
  fs::path p(fcidump);
  if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
  return p.string();
}

void RunConfig::validate() const {
  if (fcidump.empty()) throw ConfigError("configuration needs 'fcidump'");
  OrbsymConvention::by_name(orbsym_convention);
  if (mode != ExecutionMode::Exact) {
    if (shots == 0) throw ConfigError("'shots' must be positive for sampled and noisy modes");
    if (!seed) throw ConfigError("'seed' is required for sampled and noisy modes");
  }
  if (mode == ExecutionMode::Noisy && !has_noise()) throw ConfigError("noisy mode needs a 'noise' section");
  if (readout_error && !p01.empty()) throw ConfigError("give either noise.readout_error or noise.p01/p10, not both");
  if (readout_error && (*readout_error < 0.0 || *readout_error >= 0.5)) {
    throw ConfigError("noise.readout_error must lie in [0, 0.5)");
  }
  if (p01.size() != p10.size()) throw ConfigError("noise.p01 and noise.p10 must have equal length");
  for (double p : p01)
    if (p < 0.0 || p >= 0.5) throw ConfigError("noise.p01 entries must lie in [0, 0.5)");
  for (double p : p10)
    if (p < 0.0 || p >= 0.5) throw ConfigError("noise.p10 entries must lie in [0, 0.5)");
  if (optimizer.max_iterations < 1) throw ConfigError("optimizer.max_iterations must be positive");
  if (optimizer.restarts < 0) throw ConfigError("optimizer.restarts must be non-negative");
  if (!(optimizer.tolerance > 0.0)) throw ConfigError("optimizer.tolerance must be positive");
  if (!(optimizer.initial_step > 0.0)) throw ConfigError("optimizer.initial_step must be positive");
  if (eps_m && !(*eps_m > 0.0)) throw ConfigError("qse.eps_m must be positive");
  if (!(eps_s > 0.0 && eps_s < 1.0)) throw ConfigError("qse.eps_s must lie in (0, 1)");
  if (states_per_class < 1) throw ConfigError("qse.states_per_class must be at least 1");
  if (bootstrap_resamples < 0) throw ConfigError("qse.bootstrap_resamples must be non-negative");
  if (casci_states < 0) throw ConfigError("casci.n_states must be non-negative");
  if (threads < 0) throw ConfigError("'threads' must be non-negative");
  if (n_hops && *n_hops < 0) throw ConfigError("ansatz.n_hops must be non-negative");
  if (active_electrons && *active_electrons < 0) throw ConfigError("active_space.electrons must be non-negative");
  if (!active_orbitals.empty() && !active_electrons) throw ConfigError("active_space.orbitals needs active_space.electrons");
  if (output_dir.empty()) throw ConfigError("'output' must not be empty");
}

RunConfig parse_run_config(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  RunConfig c;
  c.base_dir = base_dir;
  Fields top(j, "");
  if (auto v = top.get("fcidump")) c.fcidump = to_string(*v, "fcidump");
  if (auto v = top.get("orbsym_convention")) c.orbsym_convention = to_string(*v, "orbsym_convention");
  if (auto v = top.get("active_space")) {
    Fields f(*v, "active_space");
    if (auto w = f.get("orbitals")) c.active_orbitals = to_int_list(*w, f.path("orbitals"));
    if (auto w = f.get("frozen")) c.frozen_orbitals = to_int_list(*w, f.path("frozen"));
    if (auto w = f.get("electrons")) c.active_electrons = static_cast<int>(to_int(*w, f.path("electrons")));
    f.finish();
  }
  if (auto v = top.get("molecule")) c.molecule = to_string(*v, "molecule");
  if (auto v = top.get("mode")) {
    try {
      c.mode = parse_mode(to_string(*v, "mode"));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  if (auto v = top.get("shots")) c.shots = to_uint(*v, "shots");
  if (auto v = top.get("seed")) c.seed = to_uint(*v, "seed");
  if (auto v = top.get("noise")) {
    Fields f(*v, "noise");
    if (auto w = f.get("readout_error")) c.readout_error = to_double(*w, f.path("readout_error"));
    if (auto w = f.get("p01")) c.p01 = to_double_list(*w, f.path("p01"));
    if (auto w = f.get("p10")) c.p10 = to_double_list(*w, f.path("p10"));
    f.finish();
  }
  if (auto v = top.get("mitigation")) {
    Fields f(*v, "mitigation");
    if (auto w = f.get("twirl")) c.mitigation.twirl = to_bool(*w, f.path("twirl"));
    if (auto w = f.get("post_select")) c.mitigation.post_select = to_bool(*w, f.path("post_select"));
    if (auto w = f.get("rescale")) c.mitigation.rescale = to_bool(*w, f.path("rescale"));
    f.finish();
  }
  if (auto v = top.get("optimizer")) {
    Fields f(*v, "optimizer");
    if (auto w = f.get("max_iterations")) c.optimizer.max_iterations = static_cast<int>(to_int(*w, f.path("max_iterations")));
    if (auto w = f.get("restarts")) c.optimizer.restarts = static_cast<int>(to_int(*w, f.path("restarts")));
    if (auto w = f.get("tolerance")) c.optimizer.tolerance = to_double(*w, f.path("tolerance"));
    if (auto w = f.get("initial_step")) c.optimizer.initial_step = to_double(*w, f.path("initial_step"));
    f.finish();
  }
  if (auto v = top.get("ansatz")) {
    Fields f(*v, "ansatz");
    if (auto w = f.get("bitstrings")) {
      if (!w->is_array()) type_error(f.path("bitstrings"), "an array of strings");
      for (const auto& e : *w) c.bitstrings.push_back(to_string(e, f.path("bitstrings")));
    }
    if (auto w = f.get("hop_layout")) {
      if (!w->is_array()) type_error(f.path("hop_layout"), "an array of qubit pairs");
      for (const auto& e : *w) {
        const auto pair = to_int_list(e, f.path("hop_layout"));
        if (pair.size() != 2) type_error(f.path("hop_layout"), "an array of qubit pairs");
        c.hop_layout.emplace_back(pair[0], pair[1]);
      }
    }
    if (auto w = f.get("n_hops")) c.n_hops = static_cast<int>(to_int(*w, f.path("n_hops")));
    f.finish();
  }
  if (auto v = top.get("qse")) {
    Fields f(*v, "qse");
    if (auto w = f.get("eps_m")) c.eps_m = to_double(*w, f.path("eps_m"));
    if (auto w = f.get("eps_s")) c.eps_s = to_double(*w, f.path("eps_s"));
    if (auto w = f.get("states_per_class")) c.states_per_class = static_cast<int>(to_int(*w, f.path("states_per_class")));
    if (auto w = f.get("bootstrap_resamples")) {
      c.bootstrap_resamples = static_cast<int>(to_int(*w, f.path("bootstrap_resamples")));
    }
    if (auto w = f.get("reference_irrep")) {
      try {
        c.reference_irrep = parse_irrep(to_string(*w, f.path("reference_irrep")));
      } catch (const ParseError& e) {
        throw ConfigError(e.what());
      }
    }
    f.finish();
  }
  if (auto v = top.get("casci")) {
    Fields f(*v, "casci");
    if (auto w = f.get("n_states")) c.casci_states = static_cast<int>(to_int(*w, f.path("n_states")));
    f.finish();
  }
  if (auto v = top.get("output")) c.output_dir = to_string(*v, "output");
  if (auto v = top.get("threads")) c.threads = static_cast<int>(to_int(*v, "threads"));
  top.finish();
  return c;
}

RunConfig read_run_config(const std::string& path) {
  const std::string text = read_text(path);
  return parse_run_config(text, fs::path(path).parent_path().string());
}

std::string run_config_to_json(const RunConfig& c) {
  ordered_json j;
  j["fcidump"] = c.fcidump;
  j["orbsym_convention"] = c.orbsym_convention;
  ordered_json as;
  as["orbitals"] = c.active_orbitals;
  as["frozen"] = c.frozen_orbitals;
  as["electrons"] = c.active_electrons ? ordered_json(*c.active_electrons) : ordered_json(nullptr);
  j["active_space"] = as;
  j["molecule"] = c.molecule.empty() ? ordered_json(nullptr) : ordered_json(c.molecule);
  j["mode"] = std::string(mode_name(c.mode));
  j["shots"] = c.shots;
  j["seed"] = c.seed ? ordered_json(*c.seed) : ordered_json(nullptr);
  ordered_json noise;
  noise["readout_error"] = c.readout_error ? ordered_json(*c.readout_error) : ordered_json(nullptr);
  noise["p01"] = c.p01;
  noise["p10"] = c.p10;
  j["noise"] = noise;
  j["mitigation"] = {{"twirl", c.mitigation.twirl}, {"post_select", c.mitigation.post_select},
                     {"rescale", c.mitigation.rescale}};
  ordered_json opt;
  opt["max_iterations"] = c.optimizer.max_iterations;
  opt["restarts"] = c.optimizer.restarts;
  opt["tolerance"] = c.optimizer.tolerance;
  opt["initial_step"] = c.optimizer.initial_step;
  j["optimizer"] = opt;
  ordered_json an;
  an["bitstrings"] = c.bitstrings;
  ordered_json layout = ordered_json::array();
  for (const auto& [a, b] : c.hop_layout) layout.push_back({a, b});
  an["hop_layout"] = layout;
  an["n_hops"] = c.n_hops ? ordered_json(*c.n_hops) : ordered_json(nullptr);
  j["ansatz"] = an;
  ordered_json q;
  q["eps_m"] = c.eps_m ? ordered_json(*c.eps_m) : ordered_json(nullptr);
  q["eps_s"] = c.eps_s;
  q["states_per_class"] = c.states_per_class;
  q["bootstrap_resamples"] = c.bootstrap_resamples;
  q["reference_irrep"] = std::string(irrep_name(c.reference_irrep));
  j["qse"] = q;
  j["casci"] = {{"n_states", c.casci_states}};
  j["output"] = c.output_dir;
  j["threads"] = c.threads;
  return j.dump(2) + "\n";
}

MolecularIntegrals load_integrals(const RunConfig& c) {
  FcidumpOptions fo;
  fo.convention = OrbsymConvention::by_name(c.orbsym_convention);
  MolecularIntegrals full = read_fcidump(c.fcidump_path(), fo);
  std::vector<int> active;
  int electrons = c.active_electrons.value_or(0);
  if (!c.active_orbitals.empty()) {
    for (int p : c.active_orbitals) active.push_back(p - 1);
  } else if (!c.molecule.empty() && !c.frozen_orbitals.empty()) {
    throw ConfigError("active_space.frozen needs active_space.orbitals");
  } else if (!c.molecule.empty()) {
    electrons = 0;
    for (const auto& r : orbital_metadata_table(c.molecule)) {
      active.push_back(r.index - 1);
      electrons += r.occupancy;
    }
  }
  if (active.empty()) {
    if (full.n_alpha != full.n_beta) throw ConfigError("only closed-shell references are supported");
    return full;
  }
  std::vector<int> frozen;
  if (!c.frozen_orbitals.empty()) {
    for (int p : c.frozen_orbitals) frozen.push_back(p - 1);
  } else {
    for (int p = 0; p < full.n_alpha; ++p)
      if (std::find(active.begin(), active.end(), p) == active.end()) frozen.push_back(p);
  }
  const int total = full.n_alpha + full.n_beta;
  if (2 * static_cast<int>(frozen.size()) + electrons != total) {
    throw ConfigError("frozen orbitals (" + std::to_string(frozen.size()) + ") and active electrons (" +
                      std::to_string(electrons) + ") do not add up to NELEC = " + std::to_string(total));
  }
  if (electrons % 2 != 0) throw ConfigError("active electron count must be even");
  ActiveSpaceSpec spec;
  spec.active_orbital_indices = active;
  spec.n_active_electrons = electrons;
  return freeze_core(full, spec, frozen);
}

ForgedAnsatz initial_ansatz(const RunConfig& c, const MolecularIntegrals& ints) {
  const int n = ints.n_orbitals();
  if (ints.n_alpha != ints.n_beta) throw ConfigError("only closed-shell references are supported");
  try {
    ForgedAnsatz a = default_ansatz(n, ints.n_alpha, ints.orbital_irreps, c.n_hops.value_or(-1));
    if (!c.bitstrings.empty()) {
      a.bitstrings.clear();
      for (const auto& s : c.bitstrings) {
        if (static_cast<int>(s.size()) != n) {
          throw ConfigError("ansatz bitstring '" + s + "' must have " + std::to_string(n) + " characters");
        }
        a.bitstrings.push_back(parse_bitstring(s));
      }
      a.schmidt.assign(a.bitstrings.size(), 0.0);
      a.schmidt[0] = 1.0;
    }
    if (!c.hop_layout.empty()) {
      a.hop_layout = c.hop_layout;
      a.hop_parameter.clear();
      for (std::size_t h = 0; h < a.hop_layout.size(); ++h) a.hop_parameter.push_back(static_cast<int>(h));
      a.thetas.assign(a.hop_layout.size(), 0.0);
    }
    a.validate();
    return a;
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("invalid ansatz: ") + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(std::string("invalid ansatz: ") + e.what());
  }
}

std::vector<ExecutionMode> mode_cascade(ExecutionMode m) {
  switch (m) {
    case ExecutionMode::Exact:
      return {ExecutionMode::Exact};
    case ExecutionMode::Sampled:
      return {ExecutionMode::Exact, ExecutionMode::Sampled};
    case ExecutionMode::Noisy:
      return {ExecutionMode::Exact, ExecutionMode::Sampled, ExecutionMode::Noisy};
  }
  return {};
}

LabeledSpectrum run_casci(const RunConfig& c, const MolecularIntegrals& ints) {
  CasciOptions o;
  o.n_states = 0;
  return casci_spectrum(ints, ints.n_alpha, ints.n_beta, c.casci_states, o);
}

OptimizationResult run_forge(const RunConfig& c, const MolecularIntegrals& ints) {
  const ForgedAnsatz templ = initial_ansatz(c, ints);
  const BipartiteOperator h = bipartition(build_hamiltonian(ints), ints.n_orbitals());
  OptimizerOptions o = c.optimizer;
  o.seed = c.seed.value_or(0);
  return optimize_ground_state(templ, h, o);
}

ModeResult run_qse(const RunConfig& c, const MolecularIntegrals& ints, const ForgedAnsatz& a, ExecutionMode mode) {
  if (a.n_qubits != ints.n_orbitals()) throw ConfigError("ansatz size does not match the active space");
  const QseOperators ops = QseOperators::build(ints);
  const std::uint64_t seed = c.seed.value_or(0);
  QseSolveOptions qo;
  qo.eps_m = c.eps_m;
  qo.eps_s = c.eps_s;
  qo.reference_irrep = c.reference_irrep;
  qo.bootstrap_resamples = c.bootstrap_resamples;
  qo.seed = derive_seed(seed, {0x300 + mode_id(mode)});
  qo.method = "qse-" + std::string(mode_name(mode));
  ModeResult r;
  r.mode = mode;
  if (mode == ExecutionMode::Exact) {
    const TransitionData data = exact_transition_data(a);
    r.ground = forged_expectation(data, a.schmidt, ops.hamiltonian);
    r.qse = solve_qse(data, a, ops, ints.orbital_irreps, qo);
    return r;
  }
  SamplingOptions so;
  so.mode = mode;
  so.shots = c.shots;
  so.seed = seed;
  so.threads = c.threads;
  const int n = a.n_qubits;
  if (mode == ExecutionMode::Noisy) {
    if (c.readout_error) {
      so.noise = ReadoutModel::uniform(n, *c.readout_error);
    } else {
      if (static_cast<int>(c.p01.size()) != n) {
        throw ConfigError("noise.p01/p10 need one entry per qubit (" + std::to_string(n) + ")");
      }
      so.noise.p01 = c.p01;
      so.noise.p10 = c.p10;
      so.noise.validate();
    }
    so.mitigation = c.mitigation;
  } else {
    so.noise = ReadoutModel::none(n);
    so.mitigation = MitigationOptions::off();
  }
  r.ground = forged_expectation(a, ops.hamiltonian, so, 0x100 + mode_id(mode));
  auto plan = std::make_shared<const MeasurementPlan>(MeasurementPlan::tomography(n));
  const TransitionData data = sampled_transition_data(a, plan, so, 0x200 + mode_id(mode));
  r.qse = solve_qse(data, a, ops, ints.orbital_irreps, qo);
  return r;
}

std::vector<DeviationSummary> run_compare(const RunConfig& c, const LabeledSpectrum* casci,
                                          const std::vector<std::pair<ExecutionMode, const LabeledSpectrum*>>& modes,
                                          std::vector<std::string>* labels_out) {
  auto find = [&](ExecutionMode m) -> const LabeledSpectrum* {
    for (const auto& [mm, s] : modes)
      if (mm == m) return s;
    return nullptr;
  };
  const LabeledSpectrum* exact = find(ExecutionMode::Exact);
  const LabeledSpectrum* sampled = find(ExecutionMode::Sampled);
  const LabeledSpectrum* noisy = find(ExecutionMode::Noisy);
  if (!exact) throw ConfigError("comparison needs the exact-mode spectrum");
  const auto labels = comparison_labels(*exact, c.states_per_class);
  if (labels_out) *labels_out = labels;
  std::vector<DeviationSummary> out;
  if (casci) out.push_back(deviation_report("casci", *casci, "exact", *exact, labels));
  if (sampled) out.push_back(deviation_report("exact", *exact, "sampled", *sampled, labels));
  if (sampled && noisy) out.push_back(deviation_report("sampled", *sampled, "noisy", *noisy, labels));
  return out;
}

namespace {

SpectrumMetadata mode_metadata(const RunConfig& c, const ModeResult& r) {
  SpectrumMetadata m;
  m.mode = std::string(mode_name(r.mode));
  m.molecule = c.molecule;
  if (r.mode != ExecutionMode::Exact) m.shots = c.shots;
  m.ground_energy = r.ground.value;
  m.ground_sigma = r.ground.sigma;
  m.eps_m = r.qse.thresholds.eps_m;
  m.eps_s = r.qse.thresholds.eps_s;
  return m;
}

SpectrumMetadata casci_metadata(const RunConfig& c) {
  SpectrumMetadata m;
  m.mode = "casci";
  m.molecule = c.molecule;
  return m;
}

fs::path out_file(const RunConfig& c, const std::string& name) { return fs::path(c.output_dir) / name; }

void prepare_output(const RunConfig& c) {
  in_stage("config", [&] {
    c.validate();
    set_default_threads(c.threads);
    std::error_code ec;
    fs::create_directories(c.output_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + c.output_dir + ": " + ec.message());
    write_text(out_file(c, "resolved_config.json"), run_config_to_json(c));
    return 0;
  });
}

std::optional<LabeledSpectrum> read_spectrum_if_present(const RunConfig& c, const std::string& mode) {
  const fs::path p = out_file(c, "spectrum_" + mode + ".json");
  if (!fs::exists(p)) return std::nullopt;
  return spectrum_from_json(read_text(p));
}

std::string excitations_csv(const std::vector<std::string>& labels, const LabeledSpectrum* casci,
                            const std::vector<std::pair<ExecutionMode, const LabeledSpectrum*>>& modes) {
  std::vector<const LabeledSpectrum*> cols{casci};
  std::vector<std::string> names{"casci"};
  for (const auto& [m, s] : modes) {
    cols.push_back(s);
    names.emplace_back(mode_name(m));
  }
  return excitation_table(labels, cols, names);
}

}  // namespace

RunArtifacts run_pipeline(const RunConfig& c) {
  prepare_output(c);
  RunArtifacts art;
  art.integrals = in_stage("integrals", [&] { return load_integrals(c); });
  art.casci = in_stage("casci", [&] {
    auto s = run_casci(c, art.integrals);
    write_text(out_file(c, "spectrum_casci.json"), spectrum_to_json(s, casci_metadata(c)));
    return s;
  });
  art.forged = in_stage("forge", [&] {
    auto r = run_forge(c, art.integrals);
    write_text(out_file(c, "ansatz.json"), ansatz_to_json(r.ansatz));
    return r;
  });
  for (ExecutionMode m : mode_cascade(c.mode)) {
    art.modes.push_back(in_stage("qse-" + std::string(mode_name(m)), [&] {
      auto r = run_qse(c, art.integrals, art.forged.ansatz, m);
      write_text(out_file(c, "spectrum_" + std::string(mode_name(m)) + ".json"),
                 spectrum_to_json(r.qse.spectrum, mode_metadata(c, r)));
      write_text(out_file(c, "excitations_" + std::string(mode_name(m)) + ".csv"), excitation_report(r.qse.spectrum));
      return r;
    }));
  }
  in_stage("compare", [&] {
    std::vector<std::pair<ExecutionMode, const LabeledSpectrum*>> modes;
    for (const auto& r : art.modes) modes.emplace_back(r.mode, &r.qse.spectrum);
    art.comparison = run_compare(c, &art.casci, modes, &art.labels);
    write_text(out_file(c, "comparison.csv"), comparison_csv(art.comparison));
    write_text(out_file(c, "excitations.csv"), excitations_csv(art.labels, &art.casci, modes));
    return 0;
  });
  return art;
}

void stage_casci(const RunConfig& c) {
  prepare_output(c);
  const auto ints = in_stage("integrals", [&] { return load_integrals(c); });
  in_stage("casci", [&] {
    write_text(out_file(c, "spectrum_casci.json"), spectrum_to_json(run_casci(c, ints), casci_metadata(c)));
    return 0;
  });
}

void stage_forge(const RunConfig& c) {
  prepare_output(c);
  const auto ints = in_stage("integrals", [&] { return load_integrals(c); });
  in_stage("forge", [&] {
    write_text(out_file(c, "ansatz.json"), ansatz_to_json(run_forge(c, ints).ansatz));
    return 0;
  });
}

void stage_qse(const RunConfig& c) {
  prepare_output(c);
  const auto ints = in_stage("integrals", [&] { return load_integrals(c); });
  const ForgedAnsatz a = in_stage("forge", [&] {
    const fs::path p = out_file(c, "ansatz.json");
    if (fs::exists(p)) return ansatz_from_json(read_text(p));
    auto r = run_forge(c, ints);
    write_text(p, ansatz_to_json(r.ansatz));
    return r.ansatz;
  });
  for (ExecutionMode m : mode_cascade(c.mode)) {
    in_stage("qse-" + std::string(mode_name(m)), [&] {
      auto r = run_qse(c, ints, a, m);
      write_text(out_file(c, "spectrum_" + std::string(mode_name(m)) + ".json"),
                 spectrum_to_json(r.qse.spectrum, mode_metadata(c, r)));
      write_text(out_file(c, "excitations_" + std::string(mode_name(m)) + ".csv"), excitation_report(r.qse.spectrum));
      return 0;
    });
  }
}

void stage_compare(const RunConfig& c) {
  prepare_output(c);
  in_stage("compare", [&] {
    const auto casci = read_spectrum_if_present(c, "casci");
    std::vector<std::optional<LabeledSpectrum>> held;
    std::vector<std::pair<ExecutionMode, const LabeledSpectrum*>> modes;
    for (ExecutionMode m : {ExecutionMode::Exact, ExecutionMode::Sampled, ExecutionMode::Noisy}) {
      held.push_back(read_spectrum_if_present(c, std::string(mode_name(m))));
    }
    for (std::size_t i = 0; i < held.size(); ++i) {
      if (held[i]) modes.emplace_back(static_cast<ExecutionMode>(i), &*held[i]);
    }
    const auto rows = run_compare(c, casci ? &*casci : nullptr, modes);
    write_text(out_file(c, "comparison.csv"), comparison_csv(rows));
    return 0;
  });
}

std::string stage_report(const RunConfig& c) {
  prepare_output(c);
  return in_stage("report", [&] {
    const auto casci = read_spectrum_if_present(c, "casci");
    std::vector<std::optional<LabeledSpectrum>> held;
    std::vector<std::pair<ExecutionMode, const LabeledSpectrum*>> modes;
    for (ExecutionMode m : {ExecutionMode::Exact, ExecutionMode::Sampled, ExecutionMode::Noisy}) {
      held.push_back(read_spectrum_if_present(c, std::string(mode_name(m))));
    }
    for (std::size_t i = 0; i < held.size(); ++i) {
      if (held[i]) modes.emplace_back(static_cast<ExecutionMode>(i), &*held[i]);
    }
    const LabeledSpectrum* ref = !modes.empty() ? modes.front().second : (casci ? &*casci : nullptr);
    if (!ref) throw ConfigError("no spectra found in " + c.output_dir);
    const auto labels = comparison_labels(*ref, c.states_per_class);
    const std::string table = excitations_csv(labels, casci ? &*casci : nullptr, modes);
    write_text(out_file(c, "excitations.csv"), table);
    std::string text = table;
    const fs::path cmp = out_file(c, "comparison.csv");
    if (fs::exists(cmp)) text += "\n" + read_text(cmp);
    return text;
  });
}

}  // namespace efqse
