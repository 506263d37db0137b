#include "efqse/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"

#include "efqse/errors.hpp"
#include "efqse/qse.hpp"

namespace efqse {

using ordered_json = nlohmann::ordered_json;

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  // Avoid "-0.000000" for values that round to zero.
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string aligned_csv(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c > 0) out += ',';
      out.append(width[c] - r[c].size(), ' ');
      out += r[c];
    }
    out += '\n';
  }
  return out;
}

std::string spectrum_to_json(const LabeledSpectrum& s, const SpectrumMetadata& meta) {
  ordered_json j;
  j["format"] = "efqse-spectrum";
  j["version"] = 1;
  j["method"] = s.method;
  j["mode"] = meta.mode;
  j["molecule"] = meta.molecule.empty() ? ordered_json(nullptr) : ordered_json(meta.molecule);
  j["shots"] = meta.shots ? ordered_json(*meta.shots) : ordered_json(nullptr);
  j["ground_energy"] = meta.ground_energy ? ordered_json(*meta.ground_energy) : ordered_json(nullptr);
  j["ground_sigma"] = meta.ground_sigma ? ordered_json(*meta.ground_sigma) : ordered_json(nullptr);
  j["eps_m"] = meta.eps_m ? ordered_json(*meta.eps_m) : ordered_json(nullptr);
  j["eps_s"] = meta.eps_s ? ordered_json(*meta.eps_s) : ordered_json(nullptr);
  ordered_json states = ordered_json::array();
  for (const auto& st : s.states) {
    ordered_json e;
    e["label"] = st.label();
    e["spin"] = st.spin;
    e["irrep"] = std::string(irrep_name(st.irrep));
    e["ordinal"] = st.ordinal;
    e["energy_hartree"] = st.energy;
    e["excitation_ev"] = st.excitation_ev;
    e["sigma_ev"] = st.sigma_ev;
    e["s2"] = st.s2;
    e["unstable"] = st.unstable;
    states.push_back(std::move(e));
  }
  j["states"] = std::move(states);
  j["warnings"] = s.warnings;
  return j.dump(2) + "\n";
}

LabeledSpectrum spectrum_from_json(const std::string& text, SpectrumMetadata* meta) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("spectrum document: ") + e.what());
  }
  try {
    if (j.at("format") != "efqse-spectrum") throw ParseError("not an efqse spectrum document");
    LabeledSpectrum s;
    s.method = j.at("method").get<std::string>();
    for (const auto& e : j.at("states")) {
      LabeledState st;
      st.spin = e.at("spin").get<int>();
      st.irrep = parse_irrep(e.at("irrep").get<std::string>());
      st.ordinal = e.at("ordinal").get<int>();
      st.energy = e.at("energy_hartree").get<double>();
      st.excitation_ev = e.at("excitation_ev").get<double>();
      st.sigma_ev = e.at("sigma_ev").get<double>();
      st.s2 = e.at("s2").get<double>();
      st.unstable = e.at("unstable").get<bool>();
      s.states.push_back(st);
    }
    s.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (meta) {
      auto opt_d = [&](const char* k) -> std::optional<double> {
        return j.at(k).is_null() ? std::nullopt : std::optional<double>(j.at(k).get<double>());
      };
      meta->mode = j.at("mode").get<std::string>();
      meta->molecule = j.at("molecule").is_null() ? "" : j.at("molecule").get<std::string>();
      meta->shots = j.at("shots").is_null() ? std::nullopt : std::optional<std::uint64_t>(j.at("shots").get<std::uint64_t>());
      meta->ground_energy = opt_d("ground_energy");
      meta->ground_sigma = opt_d("ground_sigma");
      meta->eps_m = opt_d("eps_m");
      meta->eps_s = opt_d("eps_s");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("spectrum document: ") + e.what());
  }
}

std::string excitation_report(const LabeledSpectrum& s) {
  std::vector<std::vector<std::string>> rows{{"state", "S", "irrep", "energy_hartree", "delta_e_ev", "sigma_ev"}};
  for (const auto& st : s.states) {
    rows.push_back({st.label() + (st.unstable ? "*" : ""), std::to_string(st.spin), std::string(irrep_name(st.irrep)),
                    fixed(st.energy, 10), fixed(st.excitation_ev, 6), fixed(st.sigma_ev, 6)});
  }
  return aligned_csv(rows);
}

std::string excitation_table(const std::vector<std::string>& labels, const std::vector<const LabeledSpectrum*>& spectra,
                             const std::vector<std::string>& names) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{"state"};
  for (const auto& n : names) {
    head.push_back(n + "_ev");
    head.push_back(n + "_sigma_ev");
  }
  rows.push_back(head);
  for (const auto& l : labels) {
    std::vector<std::string> r{l};
    for (const auto* sp : spectra) {
      const LabeledState* st = sp ? sp->find(l) : nullptr;
      r.push_back(st ? fixed(st->excitation_ev, 6) : "");
      r.push_back(st ? fixed(st->sigma_ev, 6) : "");
    }
    rows.push_back(std::move(r));
  }
  return aligned_csv(rows);
}

std::vector<std::string> comparison_labels(const LabeledSpectrum& reference, int per_class) {
  std::vector<std::string> out;
  if (reference.states.empty()) return out;
  const std::string ground = reference.ground().label();
  std::map<std::pair<int, int>, int> taken;
  for (const auto& st : reference.states) {
    const std::string l = st.label();
    if (l == ground) continue;
    int& n = taken[{st.spin, static_cast<int>(st.irrep)}];
    if (n >= per_class) continue;
    ++n;
    out.push_back(l);
  }
  return out;
}

DeviationSummary deviation_report(const std::string& first_name, const LabeledSpectrum& first,
                                  const std::string& second_name, const LabeledSpectrum& second,
                                  const std::vector<std::string>& labels) {
  std::vector<std::string> orphans;
  for (const auto& l : labels) {
    if (!first.find(l)) orphans.push_back(l + " (missing from " + first_name + ")");
    if (!second.find(l)) orphans.push_back(l + " (missing from " + second_name + ")");
  }
  if (!orphans.empty()) {
    std::string msg = "cannot align " + first_name + " and " + second_name + ":";
    for (const auto& o : orphans) msg += " " + o + ";";
    msg.pop_back();
    throw AlignmentError(msg);
  }
  DeviationSummary d;
  d.first = first_name;
  d.second = second_name;
  d.n = labels.size();
  if (labels.empty()) return d;
  std::vector<double> sig;
  bool all_positive = true;
  for (const auto& l : labels) {
    const LabeledState* a = first.find(l);
    const LabeledState* b = second.find(l);
    const double dev = b->excitation_ev - a->excitation_ev;
    d.deviations.push_back(dev);
    d.mean_sigma += b->sigma_ev;
    const double s = std::sqrt(a->sigma_ev * a->sigma_ev + b->sigma_ev * b->sigma_ev);
    if (!(s > 0.0)) all_positive = false;
    sig.push_back(s);
  }
  d.min = *std::min_element(d.deviations.begin(), d.deviations.end());
  d.max = *std::max_element(d.deviations.begin(), d.deviations.end());
  double sum = 0.0;
  for (double v : d.deviations) sum += v;
  d.mean = sum / static_cast<double>(d.n);
  d.mean_sigma /= static_cast<double>(d.n);
  if (all_positive) d.chi2 = chi_squared(d.deviations, sig);
  return d;
}

std::string comparison_csv(const std::vector<DeviationSummary>& rows) {
  std::vector<std::vector<std::string>> cells{
      {"reference", "compared", "n_states", "min_ev", "max_ev", "mean_ev", "mean_sigma_ev", "chi2"}};
  for (const auto& d : rows) {
    cells.push_back({d.first, d.second, std::to_string(d.n), fixed(d.min, 6), fixed(d.max, 6), fixed(d.mean, 6),
                     fixed(d.mean_sigma, 6), d.chi2 ? fixed(*d.chi2, 6) : "NA"});
  }
  return aligned_csv(cells);
}

}  // namespace efqse
