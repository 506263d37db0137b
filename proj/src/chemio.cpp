#include "efqse/chemio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "efqse/errors.hpp"
#include "orbital_metadata_data.hpp"

namespace efqse {

namespace {

std::size_t pair_index(int p, int q) {
  const auto a = static_cast<std::size_t>(std::max(p, q));
  const auto b = static_cast<std::size_t>(std::min(p, q));
  return a * (a + 1) / 2 + b;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

MolecularIntegrals::MolecularIntegrals(int n_orbitals)
    : orbital_irreps(static_cast<std::size_t>(n_orbitals), Irrep::A1),
      n_orbitals_(n_orbitals),
      h_(Eigen::MatrixXd::Zero(n_orbitals, n_orbitals)) {
  const std::size_t npair = static_cast<std::size_t>(n_orbitals) * (n_orbitals + 1) / 2;
  eri_.assign(npair * (npair + 1) / 2, 0.0);
}

void MolecularIntegrals::set_h(int p, int q, double value) {
  h_(p, q) = value;
  h_(q, p) = value;
}

std::size_t MolecularIntegrals::eri_index(int p, int q, int r, int s) {
  return pair_index(static_cast<int>(pair_index(p, q)), static_cast<int>(pair_index(r, s)));
}

void MolecularIntegrals::set_eri(int p, int q, int r, int s, double value) {
  eri_[eri_index(p, q, r, s)] = value;
}

void MolecularIntegrals::validate() const {
  if (n_orbitals_ <= 0) throw ContractViolation("integrals have no orbitals");
  if (static_cast<int>(orbital_irreps.size()) != n_orbitals_) {
    throw ContractViolation("orbital_irreps length does not match n_orbitals");
  }
  if (n_alpha < 0 || n_beta < 0 || n_alpha > n_orbitals_ || n_beta > n_orbitals_) {
    throw ContractViolation("electron counts incompatible with orbital count");
  }
}

void ActiveSpaceSpec::validate(int n_full_orbitals) const {
  if (active_orbital_indices.empty()) throw ConfigError("active space has no orbitals");
  for (std::size_t i = 0; i < active_orbital_indices.size(); ++i) {
    const int idx = active_orbital_indices[i];
    if (idx < 0 || idx >= n_full_orbitals) {
      throw BoundsError("active orbital index " + std::to_string(idx) + " outside 0.." +
                        std::to_string(n_full_orbitals - 1));
    }
    if (i > 0 && idx <= active_orbital_indices[i - 1]) {
      throw ConfigError("active orbital indices must be strictly increasing");
    }
  }
  if (n_active_electrons < 0 || n_active_electrons % 2 != 0) {
    throw ConfigError("number of active electrons must be even and non-negative");
  }
  if (n_active_electrons > 2 * static_cast<int>(active_orbital_indices.size())) {
    throw ConfigError("more active electrons than active spin-orbitals");
  }
}

MolecularIntegrals parse_fcidump(std::string_view text, const FcidumpOptions& options) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;

  // Namelist header, possibly spanning several lines.
  std::string header;
  bool header_done = false;
  bool header_started = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = upper(trim(line));
    if (t.empty()) continue;
    if (!header_started) {
      if (t.rfind("&FCI", 0) != 0) {
        throw ParseError("line " + std::to_string(line_no) + ": expected '&FCI' namelist header");
      }
      header_started = true;
    }
    const auto end_pos = t.find("&END");
    if (end_pos != std::string::npos) {
      header += t.substr(0, end_pos);
      header_done = true;
      break;
    }
    if (t.back() == '/') {
      header += t.substr(0, t.size() - 1);
      header_done = true;
      break;
    }
    header += t + ",";
  }
  if (!header_done) throw ParseError("line " + std::to_string(line_no) + ": unterminated FCIDUMP header");
  const int header_end_line = line_no;

  // Split "KEY=v1,v2,KEY2=..." into key -> values.
  std::map<std::string, std::vector<std::string>> fields;
  {
    std::string body = header.substr(4);
    std::string current_key;
    std::string token;
    auto flush = [&](std::string tok) {
      tok = trim(tok);
      if (tok.empty()) return;
      const auto eq = tok.find('=');
      if (eq != std::string::npos) {
        current_key = trim(tok.substr(0, eq));
        tok = trim(tok.substr(eq + 1));
        fields[current_key];
        if (tok.empty()) return;
      }
      if (current_key.empty()) {
        throw ParseError("line " + std::to_string(header_end_line) + ": header value '" + tok +
                         "' without a key");
      }
      fields[current_key].push_back(tok);
    };
    for (char c : body) {
      if (c == ',' || c == '\n') {
        flush(token);
        token.clear();
      } else {
        token.push_back(c);
      }
    }
    flush(token);
  }
  auto int_field = [&](const std::string& key) -> int {
    auto it = fields.find(key);
    if (it == fields.end() || it->second.size() != 1) {
      throw ParseError("line " + std::to_string(header_end_line) + ": header field " + key +
                       " missing or malformed");
    }
    try {
      return std::stoi(it->second.front());
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(header_end_line) + ": header field " + key +
                       " is not an integer");
    }
  };
  const int norb = int_field("NORB");
  const int nelec = int_field("NELEC");
  const int ms2 = fields.count("MS2") ? int_field("MS2") : 0;
  if (norb <= 0) throw ParseError("line " + std::to_string(header_end_line) + ": NORB must be positive");
  if (ms2 != 0) throw ConfigError("unsupported reference: MS2=" + std::to_string(ms2) + " (only MS2=0)");
  if (nelec < 0 || nelec % 2 != 0 || nelec > 2 * norb) {
    throw ConfigError("unsupported electron count NELEC=" + std::to_string(nelec) + " for MS2=0");
  }

  MolecularIntegrals ints(norb);
  ints.n_alpha = nelec / 2;
  ints.n_beta = nelec / 2;
  if (auto it = fields.find("ORBSYM"); it != fields.end() && !it->second.empty()) {
    if (static_cast<int>(it->second.size()) != norb) {
      throw ParseError("line " + std::to_string(header_end_line) + ": ORBSYM has " +
                       std::to_string(it->second.size()) + " entries, expected " + std::to_string(norb));
    }
    for (int i = 0; i < norb; ++i) {
      ints.orbital_irreps[static_cast<std::size_t>(i)] =
          options.convention.to_irrep(std::stoi(it->second[static_cast<std::size_t>(i)]));
    }
  }

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    std::istringstream ls(t);
    std::string value_token;
    int idx[4];
    if (!(ls >> value_token >> idx[0] >> idx[1] >> idx[2] >> idx[3])) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'value i j k l'");
    }
    // Accept Fortran exponent markers.
    std::replace(value_token.begin(), value_token.end(), 'D', 'E');
    std::replace(value_token.begin(), value_token.end(), 'd', 'e');
    double value = 0.0;
    {
      const char* first = value_token.data();
      const char* last = first + value_token.size();
      if (*first == '+') ++first;
      auto res = std::from_chars(first, last, value);
      if (res.ec != std::errc() || res.ptr != last) {
        throw ParseError("line " + std::to_string(line_no) + ": bad numeric value '" + value_token + "'");
      }
    }
    for (int v : idx) {
      if (v < 0 || v > norb) {
        throw BoundsError("line " + std::to_string(line_no) + ": orbital index " + std::to_string(v) +
                          " outside 0.." + std::to_string(norb));
      }
    }
    const int i = idx[0], j = idx[1], k = idx[2], l = idx[3];
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      ints.core_energy = value;
    } else if (k == 0 && l == 0) {
      if (i == 0 || j == 0) {
        throw BoundsError("line " + std::to_string(line_no) + ": one-electron entry with zero index");
      }
      ints.set_h(i - 1, j - 1, value);
    } else if (i > 0 && j > 0 && k > 0 && l > 0) {
      ints.set_eri(i - 1, j - 1, k - 1, l - 1, value);
    } else if (j == 0 && k == 0 && l == 0) {
      // Orbital energy lines (value i 0 0 0) carry no Hamiltonian information.
    } else {
      throw BoundsError("line " + std::to_string(line_no) + ": unsupported index pattern");
    }
  }
  return ints;
}

MolecularIntegrals read_fcidump(const std::string& path, const FcidumpOptions& options) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open FCIDUMP file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_fcidump(ss.str(), options);
}

std::string write_fcidump(const MolecularIntegrals& ints, const FcidumpOptions& options) {
  const int n = ints.n_orbitals();
  std::ostringstream out;
  out << " &FCI NORB=" << n << ",NELEC=" << (ints.n_alpha + ints.n_beta) << ",MS2="
      << (ints.n_alpha - ints.n_beta) << ",\n  ORBSYM=";
  for (int i = 0; i < n; ++i) {
    out << options.convention.to_orbsym(ints.orbital_irreps[static_cast<std::size_t>(i)]) << ",";
  }
  out << "\n  ISYM=1,\n &END\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const int ij = i * (i + 1) / 2 + j;
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l <= k; ++l) {
          const int kl = k * (k + 1) / 2 + l;
          if (kl > ij) continue;
          const double v = ints.eri(i, j, k, l);
          if (v == 0.0) continue;
          out << format_double(v) << " " << i + 1 << " " << j + 1 << " " << k + 1 << " " << l + 1
              << "\n";
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = ints.h(i, j);
      if (v == 0.0) continue;
      out << format_double(v) << " " << i + 1 << " " << j + 1 << " 0 0\n";
    }
  }
  out << format_double(ints.core_energy) << " 0 0 0 0\n";
  return out.str();
}

MolecularIntegrals freeze_core(const MolecularIntegrals& full, const ActiveSpaceSpec& spec,
                               const std::vector<int>& frozen_occupied) {
  spec.validate(full.n_orbitals());
  std::set<int> frozen;
  for (int f : frozen_occupied) {
    if (f < 0 || f >= full.n_orbitals()) {
      throw BoundsError("frozen orbital index " + std::to_string(f) + " out of range");
    }
    if (!frozen.insert(f).second) throw ConfigError("frozen orbital listed twice");
  }
  for (int a : spec.active_orbital_indices) {
    if (frozen.count(a)) {
      throw ConfigError("orbital " + std::to_string(a) + " is both frozen and active");
    }
  }

  const auto& act = spec.active_orbital_indices;
  const int na = static_cast<int>(act.size());
  MolecularIntegrals out(na);
  out.n_alpha = spec.n_active_electrons / 2;
  out.n_beta = spec.n_active_electrons / 2;
  out.point_group = full.point_group;

  double core = full.core_energy;
  for (int i : frozen) {
    core += 2.0 * full.h(i, i);
    for (int j : frozen) core += 2.0 * full.eri(i, i, j, j) - full.eri(i, j, j, i);
  }
  out.core_energy = core;

  for (int t = 0; t < na; ++t) {
    out.orbital_irreps[static_cast<std::size_t>(t)] =
        full.orbital_irreps[static_cast<std::size_t>(act[static_cast<std::size_t>(t)])];
    for (int u = 0; u <= t; ++u) {
      const int tf = act[static_cast<std::size_t>(t)];
      const int uf = act[static_cast<std::size_t>(u)];
      double v = full.h(tf, uf);
      for (int i : frozen) v += 2.0 * full.eri(tf, uf, i, i) - full.eri(tf, i, i, uf);
      out.set_h(t, u, v);
    }
  }
  for (int p = 0; p < na; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r < na; ++r)
        for (int s = 0; s <= r; ++s) {
          if (r * (r + 1) / 2 + s > p * (p + 1) / 2 + q) continue;
          out.set_eri(p, q, r, s,
                      full.eri(act[static_cast<std::size_t>(p)], act[static_cast<std::size_t>(q)],
                               act[static_cast<std::size_t>(r)], act[static_cast<std::size_t>(s)]));
        }
  return out;
}

std::vector<std::pair<std::string, OrbitalRecord>> parse_orbital_metadata(std::string_view text) {
  std::vector<std::pair<std::string, OrbitalRecord>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ls(t);
    std::string molecule, irrep, type;
    OrbitalRecord rec;
    if (!(ls >> molecule >> rec.index >> irrep >> rec.occupancy >> type >> rec.energy_ev)) {
      throw ParseError("orbital metadata line " + std::to_string(line_no) + ": expected 6 columns");
    }
    rec.irrep = parse_irrep(irrep);
    rec.character = type;
    rows.emplace_back(molecule, rec);
  }
  return rows;
}

std::vector<OrbitalRecord> orbital_metadata_table(std::string_view molecule) {
  static const auto rows = parse_orbital_metadata(detail::kOrbitalMetadataTsv);
  std::string key;
  for (char c : molecule) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  std::vector<OrbitalRecord> out;
  for (const auto& [name, rec] : rows) {
    if (name == key) out.push_back(rec);
  }
  if (out.empty()) throw ConfigError("no orbital metadata for molecule '" + std::string(molecule) + "'");
  std::sort(out.begin(), out.end(),
            [](const OrbitalRecord& a, const OrbitalRecord& b) { return a.index < b.index; });
  return out;
}

}  // namespace efqse
