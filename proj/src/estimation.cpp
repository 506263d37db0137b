#include "efqse/estimation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "efqse/errors.hpp"
#include "efqse/parallel.hpp"

namespace efqse {

std::string_view mode_name(ExecutionMode m) {
  switch (m) {
    case ExecutionMode::Exact: return "exact";
    case ExecutionMode::Sampled: return "sampled";
    case ExecutionMode::Noisy: return "noisy";
  }
  return "?";
}

ExecutionMode parse_mode(std::string_view name) {
  if (name == "exact") return ExecutionMode::Exact;
  if (name == "sampled") return ExecutionMode::Sampled;
  if (name == "noisy") return ExecutionMode::Noisy;
  throw ConfigError("unknown mode '" + std::string(name) + "' (expected exact, sampled or noisy)");
}

namespace {

// Axis a Pauli letter is read in; identity positions default to Z.
Axis letter_axis(const PauliString& p, int q) {
  const bool bx = (p.x >> q) & 1u;
  const bool bz = (p.z >> q) & 1u;
  if (bx) return bz ? Axis::Y : Axis::X;
  return Axis::Z;
}

}  // namespace

bool MeasurementPlan::all_z(const std::vector<Axis>& setting) {
  return std::all_of(setting.begin(), setting.end(), [](Axis a) { return a == Axis::Z; });
}

std::size_t MeasurementPlan::n_members() const {
  std::size_t n = 0;
  for (const auto& m : members) n += m.size();
  return n;
}

MeasurementPlan MeasurementPlan::tomography(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 12) throw BoundsError("tomography plan supports 1..12 qubits");
  MeasurementPlan plan;
  plan.n_qubits = n_qubits;
  std::size_t n_settings = 1;
  for (int q = 0; q < n_qubits; ++q) n_settings *= 3;
  plan.settings.resize(n_settings);
  plan.members.resize(n_settings);
  for (std::size_t s = 0; s < n_settings; ++s) {
    std::vector<Axis> axes(static_cast<std::size_t>(n_qubits));
    std::size_t code = s;
    std::uint32_t xmask = 0, ymask = 0, zmask = 0;
    for (int q = 0; q < n_qubits; ++q) {
      const int d = static_cast<int>(code % 3);
      code /= 3;
      axes[static_cast<std::size_t>(q)] = d == 0 ? Axis::Z : (d == 1 ? Axis::X : Axis::Y);
      const std::uint32_t bit = 1u << q;
      if (d == 0) zmask |= bit;
      if (d == 1) xmask |= bit;
      if (d == 2) ymask |= bit;
    }
    plan.settings[s] = axes;
    // Members: letters fixed on X/Y qubits, any subset of the Z qubits.
    for (std::uint32_t sub = zmask;; sub = (sub - 1) & zmask) {
      const PauliString p{xmask | ymask, ymask | sub};
      if (!p.is_identity()) plan.members[s].push_back({p.index(n_qubits), p.support()});
      if (sub == 0) break;
    }
    std::sort(plan.members[s].begin(), plan.members[s].end(),
              [](const Member& a, const Member& b) { return a.pauli_index < b.pauli_index; });
  }
  return plan;
}

MeasurementPlan MeasurementPlan::grouped(int n_qubits, const std::vector<PauliString>& paulis) {
  MeasurementPlan plan;
  plan.n_qubits = n_qubits;
  std::vector<PauliString> todo;
  for (const auto& p : paulis) {
    if (!p.is_identity()) todo.push_back(p);
  }
  std::sort(todo.begin(), todo.end());
  todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
  std::stable_sort(todo.begin(), todo.end(), [](const PauliString& a, const PauliString& b) {
    return std::popcount(a.support()) > std::popcount(b.support());
  });
  // Each group is a partial assignment of letters, kept as a Pauli string.
  std::vector<PauliString> groups;
  for (const auto& p : todo) {
    std::size_t g = 0;
    for (; g < groups.size(); ++g) {
      const PauliString& h = groups[g];
      const std::uint32_t common = h.support() & p.support();
      if (((h.x ^ p.x) & common) == 0 && ((h.z ^ p.z) & common) == 0) break;
    }
    if (g == groups.size()) {
      groups.push_back(p);
      plan.members.emplace_back();
    } else {
      groups[g].x |= p.x;
      groups[g].z |= p.z;
    }
    plan.members[g].push_back({p.index(n_qubits), p.support()});
  }
  for (const auto& h : groups) {
    std::vector<Axis> axes(static_cast<std::size_t>(n_qubits));
    for (int q = 0; q < n_qubits; ++q) axes[static_cast<std::size_t>(q)] = letter_axis(h, q);
    plan.settings.push_back(axes);
  }
  return plan;
}

double PauliEstimates::mean_acceptance() const {
  double acc = 0.0;
  std::size_t n = 0;
  for (const auto& circ : records_)
    for (const auto& r : circ) {
      if (!r.post_selected) continue;
      acc += r.acceptance_rate;
      ++n;
    }
  return n == 0 ? 1.0 : acc / static_cast<double>(n);
}

PauliEstimates measure(const std::vector<CircuitJob>& jobs, std::shared_ptr<const MeasurementPlan> plan,
                       const SamplingOptions& options, std::uint64_t stream) {
  if (options.mode == ExecutionMode::Exact) {
    throw ContractViolation("measure() is for sampled or noisy execution");
  }
  if (options.shots == 0) throw ConfigError("shots must be at least 1");
  const int n = plan->n_qubits;
  const bool noisy = options.mode == ExecutionMode::Noisy;
  if (noisy) {
    options.noise.validate();
    if (options.noise.n_qubits() != n) throw ConfigError("noise model size does not match the register");
  }
  PauliEstimates out;
  out.n_ = n;
  out.plan_ = plan;
  const std::size_t n_paulis = std::size_t{1} << (2 * n);
  const std::size_t dim = std::size_t{1} << n;
  out.measured_.assign(n_paulis, 0);
  out.measured_[0] = 1;
  for (const auto& ms : plan->members)
    for (const auto& m : ms) out.measured_[m.pauli_index] = 1;

  const bool rescale = noisy && options.mitigation.rescale;
  out.calibration_ = rescale ? calibrate_readout(options.noise, options.shots, options.mitigation.twirl,
                                                 derive_seed(options.seed, {stream, ~0ULL}))
                             : ReadoutCalibration::ideal(n);

  const std::size_t n_settings = plan->settings.size();
  std::vector<bool> post_selectable(n_settings);
  for (std::size_t s = 0; s < n_settings; ++s) {
    post_selectable[s] = noisy && options.mitigation.post_select && MeasurementPlan::all_z(plan->settings[s]);
  }
  out.attenuation_.resize(n_settings);
  for (std::size_t s = 0; s < n_settings; ++s) {
    for (const auto& m : plan->members[s]) {
      const double att = (rescale && !post_selectable[s]) ? out.calibration_.attenuation_of(m.support) : 1.0;
      if (att < kMinAttenuation) {
        throw NumericalError("readout attenuation " + std::to_string(att) +
                             " below reliability floor for a measured Pauli string");
      }
      out.attenuation_[s].push_back(att);
    }
  }

  out.records_.assign(jobs.size(), std::vector<PauliEstimates::SettingRecord>(n_settings));
  out.estimates_.assign(jobs.size(), std::vector<double>(n_paulis, 0.0));
  const std::size_t n_tasks = jobs.size() * n_settings;
  parallel_for(
      n_tasks,
      [&](std::size_t task) {
        const std::size_t c = task / n_settings;
        const std::size_t s = task % n_settings;
        const Histogram ideal =
            sample_counts(jobs[c].state, plan->settings[s], options.shots,
                          derive_seed(options.seed, {stream, c, s, 0}));
        auto& rec = out.records_[c][s];
        if (noisy) {
          std::mt19937_64 rng(derive_seed(options.seed, {stream, c, s, 1}));
          rec.counts = options.mitigation.twirl ? twirled_readout(ideal, options.noise, rng)
                                                : corrupt_counts(ideal, options.noise, rng);
        } else {
          rec.counts = ideal;
        }
        if (post_selectable[s]) {
          PostSelection ps = post_select(rec.counts, jobs[c].expected_weight);
          rec.counts = std::move(ps.counts);
          rec.acceptance_rate = ps.acceptance_rate;
          rec.post_selected = true;
        }
        rec.kept = histogram_total(rec.counts);
        std::vector<double> w(dim);
        for (std::size_t o = 0; o < dim; ++o) w[o] = static_cast<double>(rec.counts[o]);
        walsh_hadamard(w);
        auto& est = out.estimates_[c];
        est[0] = 1.0;
        const auto& members = plan->members[s];
        for (std::size_t i = 0; i < members.size(); ++i) {
          est[members[i].pauli_index] =
              w[members[i].support] / static_cast<double>(rec.kept) / out.attenuation_[s][i];
        }
      },
      options.threads);
  return out;
}

double PauliEstimates::variance(const std::vector<std::vector<double>>& gradient) const {
  if (gradient.size() != records_.size()) throw ContractViolation("gradient has the wrong circuit count");
  const std::size_t dim = std::size_t{1} << n_;
  double total = 0.0;
  std::vector<double> g(dim), v(dim);
  for (std::size_t c = 0; c < records_.size(); ++c) {
    const auto& grad = gradient[c];
    if (grad.empty()) continue;
    for (std::size_t s = 0; s < plan_->settings.size(); ++s) {
      const auto& members = plan_->members[s];
      std::fill(g.begin(), g.end(), 0.0);
      bool any = false;
      for (std::size_t i = 0; i < members.size(); ++i) {
        const double d = grad[members[i].pauli_index];
        if (d == 0.0) continue;
        g[members[i].support] = d / attenuation_[s][i];
        any = true;
      }
      if (!any) continue;
      v = g;
      walsh_hadamard(v);
      const auto& rec = records_[c][s];
      double m1 = 0.0, m2 = 0.0;
      for (std::size_t o = 0; o < dim; ++o) {
        if (rec.counts[o] == 0) continue;
        const double w = static_cast<double>(rec.counts[o]);
        m1 += w * v[o];
        m2 += w * v[o] * v[o];
      }
      const double kept = static_cast<double>(rec.kept);
      m1 /= kept;
      m2 /= kept;
      total += std::max(0.0, m2 - m1 * m1) / kept;
    }
  }
  return total;
}

}  // namespace efqse
