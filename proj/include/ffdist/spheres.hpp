#pragma once

// n-spheres S_j = {x : ||x||_n = j}, their spectra, and measured decay constants.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "ffdist/characters.hpp"
#include "ffdist/error.hpp"
#include "ffdist/field.hpp"
#include "ffdist/parallel.hpp"
#include "ffdist/rng.hpp"
#include "ffdist/vectorspace.hpp"

namespace ffdist {

struct SphereSpec {
  SphereSpec(PrimeField field_in, unsigned d_in, std::uint64_t n_in, std::int64_t j_in)
      : field(std::move(field_in)), d(d_in), n(n_in), j(field.element(j_in)) {
    if (d < 2) fail(ErrorKind::kInvalidArgument, "spheres need d >= 2");
    if (n < 2) fail(ErrorKind::kInvalidArgument, "norm exponent must be >= 2");
  }

  PrimeField field;
  unsigned d;
  std::uint64_t n;
  FieldElement j;
};

/// Which decay estimate, if any, covers (q, d, n).
enum class DecayRegime {
  kTwoDimensional,  // d = 2, any n >= 2, any prime q
  kQuadratic,       // n = 2, any d
  kCubicSplit,      // n = 3, d >= 3, q = 1 mod 3
  kCubeBijective,   // n = 3, d >= 3, q = 2 mod 3: cube map permutes F_q, no estimate asserted
  kExploratory,     // n >= 4, d >= 3: no claim
};

constexpr std::string_view to_string(DecayRegime regime) {
  switch (regime) {
    case DecayRegime::kTwoDimensional: return "two-dimensional";
    case DecayRegime::kQuadratic: return "quadratic";
    case DecayRegime::kCubicSplit: return "cubic-q1mod3";
    case DecayRegime::kCubeBijective: return "cube-bijective";
    case DecayRegime::kExploratory: return "exploratory";
  }
  return "unknown";
}

constexpr DecayRegime classify_decay(Residue q, unsigned d, std::uint64_t n) {
  if (d == 2) return DecayRegime::kTwoDimensional;
  if (n == 2) return DecayRegime::kQuadratic;
  if (n == 3) return q % 3 == 1 ? DecayRegime::kCubicSplit : DecayRegime::kCubeBijective;
  return DecayRegime::kExploratory;
}

constexpr bool decay_hypothesis_holds(Residue q, unsigned d, std::uint64_t n) {
  const auto regime = classify_decay(q, d, n);
  return regime != DecayRegime::kCubeBijective && regime != DecayRegime::kExploratory;
}

/// Exact enumeration of S_j.
inline PointSet sphere_points(const SphereSpec& spec) {
  const GridShape shape(spec.field.modulus(), spec.d);
  const auto norms = norm_table(shape, spec.n);
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (norms[i] == spec.j.value()) members.push_back(i);
  }
  return PointSet::from_indices(spec.field, spec.d, members);
}

namespace detail {

inline SpectralFunction sphere_spectrum_from_norms(const PrimeField& field, unsigned d, std::span<const Residue> norms,
                                                   Residue j) {
  std::vector<Complex> indicator(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) indicator[i] = norms[i] == j ? 1.0 : 0.0;
  return fourier_transform(field, d, indicator);
}

}  // namespace detail

/// S_j-hat(m) over all m in F_q^d.
inline SpectralFunction sphere_spectrum(const SphereSpec& spec) {
  const auto norms = norm_table(GridShape(spec.field.modulus(), spec.d), spec.n);
  return detail::sphere_spectrum_from_norms(spec.field, spec.d, norms, spec.j.value());
}

/// Spectra of every sphere S_0, ..., S_{q-1} in F_q^d for one exponent n.
class SphereSpectra {
 public:
  SphereSpectra(const PrimeField& field, unsigned d, std::uint64_t n, unsigned jobs = 1)
      : field_(field), d_(d), n_(n), norms_(norm_table(GridShape(field.modulus(), d), n)) {
    if (d < 2) fail(ErrorKind::kInvalidArgument, "spheres need d >= 2");
    if (n < 2) fail(ErrorKind::kInvalidArgument, "norm exponent must be >= 2");
    spectra_.resize(field.modulus());
    parallel_for(spectra_.size(), jobs, [&](std::size_t j) {
      const auto spectrum = detail::sphere_spectrum_from_norms(field_, d_, norms_, static_cast<Residue>(j));
      spectra_[j].assign(spectrum.values().begin(), spectrum.values().end());
    });
  }

  const PrimeField& field() const noexcept { return field_; }
  unsigned dimension() const noexcept { return d_; }
  std::uint64_t exponent() const noexcept { return n_; }
  const std::vector<Residue>& norms() const noexcept { return norms_; }
  std::span<const Complex> operator[](Residue j) const { return spectra_.at(j); }

 private:
  PrimeField field_;
  unsigned d_;
  std::uint64_t n_;
  std::vector<Residue> norms_;
  std::vector<std::vector<Complex>> spectra_;
};

/// Measured analogue of the decay estimates for one sphere.
struct DecayReport {
  Residue q = 0;
  unsigned d = 0;
  std::uint64_t n = 0;
  Residue j = 0;
  std::size_t sphere_size = 0;
  Complex zero_mode;                 // S_j-hat(0)
  double zero_mode_deviation = 0.0;  // |S_j-hat(0) - 1/q| q^{(d+1)/2}
  double max_nonzero_mode = 0.0;     // max_{m != 0} |S_j-hat(m)|
  std::size_t argmax_mode = 0;       // grid index attaining max_nonzero_mode
  double decay_constant = 0.0;       // max_nonzero_mode q^{(d+1)/2}
  bool hypothesis_ok = false;
  DecayRegime regime = DecayRegime::kExploratory;
};

namespace detail {

inline std::size_t count_radius(std::span<const Residue> norms, Residue j) {
  return static_cast<std::size_t>(std::count(norms.begin(), norms.end(), j));
}

inline DecayReport summarize_spectrum(const SpectralFunction& spectrum, std::uint64_t n, Residue j,
                                      std::size_t sphere_size) {
  const Residue q = spectrum.shape().modulus();
  const unsigned d = spectrum.shape().dimension();
  const double scale = std::pow(static_cast<double>(q), (d + 1) / 2.0);

  DecayReport report;
  report.q = q;
  report.d = d;
  report.n = n;
  report.j = j;
  report.zero_mode = spectrum[0];
  report.sphere_size = sphere_size;
  report.zero_mode_deviation = std::abs(spectrum[0] - 1.0 / q) * scale;
  for (std::size_t m = 1; m < spectrum.shape().size(); ++m) {
    const double magnitude = std::abs(spectrum[m]);
    if (magnitude > report.max_nonzero_mode) {
      report.max_nonzero_mode = magnitude;
      report.argmax_mode = m;
    }
  }
  report.decay_constant = report.max_nonzero_mode * scale;
  report.regime = classify_decay(q, d, n);
  report.hypothesis_ok = decay_hypothesis_holds(q, d, n);
  return report;
}

}  // namespace detail

/// Spectrum summary for any radius, including j = 0 (exploratory; no estimate applies there).
inline DecayReport measure_sphere(const SphereSpec& spec) {
  const auto norms = norm_table(GridShape(spec.field.modulus(), spec.d), spec.n);
  const auto spectrum = detail::sphere_spectrum_from_norms(spec.field, spec.d, norms, spec.j.value());
  return detail::summarize_spectrum(spectrum, spec.n, spec.j.value(), detail::count_radius(norms, spec.j.value()));
}

/// Throws ZeroRadius for j = 0, which the decay estimates exclude.
inline DecayReport decay_report(const SphereSpec& spec) {
  if (spec.j.is_zero()) fail(ErrorKind::kZeroRadius, "decay estimates require j != 0");
  return measure_sphere(spec);
}

struct RadiusPolicy {
  enum class Kind { kAllNonzero, kSample };

  static RadiusPolicy all_nonzero() { return {}; }
  static RadiusPolicy sample(std::size_t count, std::uint64_t seed) { return {Kind::kSample, count, seed}; }

  Kind kind = Kind::kAllNonzero;
  std::size_t count = 0;
  std::uint64_t seed = 0;

  /// Radii for F_q, ascending.
  std::vector<Residue> radii(Residue q) const {
    std::vector<Residue> all;
    for (Residue j = 1; j < q; ++j) all.push_back(j);
    if (kind == Kind::kAllNonzero || count >= all.size()) return all;
    Rng rng(seed, "radius", q);
    for (std::size_t i = 0; i < count; ++i) {
      std::swap(all[i], all[i + rng.below(all.size() - i)]);
    }
    all.resize(count);
    std::sort(all.begin(), all.end());
    return all;
  }
};

/// One DecayReport per (q, j); sorted by (q, j).
inline std::vector<DecayReport> constant_sweep(std::uint64_t n, unsigned d, const RadiusPolicy& policy,
                                               std::span<const std::uint64_t> q_list, unsigned jobs = 1) {
  struct Work {
    std::size_t field_slot;
    Residue j;
  };
  std::vector<PrimeField> fields;
  std::vector<std::vector<Residue>> norms;
  std::vector<Work> work;
  if (d < 2) fail(ErrorKind::kInvalidArgument, "spheres need d >= 2");
  if (n < 2) fail(ErrorKind::kInvalidArgument, "norm exponent must be >= 2");
  for (auto q : q_list) fields.push_back(make_field(q));
  std::sort(fields.begin(), fields.end(), [](const auto& a, const auto& b) { return a.modulus() < b.modulus(); });
  for (std::size_t slot = 0; slot < fields.size(); ++slot) {
    norms.push_back(norm_table(GridShape(fields[slot].modulus(), d), n));
    for (Residue j : policy.radii(fields[slot].modulus())) work.push_back({slot, j});
  }

  std::vector<DecayReport> reports(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    const auto& field = fields[work[i].field_slot];
    const auto& table = norms[work[i].field_slot];
    const auto spectrum = detail::sphere_spectrum_from_norms(field, d, table, work[i].j);
    reports[i] = detail::summarize_spectrum(spectrum, n, work[i].j, detail::count_radius(table, work[i].j));
  });
  std::stable_sort(reports.begin(), reports.end(),
                   [](const DecayReport& a, const DecayReport& b) { return std::tie(a.q, a.j) < std::tie(b.q, b.j); });
  return reports;
}

}  // namespace ffdist
