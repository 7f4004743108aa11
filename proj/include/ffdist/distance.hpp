#pragma once

// Distance sets, pair counts by enumeration and by the spectral identity, and coverage experiments.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ffdist/error.hpp"
#include "ffdist/field.hpp"
#include "ffdist/parallel.hpp"
#include "ffdist/rng.hpp"
#include "ffdist/spheres.hpp"
#include "ffdist/vectorspace.hpp"

namespace ffdist {

/// Envelope constant standing in for the implicit constants of the estimates.
inline constexpr double kDefaultEnvelope = 10.0;

/// Enumeration switches to the difference-grid method beyond this many pair operations.
inline constexpr double kPairwiseBudget = 1e8;

/// A subset of F_q stored as a membership mask.
class ResidueSet {
 public:
  explicit ResidueSet(Residue q) : present_(q, 0) {}

  void insert(Residue r) { present_.at(r) = 1; }
  bool contains(Residue r) const { return present_.at(r) != 0; }
  Residue modulus() const noexcept { return static_cast<Residue>(present_.size()); }

  std::size_t size() const { return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), 1)); }

  std::vector<Residue> values() const {
    std::vector<Residue> out;
    for (Residue r = 0; r < present_.size(); ++r) {
      if (present_[r]) out.push_back(r);
    }
    return out;
  }

  ResidueSet complement() const {
    ResidueSet out(modulus());
    for (Residue r = 0; r < present_.size(); ++r) out.present_[r] = present_[r] ? 0 : 1;
    return out;
  }

  friend bool operator==(const ResidueSet&, const ResidueSet&) = default;

 private:
  std::vector<std::uint8_t> present_;
};

enum class CountMethod { kAuto, kPairwise, kDifferenceGrid, kCorrelation };

namespace detail {

inline std::vector<std::uint64_t> histogram_pairwise(const PointSet& e, const PointSet& f, std::uint64_t n) {
  const GridShape& shape = e.shape();
  const Residue q = shape.modulus();
  const unsigned d = shape.dimension();
  const auto powers = power_table(q, n);

  std::vector<std::vector<Residue>> f_coords;
  f_coords.reserve(f.size());
  for (auto y : f.indices()) f_coords.push_back(shape.coords_of(y));

  std::vector<std::uint64_t> counts(q, 0);
  for (auto x : e.indices()) {
    const auto xc = shape.coords_of(x);
    for (const auto& yc : f_coords) {
      Residue norm = 0;
      for (unsigned i = 0; i < d; ++i) norm = (norm + powers[(xc[i] + q - yc[i]) % q]) % q;
      ++counts[norm];
    }
  }
  return counts;
}

// For each x in E walk every difference vector v and test x - v in F; norms come from the grid table.
inline std::vector<std::uint64_t> histogram_difference_grid(const PointSet& e, const PointSet& f, std::uint64_t n) {
  const GridShape& shape = e.shape();
  const auto norms = norm_table(shape, n);
  const auto member = f.membership();
  std::vector<std::uint64_t> counts(shape.modulus(), 0);
  for (auto x : e.indices()) {
    for (std::size_t v = 0; v < shape.size(); ++v) {
      if (member[shape.difference(x, v)]) ++counts[norms[v]];
    }
  }
  return counts;
}

// Difference multiplicities #{(x, y) : x - y = v} via the unscaled transforms of both indicators, O(d q^{d+1}).
inline std::vector<std::uint64_t> histogram_correlation(const PointSet& e, const PointSet& f, std::uint64_t n) {
  const GridShape& shape = e.shape();
  auto a = e.indicator();
  auto b = f.indicator();
  separable_dft(shape, a, -1);
  separable_dft(shape, b, -1);
  for (std::size_t m = 0; m < a.size(); ++m) a[m] *= std::conj(b[m]);
  separable_dft(shape, a, +1);

  const auto norms = norm_table(shape, n);
  const double scale = 1.0 / static_cast<double>(shape.size());
  std::vector<std::uint64_t> counts(shape.modulus(), 0);
  for (std::size_t v = 0; v < shape.size(); ++v) {
    counts[norms[v]] += static_cast<std::uint64_t>(std::max<long long>(0, std::llround(a[v].real() * scale)));
  }
  return counts;
}

inline void require_nonempty(const PointSet& set, const char* name) {
  if (set.empty()) fail(ErrorKind::kEmptySet, std::string(name) + " is empty");
}

}  // namespace detail

/// counts[j] = #{(x, y) in E x F : ||x - y||_n = j}.
///
/// kAuto always enumerates: pairwise up to kPairwiseBudget operations, the difference grid beyond.
inline std::vector<std::uint64_t> distance_histogram(const PointSet& e, const PointSet& f, std::uint64_t n,
                                                     CountMethod method = CountMethod::kAuto) {
  require_same_ambient(e, f);
  if (method == CountMethod::kAuto) {
    const double pairwise = static_cast<double>(e.size()) * static_cast<double>(f.size()) * e.dimension();
    method = pairwise > kPairwiseBudget ? CountMethod::kDifferenceGrid : CountMethod::kPairwise;
  }
  switch (method) {
    case CountMethod::kPairwise: return detail::histogram_pairwise(e, f, n);
    case CountMethod::kDifferenceGrid: return detail::histogram_difference_grid(e, f, n);
    default: return detail::histogram_correlation(e, f, n);
  }
}

/// Delta_n(E, F) = {||x - y||_n : x in E, y in F}.
///
/// kAuto enumerates pairs while #E #F <= q^{d+1} d and convolves on the grid beyond that.
inline ResidueSet distance_set(const PointSet& e, const PointSet& f, std::uint64_t n,
                               CountMethod method = CountMethod::kAuto) {
  detail::require_nonempty(e, "E");
  detail::require_nonempty(f, "F");
  require_same_ambient(e, f);
  if (method == CountMethod::kAuto) {
    const double pairs = static_cast<double>(e.size()) * static_cast<double>(f.size());
    const double grid = std::pow(static_cast<double>(e.field().modulus()), e.dimension() + 1) * e.dimension();
    method = pairs > grid ? CountMethod::kCorrelation : CountMethod::kPairwise;
  }
  const auto counts = distance_histogram(e, f, n, method);
  ResidueSet out(e.field().modulus());
  for (Residue j = 0; j < counts.size(); ++j) {
    if (counts[j]) out.insert(j);
  }
  return out;
}

/// Delta_n(E).
inline ResidueSet distance_set(const PointSet& e, std::uint64_t n, CountMethod method = CountMethod::kAuto) {
  return distance_set(e, e, n, method);
}

struct PairCountResult {
  Residue j = 0;
  std::uint64_t brute = 0;
  double spectral = 0.0;
  double i_term = 0.0;   // #E #F S_j-hat(0)
  double ii_term = 0.0;  // q^{2d} sum_{m != 0} conj(E-hat(m)) F-hat(m) S_j-hat(m)
  double bound_rhs = 0.0;

  bool within_bound() const { return static_cast<double>(brute) <= bound_rhs; }
  double bound_ratio() const { return bound_rhs > 0 ? static_cast<double>(brute) / bound_rhs : 0.0; }
};

/// Pair counts for one (E, F, n) over many radii, sharing the transforms of E and F.
class PairCounter {
 public:
  PairCounter(PointSet e, PointSet f, std::uint64_t n, double envelope = kDefaultEnvelope)
      : PairCounter(std::move(e), std::move(f), nullptr, n, envelope) {}

  /// Reuses sphere spectra computed once for the ambient space of E and F.
  PairCounter(PointSet e, PointSet f, std::shared_ptr<const SphereSpectra> spheres, double envelope = kDefaultEnvelope)
      : PairCounter(std::move(e), std::move(f), spheres, spheres ? spheres->exponent() : 0, envelope) {}

  const std::vector<std::uint64_t>& histogram() const noexcept { return histogram_; }

  PairCountResult count(Residue j) const {
    const GridShape& shape = e_.shape();
    const Residue q = shape.modulus();
    if (j >= q) fail(ErrorKind::kInvalidArgument, "radius out of range");
    std::vector<Complex> own;
    std::span<const Complex> sphere;
    if (spheres_) {
      sphere = (*spheres_)[j];
    } else {
      const auto spectrum = detail::sphere_spectrum_from_norms(e_.field(), shape.dimension(), norms_, j);
      own.assign(spectrum.values().begin(), spectrum.values().end());
      sphere = own;
    }

    const double q_2d = static_cast<double>(shape.size()) * static_cast<double>(shape.size());
    Complex rest = 0.0;
    for (std::size_t m = 1; m < shape.size(); ++m) rest += std::conj(e_hat_[m]) * f_hat_[m] * sphere[m];

    PairCountResult result;
    result.j = j;
    result.brute = histogram_[j];
    result.i_term = (q_2d * std::conj(e_hat_[0]) * f_hat_[0] * sphere[0]).real();
    result.ii_term = (q_2d * rest).real();
    result.spectral = result.i_term + result.ii_term;
    const double ef = static_cast<double>(e_.size()) * static_cast<double>(f_.size());
    result.bound_rhs = ef / q + envelope_ * std::pow(static_cast<double>(q), (shape.dimension() - 1) / 2.0) * std::sqrt(ef);
    return result;
  }

 private:
  PairCounter(PointSet e, PointSet f, std::shared_ptr<const SphereSpectra> spheres, std::uint64_t n, double envelope)
      : e_(std::move(e)), f_(std::move(f)), spheres_(std::move(spheres)), n_(n), envelope_(envelope) {
    require_same_ambient(e_, f_);
    detail::require_nonempty(e_, "E");
    detail::require_nonempty(f_, "F");
    if (spheres_ && (spheres_->field() != e_.field() || spheres_->dimension() != e_.dimension())) {
      fail(ErrorKind::kAmbientMismatch, "sphere spectra computed for a different ambient space");
    }
    histogram_ = distance_histogram(e_, f_, n_);
    e_hat_ = copy_values(fourier_transform(e_));
    f_hat_ = copy_values(fourier_transform(f_));
    if (!spheres_) norms_ = norm_table(e_.shape(), n_);
  }

  static std::vector<Complex> copy_values(const SpectralFunction& spectrum) {
    return {spectrum.values().begin(), spectrum.values().end()};
  }

  PointSet e_;
  PointSet f_;
  std::shared_ptr<const SphereSpectra> spheres_;
  std::uint64_t n_;
  double envelope_;
  std::vector<std::uint64_t> histogram_;
  std::vector<Complex> e_hat_;
  std::vector<Complex> f_hat_;
  std::vector<Residue> norms_;
};

/// #{(x, y) in E x F : ||x - y||_n = j} by enumeration and by q^{2d} sum_m conj(E-hat) F-hat S_j-hat.
inline PairCountResult pair_count(const PointSet& e, const PointSet& f, std::uint64_t n, FieldElement j,
                                  double envelope = kDefaultEnvelope) {
  const PairCounter counter(e, f, n, envelope);
  return counter.count(e.field().checked(j).value());
}

/// max_ratio is the tightest brute / bound_rhs over the audited radii.
struct IncidenceAudit {
  std::vector<PairCountResult> rows;
  double max_ratio = 0.0;
  bool all_within_bound = true;
  bool spectral_agrees = true;  // round(spectral) == brute on every row
  bool hypothesis_ok = true;
};

/// Incidence hypotheses: any q for n = 2 or d = 2; q = 1 mod 3 for n = 3, d >= 3.
constexpr bool incidence_hypothesis_holds(Residue q, unsigned d, std::uint64_t n) {
  return decay_hypothesis_holds(q, d, n);
}

inline IncidenceAudit incidence_audit(const PairCounter& counter, const PointSet& e, std::uint64_t n,
                                      std::span<const Residue> radii) {
  IncidenceAudit audit;
  audit.hypothesis_ok = incidence_hypothesis_holds(e.field().modulus(), e.dimension(), n);
  for (Residue j : radii) {
    if (j == 0) fail(ErrorKind::kZeroRadius, "incidence bound applies to j != 0");
    auto row = counter.count(j);
    audit.max_ratio = std::max(audit.max_ratio, row.bound_ratio());
    audit.all_within_bound = audit.all_within_bound && row.within_bound();
    audit.spectral_agrees = audit.spectral_agrees && std::llround(row.spectral) == static_cast<long long>(row.brute);
    audit.rows.push_back(row);
  }
  return audit;
}

/// brute <= bound_rhs and round(spectral) = brute for every radius in the grid.
inline IncidenceAudit incidence_audit(const PointSet& e, const PointSet& f, std::uint64_t n,
                                      std::span<const Residue> radii, double envelope = kDefaultEnvelope) {
  return incidence_audit(PairCounter(e, f, n, envelope), e, n, radii);
}

inline IncidenceAudit incidence_audit(const PointSet& e, const PointSet& f,
                                      const std::shared_ptr<const SphereSpectra>& spheres,
                                      std::span<const Residue> radii, double envelope = kDefaultEnvelope) {
  return incidence_audit(PairCounter(e, f, spheres, envelope), e, spheres->exponent(), radii);
}

/// All j != 0 in F_q.
inline std::vector<Residue> nonzero_radii(Residue q) {
  std::vector<Residue> out;
  for (Residue j = 1; j < q; ++j) out.push_back(j);
  return out;
}

struct CoverageResult {
  std::size_t size_e = 0;
  std::size_t size_f = 0;
  double multiplier = 0.0;  // C with #E = C q^{(d+1)/2}, or #E #F = C q^{d+1} for two sets
  ResidueSet covered{1};

  ResidueSet missing() const { return covered.complement(); }
  bool full_coverage() const { return covered.size() == covered.modulus(); }
  bool full_coverage_star() const {
    for (Residue j = 1; j < covered.modulus(); ++j) {
      if (!covered.contains(j)) return false;
    }
    return true;
  }
};

/// #Delta * #E^{-2/(d+1)}: the empirical ratio behind the (#E)^{2/(d+1)} distance-count scaling.
inline double distance_score_ratio(const CoverageResult& result, unsigned d) {
  return static_cast<double>(result.covered.size()) * std::pow(static_cast<double>(result.size_e), -2.0 / (d + 1));
}

struct CoverageExperiment {
  Residue q = 0;
  unsigned d = 0;
  std::uint64_t n = 0;
  double multiplier = 0.0;
  std::size_t set_size = 0;
  std::vector<CoverageResult> trials;
  double full_coverage_fraction = 0.0;       // fraction covering all of F_q (single set) or F_q^* (two sets)
  std::size_t min_coverage = 0;              // smallest #Delta over trials
  bool hypothesis_ok = true;
  bool attainable = true;                    // every target radius has a nonempty sphere in F_q^d
};

/// Radii j with S_j nonempty, i.e. the image of ||.||_n on F_q^d.
inline ResidueSet attainable_radii(Residue q, unsigned d, std::uint64_t n) {
  ResidueSet out(q);
  for (Residue j : norm_table(GridShape(q, d), n)) out.insert(j);
  return out;
}

/// ceil(C q^{(d+1)/2}); throws SizeTooLarge beyond q^d.
inline std::size_t coverage_set_size(Residue q, unsigned d, double multiplier) {
  const GridShape shape(q, d);
  const double wanted = std::ceil(multiplier * std::pow(static_cast<double>(q), (d + 1) / 2.0) - 1e-9);
  if (wanted > static_cast<double>(shape.size())) {
    fail(ErrorKind::kSizeTooLarge, "C q^{(d+1)/2} = " + std::to_string(wanted) + " exceeds q^d = " +
                                       std::to_string(shape.size()));
  }
  return static_cast<std::size_t>(std::max(wanted, 0.0));
}

/// Per-set size ceil(sqrt(C q^{d+1})) so that #E #F >= C q^{d+1}; throws SizeTooLarge beyond q^d.
inline std::size_t two_set_size(Residue q, unsigned d, double multiplier) {
  const GridShape shape(q, d);
  const double wanted = std::ceil(std::sqrt(multiplier * std::pow(static_cast<double>(q), d + 1)) - 1e-9);
  if (wanted > static_cast<double>(shape.size())) {
    fail(ErrorKind::kSizeTooLarge, "sqrt(C q^{d+1}) = " + std::to_string(wanted) + " exceeds q^d = " +
                                       std::to_string(shape.size()));
  }
  return static_cast<std::size_t>(std::max(wanted, 0.0));
}

/// Delta_n(E, F) with the zero-distance caveat exposed through full_coverage_star().
inline CoverageResult two_set_coverage(const PointSet& e, const PointSet& f, std::uint64_t n) {
  CoverageResult result;
  result.size_e = e.size();
  result.size_f = f.size();
  result.multiplier = static_cast<double>(e.size()) * static_cast<double>(f.size()) /
                      std::pow(static_cast<double>(e.field().modulus()), e.dimension() + 1);
  result.covered = distance_set(e, f, n);
  return result;
}

/// Random E of size ceil(C q^{(d+1)/2}) per trial; trial i draws from stream (seed, "coverage", i).
inline CoverageExperiment coverage_experiment(std::uint64_t q, unsigned d, std::uint64_t n, double multiplier,
                                              std::size_t trials, std::uint64_t seed, unsigned jobs = 1) {
  const PrimeField field = make_field(q);
  CoverageExperiment out;
  out.q = field.modulus();
  out.d = d;
  out.n = n;
  out.multiplier = multiplier;
  out.set_size = coverage_set_size(field.modulus(), d, multiplier);
  out.hypothesis_ok = incidence_hypothesis_holds(field.modulus(), d, n);
  out.attainable = attainable_radii(field.modulus(), d, n).size() == field.modulus();
  out.trials.resize(trials);
  parallel_for(trials, jobs, [&](std::size_t i) {
    Rng rng(seed, "coverage", i);
    const PointSet e = sample_point_set(field, d, out.set_size, rng);
    CoverageResult result;
    result.size_e = result.size_f = e.size();
    result.multiplier = multiplier;
    result.covered = e.empty() ? ResidueSet(field.modulus()) : distance_set(e, n);
    out.trials[i] = std::move(result);
  });
  std::size_t full = 0;
  out.min_coverage = trials ? field.modulus() : 0;
  for (const auto& t : out.trials) {
    full += t.full_coverage();
    out.min_coverage = std::min(out.min_coverage, t.covered.size());
  }
  out.full_coverage_fraction = trials ? static_cast<double>(full) / static_cast<double>(trials) : 0.0;
  return out;
}

/// Independent random E, F with #E #F >= C q^{d+1}; full_coverage_fraction counts trials covering F_q^*.
inline CoverageExperiment two_set_experiment(std::uint64_t q, unsigned d, std::uint64_t n, double multiplier,
                                             std::size_t trials, std::uint64_t seed, unsigned jobs = 1) {
  const PrimeField field = make_field(q);
  CoverageExperiment out;
  out.q = field.modulus();
  out.d = d;
  out.n = n;
  out.multiplier = multiplier;
  out.set_size = two_set_size(field.modulus(), d, multiplier);
  out.hypothesis_ok = incidence_hypothesis_holds(field.modulus(), d, n);
  out.attainable = attainable_radii(field.modulus(), d, n).size() + 1 >= field.modulus();
  out.trials.resize(trials);
  parallel_for(trials, jobs, [&](std::size_t i) {
    Rng rng(seed, "two-set-coverage", i);
    const PointSet e = sample_point_set(field, d, out.set_size, rng);
    const PointSet f = sample_point_set(field, d, out.set_size, rng);
    out.trials[i] = e.empty() ? CoverageResult{0, 0, multiplier, ResidueSet(field.modulus())} : two_set_coverage(e, f, n);
  });
  std::size_t full = 0;
  out.min_coverage = trials ? field.modulus() : 0;
  for (const auto& t : out.trials) {
    full += t.full_coverage_star();
    out.min_coverage = std::min(out.min_coverage, t.covered.size());
  }
  out.full_coverage_fraction = trials ? static_cast<double>(full) / static_cast<double>(trials) : 0.0;
  return out;
}

}  // namespace ffdist
