#pragma once

// Suite orchestration and report emission.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ffdist/distance.hpp"
#include "ffdist/error.hpp"
#include "ffdist/field.hpp"
#include "ffdist/identities.hpp"
#include "ffdist/parallel.hpp"
#include "ffdist/rng.hpp"
#include "ffdist/spheres.hpp"
#include "ffdist/vectorspace.hpp"

namespace ffdist {

enum class Suite { kIdentities, kSphereDecay, kIncidence, kCoverage, kAll };

constexpr std::string_view to_string(Suite suite) {
  switch (suite) {
    case Suite::kIdentities: return "identities";
    case Suite::kSphereDecay: return "sphere-decay";
    case Suite::kIncidence: return "incidence";
    case Suite::kCoverage: return "coverage";
    case Suite::kAll: return "all";
  }
  return "unknown";
}

inline std::optional<Suite> parse_suite(std::string_view name) {
  for (auto suite : {Suite::kIdentities, Suite::kSphereDecay, Suite::kIncidence, Suite::kCoverage, Suite::kAll}) {
    if (to_string(suite) == name) return suite;
  }
  return std::nullopt;
}

/// Minimum full-coverage fraction a coverage cell must reach when its hypotheses hold.
inline constexpr double kCoverageFraction = 0.95;

struct OutputFormats {
  bool jsonl = true;
  bool csv = true;
  bool summary = true;
};

struct SuiteConfig {
  Suite suite = Suite::kAll;
  std::vector<std::uint64_t> q_list{7, 13, 19, 31};
  std::vector<unsigned> d_list{2, 3};
  std::vector<std::uint64_t> n_list{2, 3};
  double C = 3.0;
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  double envelope = kDefaultEnvelope;
  std::string output_dir;  // empty: nothing is written
  OutputFormats formats;
  unsigned jobs = 1;
  std::string points_file;  // optional point set in the "q=<q> d=<d>" file format
};

/// Throws InvalidConfig naming the offending field.
inline void validate_config(const SuiteConfig& config) {
  auto bad = [](const std::string& field, const std::string& message) {
    fail(ErrorKind::kInvalidConfig, field + ": " + message);
  };
  if (config.q_list.empty()) bad("q_list", "must not be empty");
  for (auto q : config.q_list) {
    if (q > (std::uint64_t{1} << 31U)) bad("q_list", std::to_string(q) + " exceeds 2^31");
    if (!is_prime(q)) bad("q_list", std::to_string(q) + " is not prime");
  }
  if (config.d_list.empty()) bad("d_list", "must not be empty");
  for (auto d : config.d_list) {
    if (d < 2) bad("d_list", "d must be >= 2 (got " + std::to_string(d) + ")");
    if (d > kMaxDimension) bad("d_list", "d must be <= " + std::to_string(kMaxDimension) + " (got " + std::to_string(d) + ")");
  }
  if (config.n_list.empty()) bad("n_list", "must not be empty");
  for (auto n : config.n_list) {
    if (n < 2) bad("n_list", "n must be >= 2 (got " + std::to_string(n) + ")");
  }
  if (!(config.C > 0.0) || !std::isfinite(config.C)) bad("C", "must be a positive number");
  if (!(config.envelope > 0.0) || !std::isfinite(config.envelope)) bad("envelope", "C_env must be positive");
  if (config.jobs == 0) bad("jobs", "must be >= 1");
}

// ---------------------------------------------------------------------------------------------
// Identity grids

inline std::vector<IdentityCheck> duke_iwaniec_sweep(const PrimeField& field) {
  std::vector<IdentityCheck> out;
  for (const auto& psi : characters_of_order(field, 3)) {
    for (Residue a = 1; a < field.modulus(); ++a) out.push_back(check_duke_iwaniec(field, field.element(a), psi));
  }
  return out;
}

/// All t != 0, b in {0, 1}, n in {2, ..., n_max}.
inline std::vector<IdentityCheck> gauss_expansion_sweep(const PrimeField& field, std::uint64_t n_max = 6) {
  std::vector<IdentityCheck> out;
  for (std::uint64_t n = 2; n <= n_max; ++n) {
    for (Residue b = 0; b <= 1; ++b) {
      for (Residue t = 1; t < field.modulus(); ++t) {
        out.push_back(check_gauss_expansion(field, field.element(t), field.element(b), n));
      }
    }
  }
  return out;
}

/// All t != 0, l in {1, ..., l_max}, both order-3 characters.
inline std::vector<IdentityCheck> cubic_power_sweep(const PrimeField& field, unsigned l_max = 3) {
  std::vector<IdentityCheck> out;
  for (const auto& psi : characters_of_order(field, 3)) {
    for (unsigned l = 1; l <= l_max; ++l) {
      for (Residue t = 1; t < field.modulus(); ++t) out.push_back(check_cubic_power_expansion(field, field.element(t), l, psi));
    }
  }
  return out;
}

/// `per_cell` random nonzero m-vectors for every (t, l), both order-3 characters.
inline std::vector<IdentityCheck> kloosterman_sweep(const PrimeField& field, unsigned l_max, std::size_t per_cell,
                                                    std::uint64_t seed) {
  std::vector<IdentityCheck> out;
  Rng rng(seed, "kloosterman", field.modulus());
  const auto characters = characters_of_order(field, 3);
  std::vector<FieldElement> m;
  for (unsigned l = 1; l <= l_max; ++l) {
    for (Residue t = 1; t < field.modulus(); ++t) {
      for (std::size_t i = 0; i < per_cell; ++i) {
        m.clear();
        for (unsigned k = 0; k < l; ++k) m.push_back(field.element(1 + rng.below(field.group_order())));
        for (const auto& psi : characters) {
          out.push_back(check_completed_kloosterman_form(field, field.element(t), m, psi));
        }
      }
    }
  }
  return out;
}

/// Every (l, d, r) with 1 <= l <= d <= 3 and 0 <= r <= d - l; `per_cell` random (j, m) draws each.
inline std::vector<BoundCheck> a_r_sweep(const PrimeField& field, std::size_t per_cell, std::uint64_t seed) {
  std::vector<BoundCheck> out;
  Rng rng(seed, "a_r", field.modulus());
  const auto characters = characters_of_order(field, 3);
  std::vector<FieldElement> m;
  for (unsigned l = 1; l <= kMaxFoldDimension; ++l) {
    for (unsigned d = std::max(l, 2U); d <= 3; ++d) {
      for (unsigned r = 0; r + l <= d; ++r) {
        for (std::size_t i = 0; i < per_cell; ++i) {
          const FieldElement j = field.element(1 + rng.below(field.group_order()));
          m.clear();
          for (unsigned k = 0; k < l; ++k) m.push_back(field.element(1 + rng.below(field.group_order())));
          for (const auto& psi : characters) out.push_back(compute_A_r(field, j, l, d, r, m, psi));
        }
      }
    }
  }
  return out;
}

/// Every m in F_q^2 \ {0} and j != 0 for each n; R_k sums ride along when m1 m2 = 0.
inline std::vector<BoundCheck> cohomology_sweep(const PrimeField& field, std::span<const std::uint64_t> n_values) {
  std::vector<BoundCheck> out;
  const Residue q = field.modulus();
  for (auto n : n_values) {
    for (Residue m1 = 0; m1 < q; ++m1) {
      for (Residue m2 = 0; m2 < q; ++m2) {
        if (m1 == 0 && m2 == 0) continue;
        for (Residue j = 1; j < q; ++j) {
          auto check = check_cohomology_bound(field, n, field.element(m1), field.element(m2), field.element(j));
          out.push_back(std::move(check.full_sum));
          for (auto& r : check.r_sums) out.push_back(std::move(r));
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Report

struct IncidenceRow {
  std::string source;  // "random" or "points"
  Residue q = 0;
  unsigned d = 0;
  std::uint64_t n = 0;
  std::size_t pair = 0;
  std::size_t size_e = 0;
  std::size_t size_f = 0;
  bool hypothesis_ok = false;
  PairCountResult result;
};

struct CoverageRow {
  std::string kind;  // "single" or "two-set"
  CoverageExperiment experiment;
};

struct PointsAnalysis {
  std::uint64_t n = 0;
  CoverageResult coverage;
  double score_ratio = 0.0;
};

struct Timing {
  std::string stage;
  double seconds = 0.0;
};

struct ExperimentReport {
  SuiteConfig config;
  std::string rng_algorithm{Rng::kAlgorithm};
  std::string trivial_term_convention;
  std::vector<IdentityCheck> identities;
  std::vector<BoundCheck> bounds;
  std::vector<DecayReport> decay;
  std::vector<IncidenceRow> incidence;
  std::vector<CoverageRow> coverage;
  std::vector<PointsAnalysis> points;
  std::map<std::string, double> maxima;
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  std::vector<Timing> timings;
  bool pass = true;
};

namespace detail {

inline std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.15g", value);
  return buffer;
}

inline std::string format_parameters(const ParameterList& parameters) {
  std::string out;
  for (const auto& [key, value] : parameters) {
    if (!out.empty()) out += ';';
    out += key + '=' + std::to_string(value);
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values, char separator = ',') {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += separator;
    out += std::to_string(v);
  }
  return out;
}

template <typename Fn>
auto with_context(const std::string& context, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), context + ": " + e.message());
  }
}

inline void note_max(ExperimentReport& report, const std::string& key, double value) {
  auto [it, inserted] = report.maxima.emplace(key, value);
  if (!inserted) it->second = std::max(it->second, value);
}

template <typename Fn>
void timed(ExperimentReport& report, const std::string& stage, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  report.timings.push_back({stage, elapsed.count()});
}

inline std::string cell_name(Residue q, unsigned d, std::uint64_t n) {
  return "q=" + std::to_string(q) + " d=" + std::to_string(d) + " n=" + std::to_string(n);
}

inline std::vector<PrimeField> make_fields(const SuiteConfig& config) {
  std::vector<PrimeField> fields;
  for (auto q : config.q_list) fields.push_back(make_field(q));
  return fields;
}

// Sweeps with up to `per_cell` random draws use this many per cell.
inline constexpr std::size_t kKloostermanVectorsPerCell = 20;
inline constexpr std::size_t kArDrawsPerCell = 4;
inline constexpr std::uint64_t kIdentityMaxExponent = 6;

inline void run_identities(const SuiteConfig& config, ExperimentReport& report) {
  const auto fields = make_fields(config);
  struct Slot {
    std::vector<IdentityCheck> identities;
    std::vector<BoundCheck> bounds;
    std::string note;
  };
  std::vector<Slot> slots(fields.size());
  std::vector<std::uint64_t> exponents;
  for (std::uint64_t n = 2; n <= kIdentityMaxExponent; ++n) exponents.push_back(n);

  parallel_for(fields.size(), config.jobs, [&](std::size_t i) {
    const PrimeField& field = fields[i];
    Slot& slot = slots[i];
    with_context("identities q=" + std::to_string(field.modulus()), [&] {
      auto append = [](auto& into, auto&& from) { into.insert(into.end(), from.begin(), from.end()); };
      if (field.modulus() % 3 == 1) {
        append(slot.identities, duke_iwaniec_sweep(field));
        append(slot.identities, cubic_power_sweep(field, kMaxFoldDimension));
        append(slot.identities, kloosterman_sweep(field, 2, kKloostermanVectorsPerCell, config.seed));
        append(slot.bounds, a_r_sweep(field, kArDrawsPerCell, config.seed));
      } else {
        slot.note = "q=" + std::to_string(field.modulus()) +
                    ": order-3 identities and A_r skipped (they need q = 1 mod 3)";
      }
      append(slot.identities, gauss_expansion_sweep(field, kIdentityMaxExponent));
      append(slot.bounds, cohomology_sweep(field, exponents));
      return 0;
    });
  });

  for (auto& slot : slots) {
    report.identities.insert(report.identities.end(), slot.identities.begin(), slot.identities.end());
    report.bounds.insert(report.bounds.end(), slot.bounds.begin(), slot.bounds.end());
    if (!slot.note.empty()) report.notes.push_back(slot.note);
  }
  report.trivial_term_convention =
      kGaussExpansionConvention == TrivialTermConvention::kOmit ? "omit k=0 term" : "include k=0 term";
}

inline void run_sphere_decay(const SuiteConfig& config, ExperimentReport& report) {
  for (auto n : config.n_list) {
    for (auto d : config.d_list) {
      auto rows = with_context("sphere-decay d=" + std::to_string(d) + " n=" + std::to_string(n), [&] {
        return constant_sweep(n, d, RadiusPolicy::all_nonzero(), config.q_list, config.jobs);
      });
      report.decay.insert(report.decay.end(), rows.begin(), rows.end());
    }
  }
}

inline void run_incidence(const SuiteConfig& config, ExperimentReport& report) {
  for (const auto& field : make_fields(config)) {
    const Residue q = field.modulus();
    const auto radii = nonzero_radii(q);
    for (auto d : config.d_list) {
      for (auto n : config.n_list) {
        const std::string cell = cell_name(q, d, n);
        with_context("incidence " + cell, [&] {
          const auto spheres = std::make_shared<const SphereSpectra>(field, d, n, config.jobs);
          const GridShape shape(q, d);
          const auto balanced = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(q), (d + 1) / 2.0)));
          const std::size_t max_size = std::min<std::size_t>(shape.size(), 2 * balanced);
          std::vector<std::vector<IncidenceRow>> per_pair(config.trials);
          parallel_for(config.trials, config.jobs, [&](std::size_t pair) {
            Rng rng(config.seed, "incidence/" + cell, pair);
            const std::size_t size_e = 1 + rng.below(max_size);
            const std::size_t size_f = 1 + rng.below(max_size);
            const PointSet e = sample_point_set(field, d, size_e, rng);
            const PointSet f = sample_point_set(field, d, size_f, rng);
            const auto audit = incidence_audit(e, f, spheres, radii, config.envelope);
            for (const auto& row : audit.rows) {
              per_pair[pair].push_back({"random", q, d, n, pair, size_e, size_f, audit.hypothesis_ok, row});
            }
          });
          for (auto& rows : per_pair) report.incidence.insert(report.incidence.end(), rows.begin(), rows.end());
          return 0;
        });
      }
    }
  }
}

inline void run_coverage(const SuiteConfig& config, ExperimentReport& report) {
  for (const auto& field : make_fields(config)) {
    const Residue q = field.modulus();
    for (auto d : config.d_list) {
      for (auto n : config.n_list) {
        const std::string cell = cell_name(q, d, n);
        auto attempt = [&](const std::string& kind, auto&& run) {
          try {
            report.coverage.push_back({kind, with_context("coverage " + cell, run)});
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::kSizeTooLarge) throw;
            report.notes.push_back(kind + " coverage " + cell + " skipped: " + e.message());
          }
        };
        attempt("single", [&] { return coverage_experiment(q, d, n, config.C, config.trials, config.seed, config.jobs); });
        attempt("two-set", [&] { return two_set_experiment(q, d, n, config.C, config.trials, config.seed, config.jobs); });
      }
    }
  }
}

inline void run_points(const SuiteConfig& config, ExperimentReport& report) {
  const PointSet e = with_context("points " + config.points_file, [&] { return load_point_set(config.points_file); });
  if (e.empty()) fail(ErrorKind::kEmptySet, "points " + config.points_file + ": file lists no points");
  const Residue q = e.field().modulus();
  const auto radii = nonzero_radii(q);
  for (auto n : config.n_list) {
    with_context("points " + cell_name(q, e.dimension(), n), [&] {
      const auto audit = incidence_audit(e, e, n, radii, config.envelope);
      for (const auto& row : audit.rows) {
        report.incidence.push_back({"points", q, e.dimension(), n, 0, e.size(), e.size(), audit.hypothesis_ok, row});
      }
      CoverageResult coverage;
      coverage.size_e = coverage.size_f = e.size();
      coverage.multiplier = static_cast<double>(e.size()) / std::pow(static_cast<double>(q), (e.dimension() + 1) / 2.0);
      coverage.covered = distance_set(e, n);
      report.points.push_back({n, coverage, distance_score_ratio(coverage, e.dimension())});
      return 0;
    });
  }
}

inline void finalize(ExperimentReport& report) {
  const double envelope = report.config.envelope;
  auto failure = [&](std::string message) { report.failures.push_back(std::move(message)); };

  for (const auto& check : report.identities) {
    note_max(report, "identity_residual", check.residual);
    if (!check.pass) {
      failure("identity " + check.name + " [" + format_parameters(check.parameters) + "] residual " +
              format_double(check.residual));
    }
  }
  for (const auto& check : report.bounds) {
    note_max(report, check.name + "_ratio", check.ratio);
    if (!check.within(envelope)) {
      failure("bound " + check.name + " [" + format_parameters(check.parameters) + "] ratio " +
              format_double(check.ratio));
    }
  }
  for (const auto& row : report.decay) {
    const std::string family = row.hypothesis_ok ? "" : "exploratory_";
    note_max(report, family + "decay_constant", row.decay_constant);
    note_max(report, family + "zero_mode_deviation", row.zero_mode_deviation);
    if (row.hypothesis_ok && (row.decay_constant > envelope || row.zero_mode_deviation > envelope)) {
      failure("sphere-decay " + cell_name(row.q, row.d, row.n) + " j=" + std::to_string(row.j) + " decay_constant " +
              format_double(row.decay_constant) + " zero_mode_deviation " + format_double(row.zero_mode_deviation));
    }
  }
  for (const auto& row : report.incidence) {
    const auto& r = row.result;
    if (std::llround(r.spectral) != static_cast<long long>(r.brute)) {
      failure("pair count " + cell_name(row.q, row.d, row.n) + " pair=" + std::to_string(row.pair) +
              " j=" + std::to_string(r.j) + " brute " + std::to_string(r.brute) + " spectral " +
              format_double(r.spectral));
    }
    if (row.hypothesis_ok) {
      note_max(report, "incidence_ratio", r.bound_ratio());
      if (!r.within_bound()) {
        failure("incidence " + cell_name(row.q, row.d, row.n) + " pair=" + std::to_string(row.pair) +
                " j=" + std::to_string(r.j) + " ratio " + format_double(r.bound_ratio()));
      }
    } else {
      note_max(report, "exploratory_incidence_ratio", r.bound_ratio());
    }
  }
  for (const auto& row : report.coverage) {
    const auto& exp = row.experiment;
    if (exp.trials.empty()) continue;
    if (!exp.attainable) {
      report.notes.push_back(row.kind + " coverage " + cell_name(exp.q, exp.d, exp.n) +
                             " not asserted: some target radius has an empty sphere in F_q^d");
      continue;
    }
    if (exp.hypothesis_ok && exp.full_coverage_fraction < kCoverageFraction) {
      failure(row.kind + " coverage " + cell_name(exp.q, exp.d, exp.n) + " full-coverage fraction " +
              format_double(exp.full_coverage_fraction));
    }
  }
  report.pass = report.failures.empty();
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const SuiteConfig& config) {
  return {{"suite", to_string(config.suite)},
          {"q_list", config.q_list},
          {"d_list", config.d_list},
          {"n_list", config.n_list},
          {"C", config.C},
          {"trials", config.trials},
          {"seed", config.seed},
          {"envelope", config.envelope},
          {"jobs", config.jobs},
          {"output_dir", config.output_dir},
          {"points_file", config.points_file}};
}

namespace detail {

inline nlohmann::json complex_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline nlohmann::json parameters_json(const ParameterList& parameters) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [key, value] : parameters) out[key] = value;
  return out;
}

}  // namespace detail

inline void write_jsonl(std::ostream& out, const ExperimentReport& report) {
  auto line = [&](const nlohmann::json& j) { out << j.dump() << '\n'; };
  line({{"type", "config"}, {"config", to_json(report.config)}, {"rng", report.rng_algorithm}});
  for (const auto& c : report.identities) {
    line({{"type", "identity"}, {"name", c.name}, {"parameters", detail::parameters_json(c.parameters)},
          {"note", c.note}, {"lhs", detail::complex_json(c.lhs)}, {"rhs", detail::complex_json(c.rhs)},
          {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  }
  for (const auto& b : report.bounds) {
    line({{"type", "bound"}, {"name", b.name}, {"parameters", detail::parameters_json(b.parameters)},
          {"magnitude", b.magnitude}, {"envelope", b.envelope}, {"ratio", b.ratio},
          {"within", b.within(report.config.envelope)}});
  }
  for (const auto& r : report.decay) {
    line({{"type", "decay"}, {"q", r.q}, {"d", r.d}, {"n", r.n}, {"j", r.j}, {"sphere_size", r.sphere_size},
          {"zero_mode", detail::complex_json(r.zero_mode)}, {"zero_mode_deviation", r.zero_mode_deviation},
          {"max_nonzero_mode", r.max_nonzero_mode}, {"argmax_mode", r.argmax_mode},
          {"decay_constant", r.decay_constant}, {"hypothesis_ok", r.hypothesis_ok}, {"regime", to_string(r.regime)}});
  }
  for (const auto& row : report.incidence) {
    const auto& r = row.result;
    line({{"type", "pair_count"}, {"source", row.source}, {"q", row.q}, {"d", row.d}, {"n", row.n},
          {"pair", row.pair}, {"size_e", row.size_e}, {"size_f", row.size_f}, {"j", r.j}, {"brute", r.brute},
          {"spectral", r.spectral}, {"i_term", r.i_term}, {"ii_term", r.ii_term}, {"bound_rhs", r.bound_rhs},
          {"hypothesis_ok", row.hypothesis_ok}});
  }
  for (const auto& row : report.coverage) {
    const auto& e = row.experiment;
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : e.trials) {
      trials.push_back({{"covered", t.covered.size()}, {"missing", t.missing().values()},
                        {"full_coverage", t.full_coverage()}, {"full_coverage_star", t.full_coverage_star()}});
    }
    line({{"type", "coverage"}, {"kind", row.kind}, {"q", e.q}, {"d", e.d}, {"n", e.n}, {"C", e.multiplier},
          {"size", e.set_size}, {"trials", trials}, {"full_coverage_fraction", e.full_coverage_fraction},
          {"min_coverage", e.min_coverage}, {"hypothesis_ok", e.hypothesis_ok}, {"attainable", e.attainable}});
  }
  for (const auto& p : report.points) {
    line({{"type", "points"}, {"n", p.n}, {"size", p.coverage.size_e}, {"covered", p.coverage.covered.size()},
          {"missing", p.coverage.missing().values()}, {"full_coverage", p.coverage.full_coverage()},
          {"score_ratio", p.score_ratio}});
  }
  nlohmann::json timings = nlohmann::json::object();
  for (const auto& t : report.timings) timings[t.stage] = t.seconds;
  line({{"type", "summary"}, {"pass", report.pass}, {"failures", report.failures}, {"maxima", report.maxima},
        {"notes", report.notes}, {"trivial_term_convention", report.trivial_term_convention}, {"timings", timings}});
}

inline void write_identities_csv(std::ostream& out, const ExperimentReport& report) {
  using detail::format_double;
  out << "name,parameters,lhs_re,lhs_im,rhs_re,rhs_im,residual,tolerance,pass\n";
  for (const auto& c : report.identities) {
    out << c.name << ',' << detail::format_parameters(c.parameters) << ',' << format_double(c.lhs.real()) << ','
        << format_double(c.lhs.imag()) << ',' << format_double(c.rhs.real()) << ',' << format_double(c.rhs.imag())
        << ',' << format_double(c.residual) << ',' << format_double(c.tolerance) << ',' << (c.pass ? 1 : 0) << '\n';
  }
}

inline void write_bounds_csv(std::ostream& out, const ExperimentReport& report) {
  using detail::format_double;
  out << "name,parameters,magnitude,envelope,ratio,within\n";
  for (const auto& b : report.bounds) {
    out << b.name << ',' << detail::format_parameters(b.parameters) << ',' << format_double(b.magnitude) << ','
        << format_double(b.envelope) << ',' << format_double(b.ratio) << ',' << (b.within(report.config.envelope) ? 1 : 0)
        << '\n';
  }
}

inline void write_decay_csv(std::ostream& out, const ExperimentReport& report) {
  using detail::format_double;
  out << "q,d,n,j,sphere_size,zero_mode_re,zero_mode_dev,max_nonzero_mode,decay_constant,hypothesis_ok\n";
  for (const auto& r : report.decay) {
    out << r.q << ',' << r.d << ',' << r.n << ',' << r.j << ',' << r.sphere_size << ','
        << format_double(r.zero_mode.real()) << ',' << format_double(r.zero_mode_deviation) << ','
        << format_double(r.max_nonzero_mode) << ',' << format_double(r.decay_constant) << ','
        << (r.hypothesis_ok ? 1 : 0) << '\n';
  }
}

inline void write_incidence_csv(std::ostream& out, const ExperimentReport& report) {
  using detail::format_double;
  out << "source,q,d,n,pair,size_e,size_f,j,brute,spectral,i_term,ii_term,bound_rhs,ratio,hypothesis_ok\n";
  for (const auto& row : report.incidence) {
    const auto& r = row.result;
    out << row.source << ',' << row.q << ',' << row.d << ',' << row.n << ',' << row.pair << ',' << row.size_e << ','
        << row.size_f << ',' << r.j << ',' << r.brute << ',' << format_double(r.spectral) << ','
        << format_double(r.i_term) << ',' << format_double(r.ii_term) << ',' << format_double(r.bound_rhs) << ','
        << format_double(r.bound_ratio()) << ',' << (row.hypothesis_ok ? 1 : 0) << '\n';
  }
}

inline void write_coverage_csv(std::ostream& out, const ExperimentReport& report) {
  using detail::format_double;
  out << "kind,q,d,n,C,size,trials,full_coverage_fraction,min_coverage,hypothesis_ok,attainable\n";
  for (const auto& row : report.coverage) {
    const auto& e = row.experiment;
    out << row.kind << ',' << e.q << ',' << e.d << ',' << e.n << ',' << format_double(e.multiplier) << ','
        << e.set_size << ',' << e.trials.size() << ',' << format_double(e.full_coverage_fraction) << ','
        << e.min_coverage << ',' << (e.hypothesis_ok ? 1 : 0) << ',' << (e.attainable ? 1 : 0) << '\n';
  }
}

inline void write_summary(std::ostream& out, const ExperimentReport& report) {
  using detail::format_double;
  const auto& c = report.config;
  out << "suite: " << to_string(c.suite) << '\n'
      << "q_list: " << detail::join(c.q_list) << "  d_list: " << detail::join(c.d_list)
      << "  n_list: " << detail::join(c.n_list) << '\n'
      << "C: " << format_double(c.C) << "  trials: " << c.trials << "  seed: " << c.seed
      << "  envelope: " << format_double(c.envelope) << "  jobs: " << c.jobs << '\n'
      << "rng: " << report.rng_algorithm << '\n';
  if (!c.points_file.empty()) out << "points: " << c.points_file << '\n';
  if (!report.trivial_term_convention.empty()) out << "gauss expansion: " << report.trivial_term_convention << '\n';
  out << '\n'
      << "identity checks: " << report.identities.size() << '\n'
      << "bound checks: " << report.bounds.size() << '\n'
      << "sphere reports: " << report.decay.size() << '\n'
      << "pair counts: " << report.incidence.size() << '\n'
      << "coverage cells: " << report.coverage.size() << '\n';
  if (!report.maxima.empty()) {
    out << "\nmaxima:\n";
    for (const auto& [key, value] : report.maxima) out << "  " << key << " = " << format_double(value) << '\n';
  }
  for (const auto& row : report.coverage) {
    const auto& e = row.experiment;
    out << "  " << row.kind << " coverage " << detail::cell_name(e.q, e.d, e.n) << " size=" << e.set_size
        << " fraction=" << format_double(e.full_coverage_fraction) << " min=" << e.min_coverage
        << (e.hypothesis_ok ? "" : " (exploratory)") << (e.attainable ? "" : " (unattainable)") << '\n';
  }
  for (const auto& p : report.points) {
    out << "  points n=" << p.n << " size=" << p.coverage.size_e << " distances=" << p.coverage.covered.size()
        << " score_ratio=" << format_double(p.score_ratio) << '\n';
  }
  if (!report.notes.empty()) {
    out << "\nnotes:\n";
    for (const auto& n : report.notes) out << "  " << n << '\n';
  }
  if (!report.failures.empty()) {
    out << "\nfailures (" << report.failures.size() << "):\n";
    for (const auto& f : report.failures) out << "  " << f << '\n';
  }
  out << "\ntimings:\n";
  for (const auto& t : report.timings) out << "  " << t.stage << ": " << format_double(t.seconds) << " s\n";
  out << "\nverdict: " << (report.pass ? "PASS" : "FAIL") << '\n';
}

/// Writes report.jsonl, one CSV per populated table, and summary.txt into `directory`.
inline void write_reports(const ExperimentReport& report, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  auto open = [&](const char* name) {
    std::ofstream out(directory / name, std::ios::binary);
    if (!out) fail(ErrorKind::kInvalidConfig, "output_dir: cannot write " + (directory / name).string());
    return out;
  };
  const auto& formats = report.config.formats;
  if (formats.jsonl) {
    auto out = open("report.jsonl");
    write_jsonl(out, report);
  }
  if (formats.csv) {
    if (!report.identities.empty()) {
      auto out = open("identities.csv");
      write_identities_csv(out, report);
    }
    if (!report.bounds.empty()) {
      auto out = open("bounds.csv");
      write_bounds_csv(out, report);
    }
    if (!report.decay.empty()) {
      auto out = open("sphere_decay.csv");
      write_decay_csv(out, report);
    }
    if (!report.incidence.empty()) {
      auto out = open("incidence.csv");
      write_incidence_csv(out, report);
    }
    if (!report.coverage.empty()) {
      auto out = open("coverage.csv");
      write_coverage_csv(out, report);
    }
  }
  if (formats.summary) {
    auto out = open("summary.txt");
    write_summary(out, report);
  }
}

/// Runs the configured suite(s); report.pass is true iff every constituent check passed.
inline ExperimentReport run_suite(const SuiteConfig& config) {
  validate_config(config);
  ExperimentReport report;
  report.config = config;
  auto wanted = [&](Suite suite) { return config.suite == Suite::kAll || config.suite == suite; };

  if (wanted(Suite::kIdentities)) detail::timed(report, "identities", [&] { detail::run_identities(config, report); });
  if (wanted(Suite::kSphereDecay)) detail::timed(report, "sphere-decay", [&] { detail::run_sphere_decay(config, report); });
  if (wanted(Suite::kIncidence)) detail::timed(report, "incidence", [&] { detail::run_incidence(config, report); });
  if (wanted(Suite::kCoverage)) detail::timed(report, "coverage", [&] { detail::run_coverage(config, report); });
  if (!config.points_file.empty()) detail::timed(report, "points", [&] { detail::run_points(config, report); });

  detail::finalize(report);
  if (!config.output_dir.empty()) write_reports(report, config.output_dir);
  return report;
}

}  // namespace ffdist
