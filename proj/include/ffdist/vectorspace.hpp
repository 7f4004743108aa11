#pragma once

// Vectors in F_q^d, n-th power norms, point sets and the q^{-d}-normalized Fourier transform.
//
// Functions on F_q^d are stored row-major: x = (x_1, ..., x_d) lives at index
// sum_i x_i q^{d-1-i}.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ffdist/characters.hpp"
#include "ffdist/error.hpp"
#include "ffdist/field.hpp"
#include "ffdist/rng.hpp"

namespace ffdist {

inline constexpr unsigned kMaxDimension = 4;

/// Index arithmetic for the grid F_q^d.
class GridShape {
 public:
  GridShape(Residue q, unsigned d) : q_(q), d_(d), size_(1) {
    if (d == 0 || d > kMaxDimension) {
      fail(ErrorKind::kDimensionTooLarge, "dimension " + std::to_string(d) + " outside [1, 4]");
    }
    for (unsigned i = 0; i < d; ++i) size_ *= q;
  }

  Residue modulus() const noexcept { return q_; }
  unsigned dimension() const noexcept { return d_; }
  std::size_t size() const noexcept { return size_; }

  std::size_t index_of(std::span<const Residue> coords) const {
    if (coords.size() != d_) fail(ErrorKind::kDimensionMismatch, "expected " + std::to_string(d_) + " coordinates");
    std::size_t index = 0;
    for (Residue c : coords) {
      if (c >= q_) fail(ErrorKind::kInvalidArgument, "coordinate " + std::to_string(c) + " out of range");
      index = index * q_ + c;
    }
    return index;
  }

  std::vector<Residue> coords_of(std::size_t index) const {
    std::vector<Residue> coords(d_);
    for (unsigned i = d_; i-- > 0;) {
      coords[i] = static_cast<Residue>(index % q_);
      index /= q_;
    }
    return coords;
  }

  /// Index of x - y.
  std::size_t difference(std::size_t x, std::size_t y) const {
    std::size_t out = 0, scale = 1;
    for (unsigned i = 0; i < d_; ++i) {
      const auto xi = static_cast<Residue>(x % q_), yi = static_cast<Residue>(y % q_);
      out += static_cast<std::size_t>((xi + q_ - yi) % q_) * scale;
      x /= q_;
      y /= q_;
      scale *= q_;
    }
    return out;
  }

  friend bool operator==(const GridShape&, const GridShape&) = default;

 private:
  Residue q_;
  unsigned d_;
  std::size_t size_;
};

/// A point of F_q^d.
class Vector {
 public:
  Vector(const PrimeField& field, std::vector<std::int64_t> coords) : modulus_(field.modulus()) {
    if (coords.empty()) fail(ErrorKind::kDimensionMismatch, "a vector needs at least one coordinate");
    coords_.reserve(coords.size());
    for (auto c : coords) coords_.push_back(detail::reduce(c, modulus_));
  }

  Vector(Residue modulus, std::vector<Residue> coords) : modulus_(modulus), coords_(std::move(coords)) {
    for (auto& c : coords_) c %= modulus_;
  }

  Residue modulus() const noexcept { return modulus_; }
  unsigned dimension() const noexcept { return static_cast<unsigned>(coords_.size()); }
  std::span<const Residue> coords() const noexcept { return coords_; }
  FieldElement operator[](std::size_t i) const { return FieldElement(coords_.at(i), modulus_); }

  friend Vector operator-(const Vector& a, const Vector& b) {
    if (a.modulus_ != b.modulus_ || a.coords_.size() != b.coords_.size()) {
      fail(ErrorKind::kAmbientMismatch, "vectors from different spaces");
    }
    std::vector<Residue> out(a.coords_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (a.coords_[i] + a.modulus_ - b.coords_[i]) % a.modulus_;
    return Vector(a.modulus_, std::move(out));
  }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  Residue modulus_;
  std::vector<Residue> coords_;
};

/// ||x||_n = x_1^n + ... + x_d^n.
inline FieldElement norm_n(const Vector& x, std::uint64_t n) {
  if (n == 0) fail(ErrorKind::kInvalidArgument, "norm exponent must be >= 1");
  std::uint64_t sum = 0;
  for (Residue c : x.coords()) sum += detail::pow_mod(c, n, x.modulus());
  return FieldElement(static_cast<std::int64_t>(sum % x.modulus()), x.modulus());
}

/// table[x] = x^n mod q.
inline std::vector<Residue> power_table(Residue q, std::uint64_t n) {
  std::vector<Residue> table(q);
  for (Residue x = 0; x < q; ++x) table[x] = detail::pow_mod(x, n, q);
  return table;
}

/// ||x||_n for every grid index.
inline std::vector<Residue> norm_table(const GridShape& shape, std::uint64_t n) {
  const Residue q = shape.modulus();
  const auto powers = power_table(q, n);
  std::vector<Residue> norms(shape.size(), 0);
  // norms over d axes built from norms over d-1 axes: index = prefix * q + last
  std::size_t block = 1;
  for (unsigned axis = 0; axis < shape.dimension(); ++axis) {
    for (std::size_t prefix = block; prefix-- > 0;) {
      const Residue base = norms[prefix];
      for (Residue x = 0; x < q; ++x) norms[prefix * q + x] = (base + powers[x]) % q;
    }
    block *= q;
  }
  return norms;
}

/// A subset of F_q^d held both as a dense membership grid and as an ascending index list.
class PointSet {
 public:
  PointSet(PrimeField field, unsigned d) : field_(std::move(field)), shape_(field_.modulus(), d), grid_(shape_.size(), 0) {}

  static PointSet from_indices(const PrimeField& field, unsigned d, std::span<const std::size_t> indices) {
    PointSet set(field, d);
    for (std::size_t i : indices) {
      if (i >= set.shape_.size()) fail(ErrorKind::kInvalidArgument, "grid index out of range");
      set.grid_[i] = 1;
    }
    set.rebuild_list();
    return set;
  }

  static PointSet from_vectors(const PrimeField& field, unsigned d, std::span<const Vector> points) {
    PointSet set(field, d);
    for (const auto& p : points) {
      if (p.modulus() != field.modulus()) fail(ErrorKind::kAmbientMismatch, "point from another field");
      set.grid_[set.shape_.index_of(p.coords())] = 1;
    }
    set.rebuild_list();
    return set;
  }

  static PointSet full(const PrimeField& field, unsigned d) {
    PointSet set(field, d);
    std::fill(set.grid_.begin(), set.grid_.end(), std::uint8_t{1});
    set.rebuild_list();
    return set;
  }

  const PrimeField& field() const noexcept { return field_; }
  const GridShape& shape() const noexcept { return shape_; }
  unsigned dimension() const noexcept { return shape_.dimension(); }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }

  bool contains(std::size_t index) const { return grid_.at(index) != 0; }
  bool contains(const Vector& x) const { return contains(shape_.index_of(x.coords())); }

  std::span<const std::size_t> indices() const noexcept { return members_; }
  std::span<const std::uint8_t> membership() const noexcept { return grid_; }
  Vector point(std::size_t i) const { return Vector(field_.modulus(), shape_.coords_of(members_.at(i))); }

  std::vector<Complex> indicator() const {
    std::vector<Complex> f(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) f[i] = grid_[i] ? 1.0 : 0.0;
    return f;
  }

  /// Grid and list views agree element for element.
  bool consistent() const {
    std::size_t count = 0;
    for (auto cell : grid_) count += cell;
    return count == members_.size() &&
           std::all_of(members_.begin(), members_.end(), [&](std::size_t i) { return grid_[i] != 0; }) &&
           std::is_sorted(members_.begin(), members_.end());
  }

 private:
  void rebuild_list() {
    members_.clear();
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (grid_[i]) members_.push_back(i);
    }
  }

  PrimeField field_;
  GridShape shape_;
  std::vector<std::uint8_t> grid_;
  std::vector<std::size_t> members_;
};

inline void require_same_ambient(const PointSet& a, const PointSet& b) {
  if (!(a.shape() == b.shape())) {
    fail(ErrorKind::kAmbientMismatch, "point sets live in different spaces");
  }
}

enum class Normalization {
  // f-hat(m) = q^{-d} sum_x chi(-x.m) f(x);  f(x) = sum_m chi(x.m) f-hat(m)
  kScaledForward,
};

/// A complex function on F_q^d, typically a Fourier transform.
class SpectralFunction {
 public:
  SpectralFunction(PrimeField field, unsigned d, std::vector<Complex> values,
                   Normalization normalization = Normalization::kScaledForward)
      : field_(std::move(field)), shape_(field_.modulus(), d), values_(std::move(values)), normalization_(normalization) {
    if (values_.size() != shape_.size()) {
      fail(ErrorKind::kDimensionMismatch, "expected " + std::to_string(shape_.size()) + " values");
    }
  }

  const PrimeField& field() const noexcept { return field_; }
  const GridShape& shape() const noexcept { return shape_; }
  Normalization normalization() const noexcept { return normalization_; }
  std::span<const Complex> values() const noexcept { return values_; }

  Complex operator[](std::size_t index) const { return values_[index]; }
  Complex at(const Vector& m) const { return values_[shape_.index_of(m.coords())]; }

 private:
  PrimeField field_;
  GridShape shape_;
  std::vector<Complex> values_;
  Normalization normalization_;
};

namespace detail {

// In-place length-q DFT along every axis: out[m] = sum_x e^{sign 2 pi i x m / q} in[x].
inline void separable_dft(const GridShape& shape, std::vector<Complex>& data, int sign) {
  const Residue q = shape.modulus();
  std::vector<Complex> twiddle(q);
  for (Residue t = 0; t < q; ++t) {
    twiddle[t] = root_of_unity(sign < 0 ? (q - t) % q : t, q);
  }

  std::vector<Complex> line(q), out(q);
  std::size_t stride = shape.size();
  for (unsigned axis = 0; axis < shape.dimension(); ++axis) {
    stride /= q;
    const std::size_t span = stride * q;
    for (std::size_t outer = 0; outer < shape.size(); outer += span) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t base = outer + inner;
        for (Residue x = 0; x < q; ++x) line[x] = data[base + x * stride];
        for (Residue m = 0; m < q; ++m) {
          Complex acc = 0.0;
          Residue phase = 0;
          for (Residue x = 0; x < q; ++x) {
            acc += twiddle[phase] * line[x];
            phase += m;
            if (phase >= q) phase -= q;
          }
          out[m] = acc;
        }
        for (Residue m = 0; m < q; ++m) data[base + m * stride] = out[m];
      }
    }
  }
}

}  // namespace detail

/// f-hat(m) = q^{-d} sum_x chi(-x.m) f(x), computed one axis at a time in O(d q^{d+1}).
inline SpectralFunction fourier_transform(const PrimeField& field, unsigned d, std::span<const Complex> f) {
  const GridShape shape(field.modulus(), d);
  if (f.size() != shape.size()) {
    fail(ErrorKind::kDimensionMismatch,
         "function has " + std::to_string(f.size()) + " values, F_q^d has " + std::to_string(shape.size()));
  }
  std::vector<Complex> data(f.begin(), f.end());
  detail::separable_dft(shape, data, -1);
  const double scale = 1.0 / static_cast<double>(shape.size());
  for (auto& v : data) v *= scale;
  return SpectralFunction(field, d, std::move(data));
}

inline SpectralFunction fourier_transform(const PointSet& set) {
  const auto f = set.indicator();
  return fourier_transform(set.field(), set.dimension(), f);
}

/// f(x) = sum_m chi(x.m) f-hat(m).
inline std::vector<Complex> inverse_fourier_transform(const SpectralFunction& spectrum) {
  std::vector<Complex> data(spectrum.values().begin(), spectrum.values().end());
  detail::separable_dft(spectrum.shape(), data, +1);
  return data;
}

/// | sum_m |f-hat(m)|^2 - q^{-d} sum_x |f(x)|^2 |.
inline double plancherel_residual(const PrimeField& field, unsigned d, std::span<const Complex> f) {
  const auto spectrum = fourier_transform(field, d, f);
  double spectral = 0.0, spatial = 0.0;
  for (const auto& v : spectrum.values()) spectral += std::norm(v);
  for (const auto& v : f) spatial += std::norm(v);
  return std::abs(spectral - spatial / static_cast<double>(spectrum.shape().size()));
}

/// Uniform subset of exactly `size` distinct points (Floyd's sampling).
inline PointSet sample_point_set(const PrimeField& field, unsigned d, std::size_t size, Rng& rng) {
  const GridShape shape(field.modulus(), d);
  if (size > shape.size()) {
    fail(ErrorKind::kSizeTooLarge,
         "requested " + std::to_string(size) + " points from a space of " + std::to_string(shape.size()));
  }
  std::vector<std::uint8_t> taken(shape.size(), 0);
  std::vector<std::size_t> chosen;
  chosen.reserve(size);
  for (std::size_t j = shape.size() - size; j < shape.size(); ++j) {
    const auto t = static_cast<std::size_t>(rng.below(j + 1));
    const std::size_t pick = taken[t] ? j : t;
    taken[pick] = 1;
    chosen.push_back(pick);
  }
  return PointSet::from_indices(field, d, chosen);
}

inline PointSet sample_point_set(const PrimeField& field, unsigned d, std::size_t size, std::uint64_t seed) {
  Rng rng(seed, "point-set");
  return sample_point_set(field, d, size, rng);
}

// Point-set text format: a header line "q=<q> d=<d>", then one point per line as
// comma-separated residues. Blank lines are ignored.

inline PointSet read_point_set(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto parse_error = [&](const std::string& what) {
    fail(ErrorKind::kParse, "line " + std::to_string(line_no) + ": " + what);
  };
  auto parse_int = [&](const std::string& token) -> long long {
    std::size_t used = 0;
    long long value = 0;
    try {
      value = std::stoll(token, &used);
    } catch (const std::exception&) {
      parse_error("not an integer: '" + token + "'");
    }
    while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) ++used;
    if (used != token.size()) parse_error("not an integer: '" + token + "'");
    return value;
  };

  long long q = -1, d = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream header(line);
    std::string qpart, dpart, extra;
    header >> qpart >> dpart;
    if (qpart.rfind("q=", 0) != 0 || dpart.rfind("d=", 0) != 0 || (header >> extra)) {
      parse_error("expected header 'q=<q> d=<d>'");
    }
    q = parse_int(qpart.substr(2));
    d = parse_int(dpart.substr(2));
    break;
  }
  if (q < 0) fail(ErrorKind::kParse, "missing header 'q=<q> d=<d>'");
  if (d < 1 || d > static_cast<long long>(kMaxDimension)) parse_error("dimension out of range");
  const PrimeField field = make_field(static_cast<std::uint64_t>(q));
  const GridShape shape(field.modulus(), static_cast<unsigned>(d));

  std::vector<std::size_t> indices;
  std::vector<Residue> coords;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    coords.clear();
    std::stringstream fields(line);
    std::string token;
    while (std::getline(fields, token, ',')) {
      const long long value = parse_int(token);
      if (value < 0 || value >= q) parse_error("residue " + std::to_string(value) + " outside [0, q)");
      coords.push_back(static_cast<Residue>(value));
    }
    if (coords.size() != static_cast<std::size_t>(d)) {
      parse_error("expected " + std::to_string(d) + " coordinates, got " + std::to_string(coords.size()));
    }
    indices.push_back(shape.index_of(coords));
  }
  return PointSet::from_indices(field, static_cast<unsigned>(d), indices);
}

inline void write_point_set(std::ostream& out, const PointSet& set) {
  out << "q=" << set.field().modulus() << " d=" << set.dimension() << '\n';
  for (std::size_t index : set.indices()) {
    const auto coords = set.shape().coords_of(index);
    for (std::size_t i = 0; i < coords.size(); ++i) out << (i ? "," : "") << coords[i];
    out << '\n';
  }
}

inline PointSet load_point_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kParse, "cannot open " + path);
  return read_point_set(in);
}

}  // namespace ffdist
