#pragma once

// Functions on the discretized unit torus, their spectra, and partial Fourier
// sums along lacunary frequency sequences.
//
// Convention: samples sit at x_i = i / N, N = 2^m, and the characters are
// e_n(x) = exp(2 pi i n x). Fourier coefficients are normalized so that
// f(x_i) = sum_n c_n e_n(x_i) with n ranging over [-N/2, N/2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "lactile/error.hpp"
#include "lactile/fft.hpp"

namespace lactile {

using Complex = std::complex<double>;

inline constexpr int kMinScale = 3;
inline constexpr int kMaxScale = 26;

class GridFunction {
 public:
  explicit GridFunction(int m) : m_(check_scale(m)), samples_(std::size_t{1} << m) {}

  GridFunction(int m, std::vector<Complex> samples) : m_(check_scale(m)), samples_(std::move(samples)) {
    detail::require(samples_.size() == (std::size_t{1} << m),
                    "GridFunction: expected 2^m samples, got " + std::to_string(samples_.size()));
    for (const auto& v : samples_) {
      detail::require(std::isfinite(v.real()) && std::isfinite(v.imag()), "GridFunction: non-finite sample");
    }
  }

  static GridFunction from_real(int m, std::span<const double> values) {
    std::vector<Complex> s(values.begin(), values.end());
    return GridFunction(m, std::move(s));
  }

  /// Indicator of a sample set given as a 0/1 mask.
  static GridFunction indicator(int m, std::span<const char> mask) {
    detail::require(mask.size() == (std::size_t{1} << m), "indicator: mask size mismatch");
    GridFunction f(m);
    for (std::size_t i = 0; i < mask.size(); ++i) f.samples_[i] = mask[i] ? 1.0 : 0.0;
    return f;
  }

  /// Indicator of the half-open interval [a, b) of the torus, a <= b in [0, 1].
  static GridFunction interval_indicator(int m, double a, double b) {
    GridFunction f(m);
    const auto n = f.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double x = f.point(i);
      f.samples_[i] = (x >= a && x < b) ? 1.0 : 0.0;
    }
    return f;
  }

  /// The character e_n sampled on the grid.
  static GridFunction character(int m, std::int64_t n) {
    GridFunction f(m);
    const auto size = static_cast<std::int64_t>(f.size());
    const std::int64_t r = ((n % size) + size) % size;
    for (std::int64_t i = 0; i < size; ++i) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((r * i) % size) / static_cast<double>(size);
      f.samples_[static_cast<std::size_t>(i)] = std::polar(1.0, phase);
    }
    return f;
  }

  int scale() const { return m_; }
  std::size_t size() const { return samples_.size(); }
  double point(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(samples_.size()); }

  std::span<const Complex> samples() const { return samples_; }
  std::span<Complex> samples() { return samples_; }
  const Complex& operator[](std::size_t i) const { return samples_[i]; }
  Complex& operator[](std::size_t i) { return samples_[i]; }

  GridFunction& operator+=(const GridFunction& o) {
    same_grid(o);
    for (std::size_t i = 0; i < size(); ++i) samples_[i] += o.samples_[i];
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) {
    same_grid(o);
    for (std::size_t i = 0; i < size(); ++i) samples_[i] -= o.samples_[i];
    return *this;
  }
  GridFunction& operator*=(Complex c) {
    for (auto& v : samples_) v *= c;
    return *this;
  }

  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(Complex c, GridFunction a) { return a *= c; }

  bool all_finite() const {
    return std::all_of(samples_.begin(), samples_.end(),
                       [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
  }

  void same_grid(const GridFunction& o) const {
    detail::require(o.m_ == m_, "GridFunction: grid size mismatch");
  }

 private:
  static int check_scale(int m) {
    detail::require(m >= kMinScale && m <= kMaxScale, "GridFunction: scale exponent out of range: " + std::to_string(m));
    return m;
  }

  int m_;
  std::vector<Complex> samples_;
};

/// (1/N) sum f conj(g), the grid version of the L^2(T) inner product.
inline Complex inner(const GridFunction& f, const GridFunction& g) {
  f.same_grid(g);
  Complex acc{};
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * std::conj(g[i]);
  return acc / static_cast<double>(f.size());
}

class Spectrum {
 public:
  explicit Spectrum(int m) : m_(m), coeffs_(std::size_t{1} << m) {
    detail::require(m >= kMinScale && m <= kMaxScale, "Spectrum: scale exponent out of range");
  }

  int scale() const { return m_; }
  std::size_t size() const { return coeffs_.size(); }
  std::int64_t min_frequency() const { return -static_cast<std::int64_t>(size() / 2); }
  std::int64_t max_frequency() const { return static_cast<std::int64_t>(size() / 2) - 1; }

  Complex coeff(std::int64_t n) const { return coeffs_[slot(n)]; }
  Complex& coeff(std::int64_t n) { return coeffs_[slot(n)]; }

  /// Coefficients in FFT storage order (index k holds frequency k or k - N).
  std::span<const Complex> raw() const { return coeffs_; }
  std::span<Complex> raw() { return coeffs_; }

 private:
  std::size_t slot(std::int64_t n) const {
    if (n < min_frequency() || n > max_frequency()) throw FrequencyOverflow("Spectrum: frequency out of range");
    return static_cast<std::size_t>(n >= 0 ? n : n + static_cast<std::int64_t>(size()));
  }

  int m_;
  std::vector<Complex> coeffs_;
};

inline Spectrum to_spectrum(const GridFunction& f) {
  Spectrum s(f.scale());
  std::copy(f.samples().begin(), f.samples().end(), s.raw().begin());
  fft::transform(s.raw(), fft::Direction::Forward);
  const double inv = 1.0 / static_cast<double>(f.size());
  for (auto& c : s.raw()) c *= inv;
  return s;
}

inline GridFunction from_spectrum(const Spectrum& s) {
  std::vector<Complex> buf(s.raw().begin(), s.raw().end());
  fft::transform(buf, fft::Direction::Backward);
  return GridFunction(s.scale(), std::move(buf));
}

/// Geometric frequency sequence n_j = alpha^j, j = 0..count-1.
class LacunarySequence {
 public:
  LacunarySequence(std::int64_t alpha, int count) : alpha_(alpha) {
    detail::require(alpha >= 2, "LacunarySequence: alpha must be an integer >= 2");
    detail::require(count >= 1 && count <= 62, "LacunarySequence: count out of range");
    std::int64_t v = 1;
    for (int j = 0; j < count; ++j) {
      values_.push_back(v);
      if (j + 1 < count) {
        detail::require(v <= (std::int64_t{1} << 62) / alpha, "LacunarySequence: overflow");
        v *= alpha;
      }
    }
  }

  std::int64_t alpha() const { return alpha_; }
  int count() const { return static_cast<int>(values_.size()); }
  std::int64_t operator[](int j) const { return values_[static_cast<std::size_t>(j)]; }
  std::int64_t max() const { return values_.back(); }
  std::span<const std::int64_t> values() const { return values_; }

  bool contains(std::int64_t n) const { return std::binary_search(values_.begin(), values_.end(), n); }

 private:
  std::int64_t alpha_;
  std::vector<std::int64_t> values_;
};

/// The linearizing choice x -> N(x) of a maximizing frequency, one per sample.
struct FrequencySelector {
  int m = 0;
  std::vector<std::int64_t> freq;

  std::size_t size() const { return freq.size(); }
  std::int64_t operator[](std::size_t i) const { return freq[i]; }

  static FrequencySelector constant(int m, std::int64_t n) {
    return FrequencySelector{m, std::vector<std::int64_t>(std::size_t{1} << m, n)};
  }
};

namespace detail {

inline void check_cutoff(std::size_t size, std::int64_t n) {
  if (n < 0) throw ConfigError("partial sum: negative cutoff");
  if (n >= static_cast<std::int64_t>(size / 2)) {
    throw FrequencyOverflow("partial sum cutoff " + std::to_string(n) + " >= N/2 = " + std::to_string(size / 2));
  }
}

// S_n from a precomputed spectrum (FFT storage order).
inline GridFunction truncate_and_invert(const Spectrum& s, std::int64_t n) {
  const auto size = static_cast<std::int64_t>(s.size());
  std::vector<Complex> buf(s.raw().begin(), s.raw().end());
  for (std::int64_t k = 0; k < size; ++k) {
    const std::int64_t freq = k < size / 2 ? k : k - size;
    if (freq > n || freq < -n) buf[static_cast<std::size_t>(k)] = 0.0;
  }
  fft::transform(buf, fft::Direction::Backward);
  return GridFunction(s.scale(), std::move(buf));
}

}  // namespace detail

/// S_n f = sum_{|k| <= n} c_k e_k.
inline GridFunction partial_sum(const GridFunction& f, std::int64_t n) {
  detail::check_cutoff(f.size(), n);
  return detail::truncate_and_invert(to_spectrum(f), n);
}

/// |S_{n_j} f| for every member of the sequence, sample-major per j.
inline std::vector<std::vector<double>> lacunary_moduli(const GridFunction& f, const LacunarySequence& seq) {
  detail::check_cutoff(f.size(), seq.max());
  const Spectrum s = to_spectrum(f);
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(seq.count()));
  for (auto n : seq.values()) {
    const GridFunction sn = detail::truncate_and_invert(s, n);
    std::vector<double> mod(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) mod[i] = std::abs(sn[i]);
    out.push_back(std::move(mod));
  }
  return out;
}

/// sup_j |S_{n_j} f|, as a real nonnegative grid function.
inline GridFunction lacunary_maximal(const GridFunction& f, const LacunarySequence& seq) {
  const auto mods = lacunary_moduli(f, seq);
  GridFunction out(f.scale());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double best = 0.0;
    for (const auto& mod : mods) best = std::max(best, mod[i]);
    out[i] = best;
  }
  return out;
}

/// N(x) = n_{j*} with j* the smallest index attaining max_j |S_{n_j} f(x)|.
inline FrequencySelector linearize(const GridFunction& f, const LacunarySequence& seq) {
  const auto mods = lacunary_moduli(f, seq);
  FrequencySelector sel{f.scale(), std::vector<std::int64_t>(f.size())};
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < mods.size(); ++j) {
      if (mods[j][i] > mods[best][i]) best = j;
    }
    sel.freq[i] = seq[static_cast<int>(best)];
  }
  return sel;
}

/// sup over every cutoff 0 <= n < N/2 of |S_n f|.
///
/// Partial sums are advanced one frequency pair at a time. Whenever n is a
/// member of `checkpoints`, the running sum is replaced by the FFT-computed
/// S_n f, so the values at those cutoffs coincide bit for bit with the ones
/// lacunary_maximal sees and the recurrence drift is reset.
inline GridFunction carleson_maximal(const GridFunction& f, const LacunarySequence& checkpoints) {
  const Spectrum s = to_spectrum(f);
  const auto size = f.size();
  const auto isize = static_cast<std::int64_t>(size);
  std::vector<double> cos_t(size), sin_t(size);
  for (std::size_t t = 0; t < size; ++t) {
    const Complex w = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(size));
    cos_t[t] = w.real();
    sin_t[t] = w.imag();
  }
  std::vector<double> re(size, s.coeff(0).real()), im(size, s.coeff(0).imag());
  // Off the checkpoints only squared moduli are compared; at a checkpoint the
  // modulus is taken exactly as lacunary_maximal takes it.
  std::vector<double> best_sq(size), best_cp(size, 0.0);
  for (std::size_t i = 0; i < size; ++i) best_sq[i] = re[i] * re[i] + im[i] * im[i];
  for (std::int64_t n = 1; n < isize / 2; ++n) {
    if (checkpoints.contains(n)) {
      const GridFunction sn = detail::truncate_and_invert(s, n);
      for (std::size_t i = 0; i < size; ++i) {
        re[i] = sn[i].real();
        im[i] = sn[i].imag();
        best_cp[i] = std::max(best_cp[i], std::abs(sn[i]));
      }
      continue;
    }
    // c_n w + c_{-n} conj(w) with w = cos + i sin.
    const Complex cp = s.coeff(n);
    const Complex cm = s.coeff(-n);
    const double sr = cp.real() + cm.real(), dr = cp.real() - cm.real();
    const double si = cp.imag() + cm.imag(), di = cp.imag() - cm.imag();
    std::size_t idx = 0;
    for (std::size_t i = 0; i < size; ++i) {
      const double c = cos_t[idx], sn = sin_t[idx];
      re[i] += sr * c - di * sn;
      im[i] += si * c + dr * sn;
      best_sq[i] = std::max(best_sq[i], re[i] * re[i] + im[i] * im[i]);
      idx = (idx + static_cast<std::size_t>(n)) & (size - 1);
    }
  }
  GridFunction out(f.scale());
  for (std::size_t i = 0; i < size; ++i) out[i] = std::max(std::sqrt(best_sq[i]), best_cp[i]);
  return out;
}

}  // namespace lactile
