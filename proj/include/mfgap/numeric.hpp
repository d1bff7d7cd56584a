#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace mfgap {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Complex number with exact rational parts.
struct GaussianRational {
  Rational re{0};
  Rational im{0};

  GaussianRational() = default;
  GaussianRational(Rational r) : re(std::move(r)) {}
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  GaussianRational& operator+=(const GaussianRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
};

// Scalar traits shared by exact and floating amplitudes.
inline double abs2(const std::complex<double>& z) { return std::norm(z); }
inline Rational abs2(const GaussianRational& z) { return z.re * z.re + z.im * z.im; }
inline std::complex<double> conj(const std::complex<double>& z) { return std::conj(z); }
inline GaussianRational conj(const GaussianRational& z) { return {z.re, -z.im}; }
inline bool is_zero(const std::complex<double>& z) { return z == std::complex<double>{}; }
inline bool is_zero(const GaussianRational& z) { return z.re == 0 && z.im == 0; }
inline std::complex<double> halve(const std::complex<double>& z) { return z * 0.5; }
inline GaussianRational halve(const GaussianRational& z) {
  return {z.re / 2, z.im / 2};
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

// "num/den" rendering; integers render without a denominator.
std::string to_string(const Rational& r);
Rational parse_rational(std::string_view text);
BigInt parse_bigint(std::string_view text);

// Deterministic stream splitting: one seed, many independent substreams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

}  // namespace mfgap
