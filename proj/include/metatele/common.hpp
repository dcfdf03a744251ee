#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace metatele {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr double kPi = 3.14159265358979323846;

// Unit multipliers: everything internal is SI (meters, seconds, radians).
inline constexpr double mm = 1e-3;
inline constexpr double um = 1e-6;
inline constexpr double nm = 1e-9;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

inline double wavenumber(double wavelength) { return 2.0 * kPi / wavelength; }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

using complexd = std::complex<double>;

// Base error for all domain failures; CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

// Sampling/aliasing violation. Carries the minimum grid size that would
// satisfy the failed criterion.
class SamplingError : public Error {
 public:
  SamplingError(const std::string& what, int min_n)
      : Error(what), min_n_(min_n) {}
  int min_n() const { return min_n_; }

 private:
  int min_n_;
};

class DegenerateConjugateError : public Error {
 public:
  explicit DegenerateConjugateError(const std::string& what) : Error(what) {}
};

class AfocalError : public Error {
 public:
  explicit AfocalError(const std::string& what) : Error(what) {}
};

class NoRootError : public Error {
 public:
  explicit NoRootError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

// Wrap an angle to (-pi, pi].
inline double wrap_pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

// Wrap an angle to [0, 2*pi).
inline double wrap_2pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  return a;
}

// Distance between two angles on the unit circle, in [0, pi].
inline double circle_distance(double a, double b) {
  return std::abs(wrap_pi(a - b));
}

}  // namespace metatele
