#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace postlie {

/// Exact scalar. GMP keeps every value in lowest terms with a positive
/// denominator after each arithmetic operation.
using Rational = mpq_class;

/// Dense coordinate vector over the rationals.
using Vec = std::vector<Rational>;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Canonical "p/q" form; q is always printed, also for integers.
inline std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Accepts "p", "p/q" with optional sign; rejects zero denominators.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto slash = s.find('/');
  auto check_int = [](const std::string& part) {
    std::size_t start = (!part.empty() && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
    if (part.size() == start) return false;
    for (std::size_t i = start; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9') return false;
    return true;
  };
  std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!check_int(num) || !check_int(den) || den[0] == '-' || den[0] == '+')
    throw std::invalid_argument("malformed rational '" + s + "'");
  if (num[0] == '+') num.erase(0, 1);
  mpz_class n(num), d(den);
  if (d == 0) throw std::invalid_argument("rational with zero denominator '" + s + "'");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

inline Vec zero_vec(std::size_t n) { return Vec(n, Rational(0)); }

inline bool is_zero(const Vec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

inline Vec unit_vec(std::size_t n, std::size_t k) {
  Vec v = zero_vec(n);
  v[k] = 1;
  return v;
}

inline void axpy(const Rational& a, const Vec& x, Vec& y) {
  if (a == 0) return;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0) y[i] += a * x[i];
}

inline Vec operator+(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vec operator-(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline Vec operator*(const Rational& s, Vec a) {
  for (auto& x : a) x *= s;
  return a;
}

}  // namespace postlie
