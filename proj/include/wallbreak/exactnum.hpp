#pragma once

// Exact number support: arbitrary-precision integers and rationals, plus
// quadratic irrationals (a + b*sqrt(d)) / c with exact floor and comparison.
// Nothing on these paths touches floating point.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace wallbreak {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

class UnsupportedComparison : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline BigInt floor_div(const BigInt &num, const BigInt &den) {
  if (den == 0) throw std::domain_error("division by zero");
  BigInt q = num / den; // truncates toward zero
  BigInt r = num - q * den;
  if (r != 0 && ((r < 0) != (den < 0))) --q;
  return q;
}

inline BigInt floor_of(const BigRational &r) {
  return floor_div(numerator(r), denominator(r));
}

/// Largest integer whose square does not exceed n (n >= 0).
inline BigInt isqrt(const BigInt &n) {
  if (n < 0) throw std::domain_error("isqrt of negative value");
  if (n < 2) return n;
  // Bisection on [lo, hi) with lo^2 <= n < hi^2.
  BigInt lo = 1;
  BigInt hi = BigInt(1) << (static_cast<unsigned>(msb(n)) / 2 + 1);
  while (hi - lo > 1) {
    BigInt mid = (lo + hi) >> 1;
    if (mid * mid <= n)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

inline std::string to_string(const BigRational &r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// (a + b*sqrt(d)) / c, kept normalized: c > 0, d square-free, d == 0 iff
/// b == 0, and gcd(a, b, c) == 1.
class QuadraticValue {
public:
  QuadraticValue() : a_(0), b_(0), c_(1), d_(0) {}
  QuadraticValue(BigInt a, BigInt b, BigInt d, BigInt c)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    normalize();
  }
  explicit QuadraticValue(const BigRational &r)
      : a_(numerator(r)), b_(0), c_(denominator(r)), d_(0) {}
  QuadraticValue(std::int64_t v) : a_(v), b_(0), c_(1), d_(0) {}

  const BigInt &a() const { return a_; }
  const BigInt &b() const { return b_; }
  const BigInt &c() const { return c_; }
  const BigInt &d() const { return d_; }

  bool is_rational() const { return b_ == 0; }
  BigRational as_rational() const {
    if (!is_rational()) throw std::domain_error("value is irrational");
    return BigRational(a_, c_);
  }

  friend bool operator==(const QuadraticValue &, const QuadraticValue &) = default;

  friend QuadraticValue operator+(const QuadraticValue &u, const QuadraticValue &v) {
    const BigInt &d = common_radicand(u, v);
    return {u.a_ * v.c_ + v.a_ * u.c_, u.b_ * v.c_ + v.b_ * u.c_, d, u.c_ * v.c_};
  }
  friend QuadraticValue operator-(const QuadraticValue &u) {
    return {-u.a_, -u.b_, u.d_, u.c_};
  }
  friend QuadraticValue operator-(const QuadraticValue &u, const QuadraticValue &v) {
    return u + (-v);
  }
  friend QuadraticValue operator*(const QuadraticValue &u, const QuadraticValue &v) {
    const BigInt &d = common_radicand(u, v);
    return {u.a_ * v.a_ + u.b_ * v.b_ * d, u.a_ * v.b_ + u.b_ * v.a_, d, u.c_ * v.c_};
  }

  std::string str() const {
    if (is_rational()) return to_string(as_rational());
    return "quad:" + a_.str() + "," + b_.str() + "," + d_.str() + "," + c_.str();
  }

private:
  static const BigInt &common_radicand(const QuadraticValue &u, const QuadraticValue &v) {
    if (u.d_ != 0 && v.d_ != 0 && u.d_ != v.d_)
      throw UnsupportedComparison("mixed radicands sqrt(" + u.d_.str() + ") and sqrt(" +
                                  v.d_.str() + ")");
    return u.d_ != 0 ? u.d_ : v.d_;
  }

  void normalize() {
    if (c_ == 0) throw std::domain_error("zero denominator");
    if (d_ < 0) throw std::domain_error("negative radicand");
    if (c_ < 0) {
      a_ = -a_;
      b_ = -b_;
      c_ = -c_;
    }
    if (d_ == 0) b_ = 0;
    if (b_ != 0) {
      // Pull square factors out of d.
      BigInt f = 1;
      for (BigInt p = 2; p * p <= d_; ++p) {
        while (d_ % (p * p) == 0) {
          d_ /= p * p;
          f *= p;
        }
      }
      b_ *= f;
      if (d_ == 1) {
        a_ += b_;
        b_ = 0;
      }
    }
    if (b_ == 0) d_ = 0;
    BigInt g = gcd(gcd(a_, b_), c_);
    if (g > 1) {
      a_ /= g;
      b_ /= g;
      c_ /= g;
    }
  }

  BigInt a_, b_, c_, d_;
};

/// floor((a + b*sqrt(d)) / c), via integer square roots only.
inline BigInt floor_exact(const QuadraticValue &v) {
  if (v.is_rational()) return floor_div(v.a(), v.c());
  // b*sqrt(d) = sign(b) * sqrt(b^2 d), never an integer because d is
  // square-free and > 1, so it lies strictly between consecutive integers.
  BigInt t = v.b() * v.b() * v.d();
  BigInt r = isqrt(t);
  BigInt lower = v.b() > 0 ? r : -r - 1;
  // a + b*sqrt(d) is in (a + lower, a + lower + 1) and c > 0.
  return floor_div(v.a() + lower, v.c());
}

inline std::strong_ordering compare_exact(const QuadraticValue &u, const QuadraticValue &v) {
  QuadraticValue diff = u - v; // throws UnsupportedComparison on mixed radicands
  // sign of (A + B sqrt(d)) since c > 0
  const BigInt &A = diff.a();
  const BigInt &B = diff.b();
  auto sign = [](const BigInt &x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); };
  int sa = sign(A), sb = sign(B);
  int s;
  if (sb == 0)
    s = sa;
  else if (sa == 0 || sa == sb)
    s = sb;
  else {
    BigInt a2 = A * A, b2d = B * B * diff.d();
    s = a2 > b2d ? sa : sb; // never equal: d square-free
  }
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

inline bool operator<(const QuadraticValue &u, const QuadraticValue &v) {
  return compare_exact(u, v) == std::strong_ordering::less;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline BigInt parse_integer(std::string_view s) {
  s = trim(s);
  std::string_view digits = s;
  if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.remove_prefix(1);
  if (digits.empty()) throw ParseError("expected an integer, got '" + std::string(s) + "'");
  for (char ch : digits)
    if (ch < '0' || ch > '9') throw ParseError("expected an integer, got '" + std::string(s) + "'");
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  return BigInt(std::string(s));
}

// `n`, `p/q`, or a decimal literal like `-3.01`.
inline BigRational parse_simple_rational(std::string_view s) {
  s = trim(s);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    BigInt p = parse_integer(s.substr(0, slash));
    BigInt q = parse_integer(s.substr(slash + 1));
    if (q == 0) throw ParseError("zero denominator in '" + std::string(s) + "'");
    return BigRational(p, q);
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
    bool neg = !ip.empty() && ip.front() == '-';
    if (neg || (!ip.empty() && ip.front() == '+')) ip.remove_prefix(1);
    if (fp.empty() && ip.empty()) throw ParseError("malformed decimal '" + std::string(s) + "'");
    for (char ch : fp)
      if (ch < '0' || ch > '9') throw ParseError("malformed decimal '" + std::string(s) + "'");
    BigInt whole = ip.empty() ? BigInt(0) : parse_integer(ip);
    if (whole < 0) throw ParseError("malformed decimal '" + std::string(s) + "'");
    BigInt scale = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
    BigInt frac = fp.empty() ? BigInt(0) : BigInt(std::string(fp));
    BigRational r(whole * scale + frac, scale);
    return neg ? BigRational(-r) : r;
  }
  return BigRational(parse_integer(s));
}

} // namespace detail

/// Exact rational from `p/q`, an integer, a decimal (`3.01` is 301/100), or
/// a sum/difference of those (`3+1/17`).
inline BigRational parse_rational(std::string_view text) {
  std::string_view s = detail::trim(text);
  if (s.empty()) throw ParseError("empty number");
  // split on + / - that are not a leading sign
  BigRational total = 0;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '+' || s[i] == '-') {
      total += detail::parse_simple_rational(s.substr(start, i - start));
      start = i;
    }
  }
  return total;
}

/// Slope syntax: anything parse_rational accepts, or `quad:a,b,d,c` for
/// (a + b*sqrt(d)) / c.
inline QuadraticValue parse_quadratic(std::string_view text) {
  std::string_view s = detail::trim(text);
  if (s.rfind("quad:", 0) == 0) {
    s.remove_prefix(5);
    BigInt parts[4];
    for (int i = 0; i < 4; ++i) {
      auto comma = s.find(',');
      if ((comma == std::string_view::npos) != (i == 3))
        throw ParseError("quad: expects four comma-separated integers a,b,d,c");
      parts[i] = detail::parse_integer(s.substr(0, comma));
      if (i < 3) s.remove_prefix(comma + 1);
    }
    if (parts[3] == 0) throw ParseError("quad: zero denominator");
    if (parts[2] < 0) throw ParseError("quad: negative radicand");
    return QuadraticValue(parts[0], parts[1], parts[2], parts[3]);
  }
  return QuadraticValue(parse_rational(s));
}

} // namespace wallbreak
