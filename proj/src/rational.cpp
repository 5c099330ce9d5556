#include "ceg/rational.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ceg {

namespace {

BigInt parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) {
    throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  }
  for (char c : digits) {
    if (c < '0' || c > '9') {
      throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    }
  }
  return BigInt(std::string(digits));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  const auto slash = body.find('/');
  BigInt num = parse_integer(body.substr(0, slash), text);
  BigInt den = 1;
  if (slash != std::string_view::npos) {
    den = parse_integer(body.substr(slash + 1), text);
    if (den == 0) {
      throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    }
  }
  if (negative) num = -num;
  return Rational(num, den);
}

std::string format_rational(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::string format_decimal(const Rational& value, int places) {
  BigInt scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const Rational scaled = value * scale;
  BigInt num = boost::multiprecision::numerator(scaled);
  const BigInt den = boost::multiprecision::denominator(scaled);
  const bool negative = num < 0;
  if (negative) num = -num;
  BigInt rounded = (2 * num + den) / (2 * den);
  std::string digits = rounded.str();
  if (places > 0) {
    if (digits.size() <= static_cast<std::size_t>(places)) {
      digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  }
  if (negative && rounded != 0) digits.insert(0, "-");
  return digits;
}

std::string format_decimal(double value, int places) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", places, value);
  std::string out(buffer);
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);
  }
  return out;
}

}  // namespace ceg
