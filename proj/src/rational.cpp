#include "rbmx/rational.hpp"

#include <cctype>

#include "rbmx/error.hpp"

namespace rbmx {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Rational bad(std::string_view text) {
  throw Error(Errc::InvalidInput, "not a rational: '" + std::string(text) + "'");
}

Rational pow10(long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? Rational(mpz_class(1), p) : Rational(p);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational r;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return bad(text);
    mpz_class d{std::string(den)};
    if (d == 0) return bad(text);
    r = Rational(mpz_class(std::string(num)), d);
    r.canonicalize();
  } else {
    std::string_view mant = s, expo;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      mant = s.substr(0, e);
      expo = s.substr(e + 1);
    }
    std::string_view ip = mant, fp;
    if (auto dot = mant.find('.'); dot != std::string_view::npos) {
      ip = mant.substr(0, dot);
      fp = mant.substr(dot + 1);
    }
    if (ip.empty() && fp.empty()) return bad(text);
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp))) return bad(text);
    std::string digits = std::string(ip) + std::string(fp);
    r = Rational(mpz_class(digits.empty() ? "0" : digits));
    r *= pow10(-static_cast<long>(fp.size()));
    if (!expo.empty()) {
      bool eneg = false;
      if (expo.front() == '-' || expo.front() == '+') {
        eneg = expo.front() == '-';
        expo.remove_prefix(1);
      }
      if (!all_digits(expo) || expo.size() > 6) return bad(text);
      long e = std::stol(std::string(expo));
      r *= pow10(eneg ? -e : e);
    }
    r.canonicalize();
  }
  return neg ? Rational(-r) : r;
}

std::string format_rational(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational make_rational(long num, long den) {
  Rational r{mpz_class(num), mpz_class(den)};
  r.canonicalize();
  return r;
}

}  // namespace rbmx
