#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace rbmx {

// Always canonical: reduced, positive denominator.
using Rational = mpq_class;
using Integer = mpz_class;

// Accepts "n", "n/d", "-n/d", decimals "0.25" and exponents "1e-6".
Rational parse_rational(std::string_view text);

// "num/den", also for integers ("1/1").
std::string format_rational(const Rational& r);

Rational make_rational(long num, long den = 1);

}  // namespace rbmx
