#include "rbmx/rng.hpp"

namespace rbmx {

std::uint64_t Rng::below(std::uint64_t n) {
  // Reject the low residue so every class has equal preimage size.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

Integer Rng::below(const Integer& n) {
  if (n.fits_ulong_p() && n.get_ui() > 0) return Integer(static_cast<unsigned long>(below(std::uint64_t{n.get_ui()})));
  const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  for (;;) {
    Integer r = 0;
    for (std::size_t w = 0; w < words; ++w) {
      r <<= 64;
      std::uint64_t x = next();
      r += Integer(static_cast<unsigned long>(x >> 32)) * Integer(4294967296ul) +
           Integer(static_cast<unsigned long>(x & 0xffffffffu));
    }
    mpz_fdiv_r_2exp(r.get_mpz_t(), r.get_mpz_t(), bits);
    if (r < n) return r;
  }
}

}  // namespace rbmx
