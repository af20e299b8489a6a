#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <boost/multiprecision/gmp.hpp>

namespace srs {

// GMP-backed exact numbers. mpq_rational keeps every value canonical:
// positive denominator, coprime parts, zero stored as 0/1.
using BigInteger = boost::multiprecision::mpz_int;
using BigRational = boost::multiprecision::mpq_rational;

/// A double together with an optional bound on its absolute error.
struct RealApprox {
    double value = 0.0;
    std::optional<double> error_bound;
};

/// C(n, k), exact. Zero when k > n.
BigInteger binomial(std::uint64_t n, std::uint64_t k);

/// H_n = 1 + 1/2 + ... + 1/n. Throws InvalidArgument for n = 0.
BigRational harmonic(std::uint64_t n);

/// base^e with 0^0 = 1.
BigRational rational_pow(const BigRational& base, std::uint64_t e);
BigInteger integer_pow(const BigInteger& base, std::uint64_t e);

/// num/den in canonical form. Throws InvalidArgument when den = 0.
BigRational make_rational(const BigInteger& num, const BigInteger& den);

/// Round-to-nearest-even conversion. Overflows to +-inf; results in the
/// subnormal range may be off by one ulp.
double to_double(const BigRational& q);
RealApprox to_real(const BigRational& q);

/// "num/den" (always with the slash, "0/1" for zero).
std::string to_string(const BigRational& q);
std::string to_string(const BigInteger& z);

/// log C(n, k) via lgamma. For display estimates at large n only; never feed
/// it into a probability mass computation.
double log_binomial(double n, double k);

}  // namespace srs
