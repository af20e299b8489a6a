#include "srs/combinatorics.hpp"

#include <cmath>
#include <limits>

#include "srs/error.hpp"

namespace srs {

namespace mp = boost::multiprecision;

BigInteger binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    // Partial products r_i = C(n-k+i, i) are integers, so each division is exact.
    BigInteger r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

BigRational harmonic(std::uint64_t n) {
    if (n == 0) throw InvalidArgument("harmonic: n must be >= 1");
    // Accumulate over a common denominator and reduce once.
    BigInteger num = 0;
    BigInteger den = 1;
    for (std::uint64_t i = 1; i <= n; ++i) {
        num = num * i + den;
        den *= i;
    }
    return make_rational(num, den);
}

BigInteger integer_pow(const BigInteger& base, std::uint64_t e) {
    BigInteger result = 1;
    BigInteger b = base;
    while (e != 0) {
        if (e & 1u) result *= b;
        e >>= 1;
        if (e != 0) b *= b;
    }
    return result;
}

BigRational rational_pow(const BigRational& base, std::uint64_t e) {
    // Powers of a reduced fraction stay reduced.
    return make_rational(integer_pow(mp::numerator(base), e),
                         integer_pow(mp::denominator(base), e));
}

BigRational make_rational(const BigInteger& num, const BigInteger& den) {
    if (den == 0) throw InvalidArgument("rational with zero denominator");
    return BigRational(num, den);
}

double to_double(const BigRational& q) {
    BigInteger a = mp::abs(mp::numerator(q));
    const BigInteger& b = mp::denominator(q);
    if (a == 0) return 0.0;
    const bool negative = mp::numerator(q) < 0;

    // Scale so the integer quotient carries 55..57 significant bits.
    const long shift = 56 - (static_cast<long>(mp::msb(a)) - static_cast<long>(mp::msb(b)));
    BigInteger quotient;
    BigInteger remainder;
    if (shift >= 0) {
        BigInteger scaled = a << static_cast<unsigned>(shift);
        mp::divide_qr(scaled, b, quotient, remainder);
    } else {
        BigInteger scaled_den = b << static_cast<unsigned>(-shift);
        mp::divide_qr(a, scaled_den, quotient, remainder);
    }
    auto qbits = quotient.convert_to<std::uint64_t>();
    const bool sticky = remainder != 0;

    const int width = 64 - __builtin_clzll(qbits);
    const int drop = width - 53;
    std::uint64_t mantissa = qbits >> drop;
    const std::uint64_t dropped = qbits & ((std::uint64_t{1} << drop) - 1);
    const std::uint64_t half = std::uint64_t{1} << (drop - 1);
    if (dropped > half || (dropped == half && (sticky || (mantissa & 1u)))) ++mantissa;

    double v = std::ldexp(static_cast<double>(mantissa), drop - static_cast<int>(shift));
    return negative ? -v : v;
}

RealApprox to_real(const BigRational& q) {
    const double v = to_double(q);
    // Half an ulp from correct rounding.
    const double ulp = std::nextafter(std::abs(v), std::numeric_limits<double>::infinity()) -
                       std::abs(v);
    return RealApprox{v, ulp / 2};
}

std::string to_string(const BigRational& q) {
    return mp::numerator(q).str() + "/" + mp::denominator(q).str();
}

std::string to_string(const BigInteger& z) { return z.str(); }

double log_binomial(double n, double k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

}  // namespace srs
