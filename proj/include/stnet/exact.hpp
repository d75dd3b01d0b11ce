#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace stnet {

using BigInt = mpz_class;
using BigRational = mpq_class;

// Memoized n!. Throws std::domain_error for n < 0.
const BigInt& factorial(long n);

// C(n,k); zero outside 0 <= k <= n.
BigInt binomial(long n, long k);

// n/d in lowest terms.
inline BigRational ratio(const BigInt& n, const BigInt& d) {
    BigRational q(n, d);
    q.canonicalize();
    return q;
}

// Sign of (-1)^n for any integer n.
inline int parity_sign(long n) { return (n % 2 == 0) ? 1 : -1; }

std::string to_string(const BigRational& q);
double to_double(const BigRational& q);

// Exact real number c * sqrt(r) with r a positive square-free integer.
class Surd {
public:
    Surd() : c_(0), r_(1) {}
    Surd(const BigRational& c) : c_(c), r_(1) {}
    Surd(const BigRational& c, const BigInt& r);

    // sign * sqrt(square); square must be non-negative.
    static Surd signed_sqrt(int sign, const BigRational& square);

    const BigRational& coefficient() const { return c_; }
    const BigInt& radicand() const { return r_; }

    bool is_zero() const { return c_ == 0; }
    bool is_rational() const { return r_ == 1 || c_ == 0; }
    int sign() const { return sgn(c_); }
    BigRational square() const { return c_ * c_ * BigRational(r_); }
    double to_double() const;
    // "p/q" when rational, otherwise "(p/q)·√(r)".
    std::string to_string() const;

    Surd operator*(const Surd& o) const;
    Surd operator/(const Surd& o) const;
    Surd operator-() const { return Surd(-c_, r_); }
    bool operator==(const Surd& o) const;

private:
    BigRational c_;
    BigInt r_;
};

// Writes n = s^2 * f with f square-free, returning {s, f}. n > 0.
std::pair<BigInt, BigInt> square_free_split(const BigInt& n);

using RationalMatrix = std::vector<std::vector<BigRational>>;

RationalMatrix matmul(const RationalMatrix& a, const RationalMatrix& b);
std::size_t exact_rank(RationalMatrix m);

}  // namespace stnet
