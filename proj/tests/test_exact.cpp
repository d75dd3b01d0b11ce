#include <doctest.h>

#include "stnet/exact.hpp"

using namespace stnet;

TEST_CASE("factorials and binomials") {
    CHECK(factorial(0) == 1);
    CHECK(factorial(1) == 1);
    CHECK(factorial(20) == BigInt("2432902008176640000"));
    CHECK(factorial(30) == BigInt("265252859812191058636308480000000"));
    CHECK_THROWS_AS(factorial(-1), std::domain_error);
    CHECK(binomial(10, 3) == 120);
    CHECK(binomial(5, 0) == 1);
    CHECK(binomial(3, 5) == 0);
    CHECK(binomial(4, -1) == 0);
    for (long n = 0; n < 25; ++n)
        for (long k = 0; k <= n; ++k) CHECK(binomial(n, k) * factorial(k) * factorial(n - k) == factorial(n));
}

TEST_CASE("parity and rational formatting") {
    CHECK(parity_sign(0) == 1);
    CHECK(parity_sign(3) == -1);
    CHECK(parity_sign(-3) == -1);
    CHECK(parity_sign(-4) == 1);
    CHECK(to_string(BigRational(6, 4)) == "3/2");
    CHECK(to_string(BigRational(-4, 2)) == "-2");
    CHECK(to_double(BigRational(1, 4)) == doctest::Approx(0.25));
}

TEST_CASE("square-free split") {
    auto [s, f] = square_free_split(BigInt(72));
    CHECK(s == 6);
    CHECK(f == 2);
    auto [s2, f2] = square_free_split(BigInt(1));
    CHECK(s2 == 1);
    CHECK(f2 == 1);
    auto [s3, f3] = square_free_split(BigInt(97) * 97 * 3);
    CHECK(s3 == 97);
    CHECK(f3 == 3);
}

TEST_CASE("surds stay exact") {
    Surd a = Surd::signed_sqrt(-1, BigRational(1, 8));
    CHECK(a.sign() == -1);
    CHECK(a.square() == BigRational(1, 8));
    CHECK(a.radicand() == 2);
    CHECK(a.coefficient() == BigRational(-1, 4));
    CHECK(a.to_string() == "(-1/4)·√(2)");
    CHECK((a * a).is_rational());
    CHECK((a * a).coefficient() == BigRational(1, 8));
    CHECK((a / a).coefficient() == 1);
    CHECK(Surd::signed_sqrt(1, BigRational(9, 4)).to_string() == "3/2");
    CHECK(Surd::signed_sqrt(1, 0).is_zero());
    CHECK((-a).sign() == 1);
    CHECK(a.to_double() == doctest::Approx(-0.35355339059327373));
    Surd b = Surd::signed_sqrt(1, 6) * Surd::signed_sqrt(1, 10);
    CHECK(b.coefficient() == 2);
    CHECK(b.radicand() == 15);
}

TEST_CASE("exact rank") {
    RationalMatrix m = {{4, 2, -2}, {2, 4, 2}, {-2, 2, 4}};
    CHECK(exact_rank(m) == 2);
    RationalMatrix id = {{1, 0}, {0, 1}};
    CHECK(exact_rank(id) == 2);
    CHECK(matmul(id, m.size() == 3 ? RationalMatrix{{1, 2}, {3, 4}} : id)[1][0] == 3);
}
