#include "stnet/exact.hpp"

#include <cmath>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

namespace stnet {

namespace {

struct FactorialCache {
    std::shared_mutex mu;
    std::deque<BigInt> values{BigInt(1)};
};

FactorialCache& cache() {
    static FactorialCache c;
    return c;
}

}  // namespace

const BigInt& factorial(long n) {
    if (n < 0) throw std::domain_error("factorial of negative argument");
    auto& c = cache();
    {
        std::shared_lock lock(c.mu);
        if (static_cast<std::size_t>(n) < c.values.size()) return c.values[n];
    }
    std::unique_lock lock(c.mu);
    while (c.values.size() <= static_cast<std::size_t>(n)) {
        BigInt next = c.values.back() * static_cast<unsigned long>(c.values.size());
        c.values.push_back(std::move(next));
    }
    return c.values[n];
}

BigInt binomial(long n, long k) {
    if (n < 0 || k < 0 || k > n) return 0;
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

std::string to_string(const BigRational& raw) {
    BigRational q = raw;
    q.canonicalize();
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double to_double(const BigRational& q) { return q.get_d(); }

std::pair<BigInt, BigInt> square_free_split(const BigInt& n) {
    if (n <= 0) throw std::domain_error("square_free_split needs a positive integer");
    BigInt rest = n, s = 1, f = 1;
    constexpr unsigned long kBound = 100000;
    for (unsigned long p = 2; p <= kBound && rest > 1; p += (p == 2 ? 1 : 2)) {
        if (BigInt(p) * p > rest) break;
        unsigned e = 0;
        while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
            rest /= p;
            ++e;
        }
        for (unsigned i = 0; i < e / 2; ++i) s *= p;
        if (e % 2) f *= p;
    }
    if (rest > 1) {
        if (mpz_perfect_square_p(rest.get_mpz_t())) {
            BigInt root;
            mpz_sqrt(root.get_mpz_t(), rest.get_mpz_t());
            s *= root;
        } else {
            f *= rest;
        }
    }
    return {s, f};
}

Surd::Surd(const BigRational& c, const BigInt& r) : c_(c), r_(r) {
    if (r_ <= 0) throw std::domain_error("Surd radicand must be positive");
    auto [s, f] = square_free_split(r_);
    c_ *= BigRational(s);
    c_.canonicalize();
    r_ = c_ == 0 ? BigInt(1) : f;
}

Surd Surd::signed_sqrt(int sign, const BigRational& square) {
    if (square < 0) throw std::domain_error("signed_sqrt of negative value");
    if (square == 0 || sign == 0) return Surd();
    // sqrt(p/q) = sqrt(p*q)/q
    BigInt pq = square.get_num() * square.get_den();
    Surd out(BigRational(1, 1) / BigRational(square.get_den()), pq);
    if (sign < 0) out.c_ = -out.c_;
    return out;
}

double Surd::to_double() const { return c_.get_d() * std::sqrt(r_.get_d()); }

std::string Surd::to_string() const {
    if (is_rational()) return stnet::to_string(c_);
    return "(" + stnet::to_string(c_) + ")·√(" + r_.get_str() + ")";
}

Surd Surd::operator*(const Surd& o) const {
    if (is_zero() || o.is_zero()) return Surd();
    BigInt g;
    mpz_gcd(g.get_mpz_t(), r_.get_mpz_t(), o.r_.get_mpz_t());
    BigRational c = c_ * o.c_ * BigRational(g);
    BigInt r = (r_ / g) * (o.r_ / g);
    return Surd(c, r);
}

Surd Surd::operator/(const Surd& o) const {
    if (o.is_zero()) throw std::domain_error("Surd division by zero");
    // 1/(c sqrt r) = sqrt(r) / (c r)
    Surd inv(BigRational(1) / (o.c_ * BigRational(o.r_)), o.r_);
    return *this * inv;
}

bool Surd::operator==(const Surd& o) const {
    if (is_zero() || o.is_zero()) return is_zero() && o.is_zero();
    return c_ == o.c_ && r_ == o.r_;
}

RationalMatrix matmul(const RationalMatrix& a, const RationalMatrix& b) {
    std::size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), l = b.size();
    RationalMatrix c(n, std::vector<BigRational>(m, BigRational(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < l; ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

std::size_t exact_rank(RationalMatrix m) {
    std::size_t rank = 0;
    std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t piv = rank;
        while (piv < rows && m[piv][col] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[rank]);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank || m[r][col] == 0) continue;
            BigRational f = m[r][col] / m[rank][col];
            for (std::size_t c = col; c < cols; ++c) m[r][c] -= f * m[rank][c];
        }
        ++rank;
    }
    return rank;
}

}  // namespace stnet
