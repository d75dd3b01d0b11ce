#include <doctest.h>

#include "oracle_helpers.hpp"
#include "stnet/bargmann.hpp"
#include "stnet/st_basis.hpp"

using namespace stnet;
using testing_support::all_spins;
using testing_support::as_poly;

TEST_CASE("spin parsing") {
    CHECK(parse_spin("1/2") == 1);
    CHECK(parse_spin("3") == 6);
    CHECK(parse_spin("0") == 0);
    CHECK_THROWS(parse_spin("1/3"));
    CHECK_THROWS(parse_spin("x"));
    CHECK_THROWS(parse_spin(""));
    CHECK(format_spin(3) == "3/2");
    CHECK(format_spin(4) == "2");
}

TEST_CASE("label maps") {
    Spins4 half{1, 1, 1, 1};
    KMatrix k = k_from_st({half, 0, 2});
    CHECK(k(0, 1) == 1);
    CHECK(k(2, 3) == 1);
    CHECK(k(0, 2) == 0);
    CHECK(k(0, 3) == 0);
    CHECK(st_from_k(k_from_st({half, 2, 2})) == STLabel{half, 2, 2});
    CHECK_THROWS(st_from_k(KMatrix(3)));
    for (auto& j : all_spins(3))
        for (auto [S, T] : admissible_st_range(j)) {
            KMatrix kk = k_from_st({j, S, T});
            CHECK(st_from_k(kk) == STLabel{j, S, T});
            auto tj = kk.twice_spins();
            for (int i = 0; i < 4; ++i) CHECK(tj[i] == j[i]);
        }
}

TEST_CASE("admissibility errors name the constraint") {
    Spins4 half{1, 1, 1, 1};
    CHECK_THROWS_WITH_AS(k_from_st({half, 4, 0}), doctest::Contains("k12"), AdmissibilityError);
    CHECK_THROWS_WITH_AS(k_from_st({half, 1, 1}), doctest::Contains("parity"), AdmissibilityError);
    CHECK_THROWS_WITH_AS(k_from_st({half, 0, 0}), doctest::Contains("U"), AdmissibilityError);
    CHECK_THROWS_AS(admissible_st_range({1, 1, 1, 0}), AdmissibilityError);
}

TEST_CASE("admissible range and dimension") {
    Spins4 half{1, 1, 1, 1};
    auto r = admissible_st_range(half);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == STPair{0, 2});
    CHECK(r[1] == STPair{2, 0});
    CHECK(r[2] == STPair{2, 2});
    CHECK(intertwiner_dimension(half) == 2);
    CHECK(intertwiner_dimension({2, 2, 2, 2}) == 3);
    CHECK(intertwiner_dimension({1, 1, 1, 3}) == 1);
    CHECK(intertwiner_dimension({0, 0, 1, 3}) == 0);
}

TEST_CASE("norms and R coefficients") {
    Spins4 half{1, 1, 1, 1};
    CHECK(norm_squared({half, 2, 2}) == 6);
    CHECK(norm_squared({half, 0, 2}) == 6);
    CHECK(norm_squared({{0, 0, 0, 0}, 0, 0}) == 1);
    CHECK(r_coeff(0, 0, 0, 0, 0) == 1);
    CHECK(r_coeff(0, 0, 2, 0, 1) == -1);
    CHECK(r_coeff(0, 0, 0, 2, 1) == 1);
    CHECK(r_coeff(0, 0, 2, 2, 1) == 1);
    CHECK(r_coeff(0, 0, 2, 2, 2) == -2);
    CHECK(r_coeff(0, 0, 1, 0, 1) == 0);
}

TEST_CASE("R coefficient sum rules") {
    for (int N = 0; N <= 4; ++N)
        for (int s = 0; s <= 6; ++s)
            for (int t = 0; t <= 6; ++t) {
                Spins4 j{6, 6 + s % 2, 6 + t % 2, 6 + (s + t) % 2};
                int sign_st = parity_sign(raw_k(j, s, t).k23);
                for (int S = s; S <= s + 2 * N; S += 2) {
                    BigInt sum = 0;
                    for (int T = t; T <= t + 2 * N; T += 2) sum += r_coeff(s, t, S, T, N);
                    CHECK(sum == (S == s ? 1 : 0));
                }
                for (int T = t; T <= t + 2 * N; T += 2) {
                    BigInt sum = 0;
                    for (int S = s; S <= s + 2 * N; S += 2)
                        sum += parity_sign(raw_k(j, S, T).k23) * r_coeff(s, t, S, T, N);
                    CHECK(sum == (T == t ? sign_st : 0));
                }
            }
}

TEST_CASE("Gram matrix for four spins one half") {
    GramMatrix g = gram_matrix({1, 1, 1, 1});
    RationalMatrix expect = {{4, 2, -2}, {2, 4, 2}, {-2, 2, 4}};
    CHECK(g.entries == expect);
    CHECK(exact_rank(g.entries) == 2);
}

TEST_CASE("Gram matches the Bargmann oracle for spins up to 3/2") {
    for (auto& j : all_spins(3)) {
        GramMatrix g = gram_matrix(j);
        for (std::size_t a = 0; a < g.labels.size(); ++a) {
            auto pa = st_state_poly({j, g.labels[a].first, g.labels[a].second});
            for (std::size_t b = a; b < g.labels.size(); ++b) {
                auto pb = st_state_poly({j, g.labels[b].first, g.labels[b].second});
                CHECK(bargmann_inner(pa, pb) == g.entries[a][b]);
            }
        }
        CHECK(exact_rank(g.entries) == static_cast<std::size_t>(intertwiner_dimension(j)));
    }
}

TEST_CASE("projector is idempotent with the right rank") {
    for (auto& j : all_spins(2)) {
        RationalMatrix p = projector_matrix(j);
        CHECK(matmul(p, p) == p);
        CHECK(exact_rank(p) == static_cast<std::size_t>(intertwiner_dimension(j)));
    }
}

TEST_CASE("fundamental relation vanishes as a polynomial and under the Gram") {
    int checked = 0;
    for (auto& j : all_spins(3)) {
        GramMatrix g = gram_matrix(j);
        for (auto [S, T] : admissible_st_range(j)) {
            STVector v = fundamental_relation_vector({j, S, T});
            SpinorPolynomial poly(4);
            bool fits = true;
            for (auto& [st, c] : v) {
                if (c == 0) continue;
                if (!is_admissible({j, st.first, st.second})) fits = false;
            }
            if (!fits) continue;
            poly = as_poly(j, v);
            CHECK(poly.is_zero());
            for (auto& lab : g.labels) {
                BigRational s = 0;
                for (auto& [st, c] : v)
                    if (c != 0) s += c * scalar_product_st({j, lab.first, lab.second}, {j, st.first, st.second});
                CHECK(s == 0);
            }
            ++checked;
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("power relations are Gram null vectors") {
    int checked = 0;
    for (auto& j : all_spins(3))
        for (int N = 1; N <= 2; ++N) {
            Spins4 js = j;
            bool ok = true;
            for (auto& x : js) ok &= (x -= N) >= 0;
            if (!ok) continue;
            GramMatrix g = gram_matrix(j);
            for (auto [s, t] : admissible_st_range(js)) {
                STVector v = plucker_null_vector(j, s, t, N);
                CHECK(as_poly(j, v).is_zero());
                for (auto& lab : g.labels) {
                    BigRational sum = 0;
                    for (auto& [st, c] : v)
                        sum += c * scalar_product_st({j, lab.first, lab.second}, {j, st.first, st.second});
                    CHECK(sum == 0);
                }
                ++checked;
            }
        }
    CHECK(checked == 66);
}

TEST_CASE("J1.J2 and J1.J3 agree with the differential operators") {
    for (auto& j : all_spins(3))
        for (auto [S, T] : admissible_st_range(j)) {
            STLabel l{j, S, T};
            auto f = st_state_poly(l);
            CHECK(as_poly(j, apply_j1j2(l)) == testing_support::casimir_pair(f, 0, 1));
            CHECK(as_poly(j, apply_j1j3(l)) == testing_support::casimir_pair(f, 0, 2));
        }
}
