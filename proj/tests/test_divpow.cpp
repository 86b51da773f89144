#include <gtest/gtest.h>

#include <random>

#include <nalie/divpow.hpp>

using namespace nalie;

namespace {

std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Exact factorial quotient (ls)!/((l!)^s s!) for small arguments.
std::uint64_t power_coefficient(std::uint64_t l, std::uint64_t s) {
    // Product of binomials C(jl, l) over j = 1..s divided by s!... computed as
    // prod_{j=1}^{s} C(jl - 1, l - 1), which is an integer identity.
    std::uint64_t r = 1;
    for (std::uint64_t j = 1; j <= s; ++j) r *= binom(j * l - 1, l - 1);
    return r;
}

DPoly random_poly(const RingPtr& R, std::mt19937_64& rng, bool in_ideal) {
    DPoly f(R);
    std::uniform_int_distribution<std::uint32_t> ce(0, R->field().order() - 1);
    for (Packed a = in_ideal ? 1 : 0; a < R->heights().dim(); ++a)
        if (rng() % 3 == 0) f.add_term(a, Elem(ce(rng)));
    return f;
}

}  // namespace

TEST(Heights, PackUnpack) {
    Heights h({2, 1, 3});
    EXPECT_EQ(h.total(), 6u);
    EXPECT_EQ(h.dim(), 64u);
    auto p = h.pack({3, 1, 5});
    EXPECT_EQ(h.unpack(p), (std::vector<unsigned>{3, 1, 5}));
    EXPECT_EQ(h.degree(p), 9u);
    EXPECT_EQ(h.delta(), 63u);
    EXPECT_THROW(h.pack({4, 0, 0}), ValidationError);
    EXPECT_THROW(Heights({10, 10, 5}), ValidationError);
    EXPECT_THROW(Heights({1, 0}), ValidationError);
}

TEST(DPoly, LucasAgainstFactorials) {
    auto R = DivPowRing::make({4}, 1);
    for (unsigned a = 0; a < 16; ++a)
        for (unsigned b = 0; b < 16; ++b) {
            DPoly p = DPoly::monomial(R, a) * DPoly::monomial(R, b);
            std::uint64_t c = binom(a + b, a) % 2;
            if (a + b >= 16) {
                EXPECT_TRUE(p.is_zero());
                EXPECT_EQ(c, 0u);
            } else {
                EXPECT_EQ(p.coeff(a + b).v, c) << a << " " << b;
                EXPECT_EQ(p.size(), c);
            }
        }
}

TEST(DPoly, Examples) {
    auto R = DivPowRing::make({2, 2}, 1);
    const Heights& h = R->heights();
    DPoly x1 = DPoly::variable(R, 0);
    DPoly p = x1 * x1;
    EXPECT_TRUE(p.is_zero());
    DPoly a = DPoly::monomial(R, h.pack({1, 0})), b = DPoly::monomial(R, h.pack({2, 0}));
    EXPECT_EQ(a * b, DPoly::monomial(R, h.pack({3, 0})));
    EXPECT_EQ(DPoly::monomial(R, h.pack({3, 1})).partial(0), DPoly::monomial(R, h.pack({2, 1})));
    EXPECT_TRUE(DPoly::monomial(R, h.pack({0, 1})).partial(0).is_zero());
}

TEST(DPoly, SquaresAreConstant) {
    std::mt19937_64 rng(7);
    for (unsigned k : {1u, 2u, 3u}) {
        auto R = DivPowRing::make({2, 1, 2}, k);
        for (int t = 0; t < 30; ++t) {
            DPoly f = random_poly(R, rng, false);
            Elem c = f.constant_term();
            EXPECT_EQ(f * f, DPoly::constant(R, R->field().sqr(c)));
        }
    }
}

TEST(DPoly, LeibnizRule) {
    std::mt19937_64 rng(11);
    auto R = DivPowRing::make({2, 3}, 2);
    for (int t = 0; t < 30; ++t) {
        DPoly f = random_poly(R, rng, false), g = random_poly(R, rng, false);
        for (unsigned i = 0; i < 2; ++i)
            EXPECT_EQ((f * g).partial(i), f.partial(i) * g + f * g.partial(i));
    }
}

TEST(DividedPower, SingleVariableCoefficients) {
    auto R = DivPowRing::make({4}, 1);
    for (unsigned l = 1; l < 16; ++l)
        for (unsigned s = 0; s * l < 16; ++s) {
            DPoly p = divided_power(DPoly::monomial(R, l), s);
            EXPECT_EQ(p.coeff(l * s).v, power_coefficient(l, s) % 2) << l << " " << s;
        }
}

TEST(DividedPower, Examples) {
    auto R = DivPowRing::make({2, 2}, 1);
    const Heights& h = R->heights();
    DPoly x1 = DPoly::variable(R, 0), x2 = DPoly::variable(R, 1);
    DPoly sq = divided_power(x1 + x2, 2);
    DPoly want = DPoly::monomial(R, h.pack({2, 0})) + DPoly::monomial(R, h.pack({1, 1})) +
                 DPoly::monomial(R, h.pack({0, 2}));
    EXPECT_EQ(sq, want);
    EXPECT_TRUE(divided_power(x1 * x2, 2).is_zero());
    EXPECT_THROW(divided_power(x1 + DPoly::one(R), 2), PreconditionError);
    EXPECT_THROW(divided_power(x1, 4), PreconditionError);
    EXPECT_EQ(divided_power(x1, 0), DPoly::one(R));
}

TEST(DividedPower, ProductAndCompositionRules) {
    std::mt19937_64 rng(3);
    auto R = DivPowRing::make({3, 2}, 2);
    const Heights& h = R->heights();
    for (int t = 0; t < 20; ++t) {
        // Linear terms in x_1 plus decomposable terms keep every power in range.
        DPoly f = random_poly(R, rng, true);
        DPoly g(R);
        for (auto [a, c] : f.terms())
            if (a == h.unit(0) || std::popcount(a) >= 2) g.add_term(a, c);
        f = g;
        for (unsigned a = 0; a <= 3; ++a)
            for (unsigned b = 0; a + b <= 3; ++b) {
                DPoly lhs = divided_power(f, a) * divided_power(f, b);
                DPoly rhs = divided_power(f, a + b);
                if (binom(a + b, a) % 2 == 0) rhs = DPoly(R);
                EXPECT_EQ(lhs, rhs);
            }
        for (unsigned a = 1; a <= 2; ++a)
            for (unsigned b = 0; b <= 3 && a * b <= 3; ++b) {
                DPoly lhs = divided_power(divided_power(f, a), b);
                DPoly rhs = divided_power(f, a * b);
                if (power_coefficient(a, b) % 2 == 0) rhs = DPoly(R);
                EXPECT_EQ(lhs, rhs);
            }
    }
}

TEST(PolyInverse, Examples) {
    auto R = DivPowRing::make({2}, 1);
    DPoly f = DPoly::one(R) + DPoly::variable(R, 0);
    DPoly g = poly_inverse(f);
    EXPECT_EQ(g, f);
    EXPECT_EQ(f * g, DPoly::one(R));
    EXPECT_THROW(poly_inverse(DPoly::variable(R, 0)), PreconditionError);

    std::mt19937_64 rng(5);
    auto S = DivPowRing::make({2, 2, 1}, 3);
    for (int t = 0; t < 20; ++t) {
        DPoly u = random_poly(S, rng, true) + DPoly::constant(S, Elem(1 + rng() % 7));
        EXPECT_EQ(u * poly_inverse(u), DPoly::one(S));
    }
}
