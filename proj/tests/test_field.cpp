#include <gtest/gtest.h>

#include <nalie/field.hpp>

using namespace nalie;

namespace {

// Carry-less remainder, used to test irreducibility by trial division.
std::uint32_t poly_mod(std::uint32_t a, std::uint32_t b) {
    int db = 31 - __builtin_clz(b);
    while (a && 31 - __builtin_clz(a) >= db) a ^= b << ((31 - __builtin_clz(a)) - db);
    return a;
}

bool irreducible(std::uint32_t p, unsigned k) {
    for (unsigned d = 1; d <= k / 2; ++d)
        for (std::uint32_t q = 1u << d; q < (1u << (d + 1)); ++q)
            if (poly_mod(p, q) == 0) return false;
    return true;
}

}  // namespace

TEST(Field, ModulusIsLeastIrreducible) {
    for (unsigned k = 2; k <= 16; ++k) {
        std::uint32_t p = Field::modulus_for(k);
        EXPECT_TRUE(irreducible(p, k)) << k;
        for (std::uint32_t s = 1u << k; s < p; ++s) EXPECT_FALSE(irreducible(s, k)) << k << " " << s;
    }
}

TEST(Field, TablesAgreeWithShiftAndAdd) {
    for (unsigned k = 1; k <= 8; ++k) {
        const Field& F = Field::gf(k);
        for (std::uint32_t a = 0; a < F.order(); ++a)
            for (std::uint32_t b = 0; b < F.order(); ++b)
                ASSERT_EQ(F.mul(Elem(a), Elem(b)).v, F.slow_mul(a, b)) << k;
    }
}

TEST(Field, InverseAndSqrt) {
    for (unsigned k : {1u, 2u, 3u, 5u, 8u, 11u, 16u}) {
        const Field& F = Field::gf(k);
        for (std::uint32_t a = 1; a < F.order(); a += (k > 8 ? 97 : 1)) {
            Elem x(a);
            EXPECT_EQ(F.mul(x, F.inv(x)), kOne);
            EXPECT_EQ(F.sqr(F.sqrt(x)), x);
            EXPECT_EQ(F.pow(x, F.order() - 1), kOne);
        }
        EXPECT_THROW(F.inv(kZero), PreconditionError);
    }
}

TEST(Field, Gf4Generator) {
    const Field& F = Field::gf(2);
    Elem g = F.from_hex("2");
    EXPECT_EQ(F.mul(g, g), g + kOne);
    EXPECT_EQ(F.sqrt(g), Elem(3));
    EXPECT_EQ(F.generator(), g);
}

TEST(Field, HexRoundTrip) {
    const Field& F = Field::gf(16);
    for (std::uint32_t a : {0u, 1u, 0xabcdu, 0xffffu}) EXPECT_EQ(F.from_hex(F.to_hex(Elem(a))), Elem(a));
    EXPECT_EQ(F.to_hex(Elem(0xabcd)), "abcd");
    EXPECT_THROW(Field::gf(2).from_hex("4"), ValidationError);
    EXPECT_THROW(F.from_hex("zz"), ValidationError);
    EXPECT_THROW(Field::gf(17), ValidationError);
}
