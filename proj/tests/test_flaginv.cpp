#include <gtest/gtest.h>

#include <random>

#include <nalie/flaginv.hpp>

using namespace nalie;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<unsigned>> rows) {
    Matrix m;
    for (auto r : rows) {
        std::vector<Elem> row;
        for (auto x : r) row.push_back(Elem(x));
        m.push_back(row);
    }
    return m;
}

Matrix congruent(const Field& F, const Matrix& b, const Matrix& P) {
    std::size_t n = b.size();
    Matrix r(n, std::vector<Elem>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Elem s;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t c = 0; c < n; ++c) s += F.mul(P[a][i], F.mul(b[a][c], P[c][j]));
            r[i][j] = s;
        }
    return r;
}

// Random invertible P with P e_j in V_{h_j}.
Matrix random_flag_map(const Field& F, const std::vector<unsigned>& h, std::mt19937_64& rng) {
    std::size_t n = h.size();
    while (true) {
        Matrix P(n, std::vector<Elem>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (h[i] <= h[j]) P[i][j] = Elem(static_cast<std::uint32_t>(rng() % F.order()));
        GfqOps ops(F, n);
        std::vector<Vector> cols;
        for (std::size_t j = 0; j < n; ++j) {
            Vector c(n);
            for (std::size_t i = 0; i < n; ++i) c[i] = P[i][j];
            cols.push_back(c);
        }
        if (rank_of(ops, cols) == n) return P;
    }
}

Matrix random_symmetric(const Field& F, std::size_t n, std::mt19937_64& rng) {
    while (true) {
        Matrix b(n, std::vector<Elem>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                b[i][j] = b[j][i] = Elem(static_cast<std::uint32_t>(rng() % F.order()));
        GfqOps ops(F, n);
        if (rank_of(ops, std::vector<Vector>(b.begin(), b.end())) == n) return b;
    }
}

}  // namespace

TEST(FlagInv, ThreeDimMixedHeights) {
    const Field& F = Field::gf(1);
    Triple T = make_triple(F, mat({{1, 0, 1}, {0, 0, 1}, {1, 1, 0}}), {1, 2, 3});
    GfqOps ops(F, 3);
    Subspace V1p = T.perp(T.level(1), Subspace::whole(F, 3));
    EXPECT_EQ(V1p, Subspace::span(F, 3, {ops.unit(1), Vector{kOne, kZero, kOne}}));
    EXPECT_EQ(T.isotropic(Subspace::whole(F, 3)), Subspace::span(F, 3, {ops.unit(1), ops.unit(2)}));

    InvariantTable want{{{1, 1}, {1, 1}}, {{2, 3}, {1, 0}}, {{3, 2}, {1, 1}}};
    EXPECT_EQ(invariants(T), want);

    CanonicalResult res = canonicalize(T);
    EXPECT_EQ(res.canonical.matrix, mat({{0, 1, 0}, {1, 1, 0}, {0, 0, 1}}));
    EXPECT_EQ(res.canonical.heights, (std::vector<std::size_t>{2, 3, 1}));
    EXPECT_FALSE(res.alternating);
    EXPECT_EQ(congruent(F, T.b, res.change), res.canonical.matrix);

    Triple C = make_triple(F, res.canonical.matrix, {2, 3, 1});
    EXPECT_TRUE(equivalent(T, C));
}

TEST(FlagInv, IdentityFormTwoFlags) {
    const Field& F = Field::gf(1);
    Matrix b = mat({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}});
    // e_1 spans V_4 / V_3; literal V_1 = V_2 = V_3.
    Triple lit = make_triple(F, b, {4, 1, 1, 1});
    InvariantTable want{{{1, 1}, {3, 1}}, {{4, 4}, {1, 1}}};
    EXPECT_EQ(invariants(lit), want);
    auto r1 = canonicalize(lit);
    EXPECT_EQ(r1.canonical.matrix, mat({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}));
    EXPECT_EQ(r1.canonical.heights, (std::vector<std::size_t>{1, 1, 1, 4}));
    // V_1 = V_2 = 0, V_3 of dimension 3.
    Triple shifted = make_triple(F, b, {4, 3, 3, 3});
    auto r2 = canonicalize(shifted);
    EXPECT_EQ(r2.canonical.matrix, r1.canonical.matrix);
    EXPECT_EQ(r2.canonical.heights, (std::vector<std::size_t>{3, 3, 3, 4}));
}

TEST(FlagInv, SmallTables) {
    const Field& F = Field::gf(1);
    Triple I = make_triple(F, mat({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), {1, 1, 1});
    EXPECT_EQ(invariants(I), (InvariantTable{{{1, 1}, {3, 1}}}));
    Triple M0 = make_triple(F, mat({{0, 1}, {1, 0}}), {1, 1});
    EXPECT_EQ(invariants(M0), (InvariantTable{{{1, 1}, {2, 0}}}));
    auto r = canonicalize(M0);
    EXPECT_TRUE(r.alternating);
    EXPECT_EQ(r.canonical.matrix, M0.b);
    EXPECT_FALSE(equivalent(make_triple(F, mat({{1, 0}, {0, 1}}), {1, 1}), M0));

    auto c = canonical_from_invariants(InvariantTable{{{1, 1}, {2, 0}}});
    EXPECT_EQ(c.matrix, M0.b);
    EXPECT_EQ(c.heights, (std::vector<std::size_t>{1, 1}));
    EXPECT_THROW(canonical_from_invariants(InvariantTable{{{1, 2}, {1, 0}}}), ValidationError);
}

TEST(FlagInv, Validation) {
    const Field& F = Field::gf(1);
    EXPECT_THROW(make_triple(F, mat({{1, 1}, {0, 1}}), {1, 1}), ValidationError);
    EXPECT_THROW(make_triple(F, mat({{1, 1}, {1, 1}}), {1, 1}), PreconditionError);
    EXPECT_THROW(make_triple(F, mat({{1, 0}, {0, 1}}), {1}), ValidationError);
}

// Two M1 pairs in the same cell are congruent, via a flag-preserving map, to M0 + M1.
TEST(FlagInv, TwoM1PairsCollapse) {
    const Field& F = Field::gf(1);
    Matrix b = mat({{0, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 1}});
    std::vector<unsigned> h{1, 2, 1, 2};
    // Columns: u1 + u2, v1, u2, v1 + v2 + u1 + u2.
    Matrix P = mat({{1, 0, 0, 1}, {0, 1, 0, 1}, {1, 0, 1, 1}, {0, 0, 0, 1}});
    Matrix c = congruent(F, b, P);
    // u1' and v2'' pair to M0, u2 with v1 ... check the result decomposes.
    Triple A = make_triple(F, b, h);
    Triple B = make_triple(F, c, h);
    EXPECT_EQ(invariants(A), invariants(B));
    auto r = canonicalize(A);
    EXPECT_EQ(r.canonical.matrix, mat({{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 1}}));
    EXPECT_EQ(r.canonical.heights, (std::vector<std::size_t>{1, 2, 1, 2}));
}

TEST(FlagInv, RandomTriplesRoundTrip) {
    std::mt19937_64 rng(42);
    for (unsigned k : {1u, 2u, 3u}) {
        const Field& F = Field::gf(k);
        for (int t = 0; t < 60; ++t) {
            std::size_t n = 1 + rng() % 6;
            std::vector<unsigned> h(n);
            for (auto& x : h) x = 1 + static_cast<unsigned>(rng() % 4);
            Triple T = make_triple(F, random_symmetric(F, n, rng), h);
            InvariantTable tab = invariants(T);
            auto res = canonicalize(T);
            auto expect = canonical_from_invariants(tab);
            EXPECT_EQ(res.canonical.matrix, expect.matrix);
            EXPECT_EQ(res.canonical.heights, expect.heights);
            EXPECT_EQ(congruent(F, T.b, res.change), res.canonical.matrix);
            std::vector<unsigned> hc(res.canonical.heights.begin(), res.canonical.heights.end());
            EXPECT_EQ(invariants(make_triple(F, res.canonical.matrix, hc)), tab);
            for (int s = 0; s < 3; ++s) {
                Matrix P = random_flag_map(F, h, rng);
                EXPECT_EQ(invariants(make_triple(F, congruent(F, T.b, P), h)), tab);
            }
        }
    }
}
