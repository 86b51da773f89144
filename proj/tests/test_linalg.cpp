#include <gtest/gtest.h>

#include <random>

#include <nalie/linalg.hpp>

using namespace nalie;

namespace {

std::vector<std::vector<Elem>> random_matrix(std::size_t rows, std::size_t cols, const Field& F,
                                             std::mt19937_64& rng, unsigned sparsity = 2) {
    std::vector<std::vector<Elem>> m(cols, std::vector<Elem>(rows));
    for (auto& c : m)
        for (auto& e : c)
            if (rng() % sparsity == 0) e = Elem(static_cast<std::uint32_t>(rng() % F.order()));
    return m;
}

}  // namespace

TEST(Linalg, PackedAndPlainPoliciesAgree) {
    const Field& F = Field::gf(1);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        std::size_t rows = 1 + rng() % 90, cols = 1 + rng() % 90;
        auto m = random_matrix(rows, cols, F, rng, 1 + rng() % 4);
        Gf2Ops a(rows);
        GfqOps b(F, rows);
        std::vector<Gf2Ops::Vec> ca;
        std::vector<GfqOps::Vec> cb;
        for (const auto& c : m) {
            ca.push_back(from_elems(a, c));
            cb.push_back(from_elems(b, c));
        }
        EXPECT_EQ(rank_of(a, ca), rank_of(b, cb));
        Gf2Ops ta(cols);
        GfqOps tb(F, cols);
        EXPECT_EQ(kernel_of(a, ta, ca).size(), kernel_of(b, tb, cb).size());
    }
}

TEST(Linalg, KernelVectorsAnnihilate) {
    std::mt19937_64 rng(2);
    for (unsigned k : {1u, 2u, 3u, 4u}) {
        const Field& F = Field::gf(k);
        for (int t = 0; t < 20; ++t) {
            std::size_t rows = 1 + rng() % 20, cols = 1 + rng() % 20;
            auto m = random_matrix(rows, cols, F, rng);
            with_ops(F, rows, [&](auto ops) {
                using Ops = decltype(ops);
                DenseMat<Ops> M(ops);
                for (const auto& c : m) M.cols.push_back(from_elems(ops, c));
                auto ker = kernel_of(M);
                EXPECT_EQ(ker.size() + rank_of(ops, M.cols), cols);
                for (const auto& v : ker) EXPECT_TRUE(ops.is_zero(M.apply(v)));
                return 0;
            });
        }
    }
}

TEST(Linalg, TransposeAndProduct) {
    std::mt19937_64 rng(3);
    const Field& F = Field::gf(3);
    for (int t = 0; t < 10; ++t) {
        std::size_t n = 1 + rng() % 12;
        GfqOps ops(F, n);
        DenseMat<GfqOps> A(ops), B(ops);
        for (const auto& c : random_matrix(n, n, F, rng)) A.cols.push_back(from_elems(ops, c));
        for (const auto& c : random_matrix(n, n, F, rng)) B.cols.push_back(from_elems(ops, c));
        auto lhs = (A * B).transpose();
        auto rhs = B.transpose() * A.transpose();
        EXPECT_EQ(lhs.cols, rhs.cols);
        auto w = from_elems(ops, random_matrix(n, 1, F, rng)[0]);
        EXPECT_EQ(A.apply_transpose(w), A.transpose().apply(w));
    }
}

TEST(Linalg, SolveThroughHistory) {
    std::mt19937_64 rng(4);
    const Field& F = Field::gf(2);
    GfqOps ops(F, 8), tops(F, 5);
    auto m = random_matrix(8, 5, F, rng);
    TrackedEchelon<GfqOps> te(ops, tops);
    for (std::size_t j = 0; j < 5; ++j) te.insert(from_elems(ops, m[j]), tops.unit(j));
    std::vector<Elem> x{Elem(1), Elem(0), Elem(3), Elem(2), Elem(1)};
    auto b = ops.zero();
    for (std::size_t j = 0; j < 5; ++j) ops.axpy(b, x[j], from_elems(ops, m[j]));
    auto sol = te.express(b);
    ASSERT_TRUE(sol.has_value());
    auto chk = ops.zero();
    for (std::size_t j = 0; j < 5; ++j) ops.axpy(chk, tops.get(*sol, j), from_elems(ops, m[j]));
    EXPECT_EQ(chk, b);
}

TEST(Linalg, SparseEchelonMatchesDense) {
    std::mt19937_64 rng(5);
    for (unsigned k : {1u, 2u}) {
        const Field& F = Field::gf(k);
        for (int t = 0; t < 20; ++t) {
            std::size_t n = 1 + rng() % 40;
            SparseEchelon se(F, n);
            GfqOps ops(F, n);
            Echelon<GfqOps> de(ops);
            for (int v = 0; v < 30; ++v) {
                SparseVec s;
                for (std::uint32_t i = 0; i < n; ++i)
                    if (rng() % 5 == 0) s.emplace_back(i, Elem(static_cast<std::uint32_t>(1 + rng() % (F.order() - 1))));
                EXPECT_EQ(se.insert(s), de.insert(from_elems(ops, [&] {
                              std::vector<Elem> e(n);
                              for (auto [i, c] : s) e[i] = c;
                              return e;
                          }())));
            }
            EXPECT_EQ(se.rank(), de.rank());
            auto basis = se.reduced_basis();
            auto dense = de.sorted_rows();
            ASSERT_EQ(basis.size(), dense.size());
            for (std::size_t r = 0; r < basis.size(); ++r)
                for (std::uint32_t i = 0; i < n; ++i) EXPECT_EQ(sparse_get(basis[r], i), ops.get(dense[r], i));
        }
    }
}

TEST(Linalg, SpinIsInvariant) {
    std::mt19937_64 rng(6);
    Gf2Ops ops(30);
    DenseMat<Gf2Ops> A(ops);
    // Block upper triangular: the first 10 coordinates span an invariant subspace.
    for (std::size_t j = 0; j < 30; ++j) {
        auto c = ops.zero();
        for (std::size_t i = 0; i < 30; ++i)
            if ((j >= 10 || i < 10) && rng() % 2) ops.set(c, i, kOne);
        A.cols.push_back(c);
    }
    auto S = spin<Gf2Ops>({&A}, {ops.unit(0)}, ops);
    for (const auto& r : S.rows()) {
        EXPECT_TRUE(S.contains(A.apply(r)));
        for (std::size_t i = 10; i < 30; ++i) EXPECT_TRUE(ops.get(r, i).is_zero());
    }
}

TEST(Linalg, ProjectivePointCount) {
    for (unsigned k : {1u, 2u, 3u}) {
        const Field& F = Field::gf(k);
        for (std::size_t d = 1; d <= 4; ++d) {
            GfqOps ops(F, d);
            std::vector<GfqOps::Vec> basis;
            for (std::size_t i = 0; i < d; ++i) basis.push_back(ops.unit(i));
            std::size_t count = 0;
            Echelon<GfqOps> seen(ops);
            bool all = for_each_projective_point(ops, basis, [&](const GfqOps::Vec&) { return ++count, true; });
            EXPECT_TRUE(all);
            std::size_t q = F.order(), want = 0, p = 1;
            for (std::size_t i = 0; i < d; ++i) want += p, p *= q;
            EXPECT_EQ(count, want);
        }
    }
}
