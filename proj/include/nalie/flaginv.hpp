#pragma once

/**
 * @file flaginv.hpp
 * @brief Flag-invariants and canonical forms of triples (V, b, flag).
 *
 * V = K^n carries a nondegenerate symmetric bilinear form b and an
 * increasing flag 0 = V_0 ⊆ V_1 ⊆ ... ⊆ V_t = V.  For 1 <= q, r <= t
 *
 *   Phi_qr   = (V_q ∩ V_{r-1}^⊥) / (V_q ∩ V_r^⊥ + V_{q-1} ∩ V_{r-1}^⊥),
 *   n_qr     = dim Phi_qr,
 *   n_qr^1   = n_qr - dim(image of V_q ∩ V_{r-1}^⊥ ∩ V^0),
 *
 * where V^0 = {v : b(v, v) = 0}.  Two triples are isomorphic exactly when
 * these tables agree.  A triple splits orthogonally into blocks
 *
 *   M0 = [[0,1],[1,0]],  M1 = [[0,1],[1,1]],  (1)
 *
 * compatible with the flag; `canonicalize` finds such a basis.
 */

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "error.hpp"
#include "field.hpp"
#include "linalg.hpp"

namespace nalie {

using Vector = std::vector<Elem>;
using Matrix = std::vector<std::vector<Elem>>;  ///< row-major

class Subspace {
public:
    Subspace(const Field& F, std::size_t n) : e_(GfqOps(F, n)) {}

    static Subspace span(const Field& F, std::size_t n, const std::vector<Vector>& vs) {
        Subspace s(F, n);
        for (const auto& v : vs) s.e_.insert(v);
        return s;
    }
    static Subspace whole(const Field& F, std::size_t n) {
        Subspace s(F, n);
        for (std::size_t i = 0; i < n; ++i) s.e_.insert(s.ops().unit(i));
        return s;
    }

    const GfqOps& ops() const { return e_.ops(); }
    std::size_t dim() const { return e_.rank(); }
    std::size_t ambient() const { return ops().n; }
    std::vector<Vector> basis() const { return e_.sorted_rows(); }
    bool contains(const Vector& v) const { return e_.contains(v); }
    bool contains(const Subspace& o) const {
        for (const auto& v : o.e_.rows())
            if (!contains(v)) return false;
        return true;
    }
    void insert(const Vector& v) { e_.insert(v); }

    friend Subspace operator+(const Subspace& a, const Subspace& b) {
        Subspace s = a;
        for (const auto& v : b.e_.rows()) s.e_.insert(v);
        return s;
    }

    friend bool operator==(const Subspace& a, const Subspace& b) {
        return a.dim() == b.dim() && a.contains(b);
    }

    Subspace intersect(const Subspace& o) const {
        const auto& A = e_.rows();
        const auto& B = o.e_.rows();
        GfqOps tops(*ops().F, A.size() + B.size());
        std::vector<Vector> cols(A);
        cols.insert(cols.end(), B.begin(), B.end());
        Subspace s(*ops().F, ambient());
        for (const auto& k : kernel_of(ops(), tops, cols)) {
            Vector v = ops().zero();
            for (std::size_t i = 0; i < A.size(); ++i) ops().axpy(v, k[i], A[i]);
            s.e_.insert(v);
        }
        return s;
    }

private:
    Echelon<GfqOps> e_;
};

/// Heights-style flag: V_q = span{e_i : h_i <= q}.
struct Flag {
    std::vector<Subspace> levels;  ///< V_1, ..., V_t

    std::size_t length() const { return levels.size(); }
};

struct Triple {
    std::size_t n = 0;
    const Field* F = nullptr;
    Matrix b;
    Flag flag;

    Elem form(const Vector& u, const Vector& v) const {
        Elem s;
        for (std::size_t i = 0; i < n; ++i) {
            if (u[i].is_zero()) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (!v[j].is_zero() && !b[i][j].is_zero()) s += F->mul(u[i], F->mul(b[i][j], v[j]));
        }
        return s;
    }

    /// l(v) = sum sqrt(b_ii) v_i; b(v, v) = l(v)^2.
    Elem root_norm(const Vector& v) const {
        Elem s;
        for (std::size_t i = 0; i < n; ++i) s += F->mul(F->sqrt(b[i][i]), v[i]);
        return s;
    }

    bool alternating() const {
        for (std::size_t i = 0; i < n; ++i)
            if (!b[i][i].is_zero()) return false;
        return true;
    }

    /// V_q with V_0 = 0 and V_q = V beyond the flag.
    Subspace level(std::size_t q) const {
        if (q == 0) return Subspace(*F, n);
        if (q >= flag.length()) return Subspace::whole(*F, n);
        return flag.levels[q - 1];
    }

    /// Smallest q with v in V_q.
    std::size_t height(const Vector& v) const {
        for (std::size_t q = 1; q <= flag.length(); ++q)
            if (level(q).contains(v)) return q;
        return flag.length();
    }

    /// Perpendicular of U inside W.
    Subspace perp(const Subspace& U, const Subspace& W) const {
        auto ub = U.basis();
        auto wb = W.basis();
        GfqOps row_ops(*F, ub.size());
        GfqOps tops(*F, wb.size());
        std::vector<Vector> cols;
        for (const auto& w : wb) {
            Vector c(ub.size());
            for (std::size_t i = 0; i < ub.size(); ++i) c[i] = form(ub[i], w);
            cols.push_back(c);
        }
        Subspace s(*F, n);
        if (ub.empty()) return W;
        for (const auto& k : kernel_of(row_ops, tops, cols)) {
            Vector v(n);
            GfqOps amb(*F, n);
            for (std::size_t i = 0; i < wb.size(); ++i) amb.axpy(v, k[i], wb[i]);
            s.insert(v);
        }
        return s;
    }

    /// Isotropic vectors of W.
    Subspace isotropic(const Subspace& W) const {
        auto wb = W.basis();
        GfqOps row_ops(*F, 1);
        GfqOps tops(*F, wb.size());
        std::vector<Vector> cols;
        for (const auto& w : wb) cols.push_back(Vector{root_norm(w)});
        Subspace s(*F, n);
        GfqOps amb(*F, n);
        for (const auto& k : kernel_of(row_ops, tops, cols)) {
            Vector v(n);
            for (std::size_t i = 0; i < wb.size(); ++i) amb.axpy(v, k[i], wb[i]);
            s.insert(v);
        }
        return s;
    }

    void validate() const {
        if (n == 0) throw ValidationError("triple needs n >= 1");
        if (b.size() != n) throw ValidationError("matrix has " + std::to_string(b.size()) + " rows, expected " + std::to_string(n));
        for (std::size_t i = 0; i < n; ++i) {
            if (b[i].size() != n)
                throw ValidationError("matrix row " + std::to_string(i + 1) + " has wrong length");
            for (std::size_t j = 0; j < n; ++j)
                if (!(b[i][j] == b[j][i]))
                    throw ValidationError("matrix is not symmetric at (" + std::to_string(i + 1) + "," +
                                          std::to_string(j + 1) + ")");
        }
        GfqOps ops(*F, n);
        std::vector<Vector> rows(b.begin(), b.end());
        if (rank_of(ops, rows) != n) throw PreconditionError("bilinear form is degenerate");
        if (flag.levels.empty()) throw ValidationError("flag is empty");
        for (std::size_t q = 1; q < flag.levels.size(); ++q)
            if (!flag.levels[q].contains(flag.levels[q - 1]))
                throw ValidationError("flag level " + std::to_string(q + 1) + " does not contain level " +
                                      std::to_string(q));
        if (flag.levels.back().dim() != n) throw ValidationError("last flag level is not the whole space");
    }
};

inline Flag flag_from_heights(const Field& F, const std::vector<unsigned>& h) {
    unsigned t = 0;
    for (auto x : h) {
        if (x < 1) throw ValidationError("flag heights must be >= 1");
        t = std::max(t, x);
    }
    Flag f;
    GfqOps ops(F, h.size());
    for (unsigned q = 1; q <= t; ++q) {
        Subspace s(F, h.size());
        for (std::size_t i = 0; i < h.size(); ++i)
            if (h[i] <= q) s.insert(ops.unit(i));
        f.levels.push_back(s);
    }
    return f;
}

inline Triple make_triple(const Field& F, const Matrix& b, const std::vector<unsigned>& heights) {
    Triple t{b.size(), &F, b, flag_from_heights(F, heights)};
    if (heights.size() != b.size()) throw ValidationError("heights length does not match n");
    t.validate();
    return t;
}

struct Cell {
    std::size_t n = 0;
    std::size_t n1 = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

using InvariantTable = std::map<std::pair<std::size_t, std::size_t>, Cell>;

namespace detail {

/// Invariants of the triple restricted to W (with the induced flag).
inline InvariantTable invariants_on(const Triple& T, const Subspace& W) {
    const std::size_t t = T.flag.length();
    std::vector<Subspace> Wq, Pq;
    for (std::size_t q = 0; q <= t; ++q) Wq.push_back(T.level(q).intersect(W));
    for (std::size_t q = 0; q <= t; ++q) Pq.push_back(T.perp(Wq[q], W));
    Subspace V0 = T.isotropic(W);
    InvariantTable tab;
    for (std::size_t q = 1; q <= t; ++q)
        for (std::size_t r = 1; r <= t; ++r) {
            Subspace N = Wq[q].intersect(Pq[r - 1]);
            Subspace D = Wq[q].intersect(Pq[r]) + Wq[q - 1].intersect(Pq[r - 1]);
            std::size_t nqr = N.dim() - D.dim();
            if (nqr == 0) continue;
            std::size_t img = (N.intersect(V0) + D).dim() - D.dim();
            tab[{q, r}] = Cell{nqr, nqr - img};
        }
    return tab;
}

}  // namespace detail

inline InvariantTable invariants(const Triple& T) {
    return detail::invariants_on(T, Subspace::whole(*T.F, T.n));
}

inline bool equivalent(const Triple& a, const Triple& b) {
    return a.n == b.n && *a.F == *b.F && invariants(a) == invariants(b);
}

enum class BlockKind { M0 = 0, M1 = 1, One = 2 };

struct Block {
    BlockKind kind;
    std::size_t q, r;  ///< heights of the basis vectors (q == r for One)
    friend auto operator<=>(const Block&, const Block&) = default;
};

/// Blocks of the canonical form, in output order: M0 pairs, M1 pairs, then 1's.
inline std::vector<Block> canonical_blocks(const InvariantTable& tab) {
    std::vector<Block> out;
    auto cell = [&](std::size_t q, std::size_t r) {
        auto it = tab.find({q, r});
        return it == tab.end() ? Cell{} : it->second;
    };
    for (const auto& [qr, c] : tab) {
        auto [q, r] = qr;
        if (c.n1 > 1) throw ValidationError("invariant n1 exceeds 1");
        if (c.n1 > c.n) throw ValidationError("invariant n1 exceeds n");
        if (q < r) {
            Cell o = cell(r, q);
            if (o.n != c.n) throw ValidationError("invariant table is not symmetric");
            if (c.n1 != 0) throw ValidationError("invariant n1_qr must vanish for q < r");
            for (std::size_t k = 0; k + o.n1 < c.n; ++k) out.push_back({BlockKind::M0, q, r});
            if (o.n1) out.push_back({BlockKind::M1, q, r});
        } else if (q == r) {
            if (c.n1 == 0) {
                if (c.n % 2) throw ValidationError("alternating diagonal cell has odd dimension");
                for (std::size_t k = 0; k < c.n / 2; ++k) out.push_back({BlockKind::M0, q, q});
            } else {
                for (std::size_t k = 0; k < c.n; ++k) out.push_back({BlockKind::One, q, q});
            }
        } else if (cell(r, q).n != c.n) {
            throw ValidationError("invariant table is not symmetric");
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct CanonicalForm {
    Matrix matrix;
    std::vector<std::size_t> heights;
};

inline CanonicalForm canonical_from_blocks(const std::vector<Block>& blocks) {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.kind == BlockKind::One ? 1 : 2;
    CanonicalForm out{Matrix(n, std::vector<Elem>(n)), {}};
    std::size_t k = 0;
    for (const auto& b : blocks) {
        if (b.kind == BlockKind::One) {
            out.matrix[k][k] = kOne;
            out.heights.push_back(b.q);
            ++k;
        } else {
            out.matrix[k][k + 1] = out.matrix[k + 1][k] = kOne;
            if (b.kind == BlockKind::M1) out.matrix[k + 1][k + 1] = kOne;
            out.heights.push_back(b.q);
            out.heights.push_back(b.r);
            k += 2;
        }
    }
    return out;
}

inline CanonicalForm canonical_from_invariants(const InvariantTable& tab) {
    return canonical_from_blocks(canonical_blocks(tab));
}

struct CanonicalResult {
    Matrix change;     ///< columns are the new basis vectors
    CanonicalForm canonical;
    bool alternating = false;
};

namespace detail {

inline Matrix congruence(const Triple& T, const std::vector<Vector>& cols) {
    std::size_t k = cols.size();
    Matrix m(k, std::vector<Elem>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) m[i][j] = T.form(cols[i], cols[j]);
    return m;
}

/// Particular solutions v = sum c_j basis_j of the given linear constraints,
/// followed by those shifted by each kernel vector.
inline std::vector<Vector> solve_in_span(const Triple& T, const std::vector<Vector>& basis,
                                         const std::vector<Vector>& rows_per_basis,
                                         const Vector& rhs) {
    const Field& F = *T.F;
    GfqOps eq(F, rhs.size());
    GfqOps tops(F, basis.size());
    TrackedEchelon<GfqOps> te(eq, tops);
    std::vector<Vector> kern;
    for (std::size_t j = 0; j < basis.size(); ++j)
        if (auto dep = te.insert(rows_per_basis[j], tops.unit(j))) kern.push_back(*dep);
    auto sol = te.express(rhs);
    std::vector<Vector> out;
    if (!sol) return out;
    GfqOps amb(F, T.n);
    auto combine = [&](const Vector& c) {
        Vector v(T.n);
        for (std::size_t j = 0; j < basis.size(); ++j) amb.axpy(v, c[j], basis[j]);
        return v;
    };
    out.push_back(combine(*sol));
    for (const auto& k : kern) {
        Vector c = *sol;
        tops.axpy(c, kOne, k);
        out.push_back(combine(c));
    }
    return out;
}

}  // namespace detail

/**
 * Basis change C with C^T b C canonical.  Pairs are split off first, in
 * lexicographic order of (q, r); within a cell the M0 blocks come before
 * the M1 block.  Unit vectors follow.  Every choice is checked by
 * recomputing the invariants of the orthogonal complement.
 */
inline CanonicalResult canonicalize(const Triple& T) {
    T.validate();
    const Field& F = *T.F;
    const InvariantTable tab = invariants(T);
    const std::vector<Block> target = canonical_blocks(tab);

    std::vector<Block> order = target;
    std::stable_sort(order.begin(), order.end(), [](const Block& a, const Block& b) {
        bool pa = a.kind != BlockKind::One, pb = b.kind != BlockKind::One;
        if (pa != pb) return pa;
        return std::tie(a.q, a.r, a.kind) < std::tie(b.q, b.r, b.kind);
    });

    Subspace W = Subspace::whole(F, T.n);
    std::vector<Block> remaining = target;
    std::map<Block, std::vector<std::vector<Vector>>> found;
    const std::size_t t = T.flag.length();

    for (const Block& blk : order) {
        remaining.erase(std::find(remaining.begin(), remaining.end(), blk));
        std::vector<Subspace> Wq, Pq;
        for (std::size_t q = 0; q <= t; ++q) Wq.push_back(T.level(q).intersect(W));
        for (std::size_t q = 0; q <= t; ++q) Pq.push_back(T.perp(Wq[q], W));
        const std::size_t q = blk.q, r = blk.r;
        Subspace N1 = Wq[q].intersect(Pq[r - 1]);
        Subspace D1 = Wq[q].intersect(Pq[r]) + Wq[q - 1].intersect(Pq[r - 1]);

        auto accept = [&](const std::vector<Vector>& vs) {
            Subspace S = Subspace::span(F, T.n, vs);
            Subspace rest = T.perp(S, W);
            if (canonical_blocks(detail::invariants_on(T, rest)) != remaining) return false;
            found[blk].push_back(vs);
            W = rest;
            return true;
        };

        std::vector<Vector> ucands;
        auto nb = N1.basis();
        for (const auto& v : nb)
            if (!D1.contains(v)) ucands.push_back(v);
        GfqOps amb(F, T.n);
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                Vector v = nb[i];
                amb.axpy(v, kOne, nb[j]);
                if (!D1.contains(v)) ucands.push_back(v);
            }

        bool ok = false;
        if (blk.kind == BlockKind::One) {
            std::vector<Vector> rows;
            for (const auto& v : nb) rows.push_back(Vector{T.root_norm(v)});
            for (const auto& u : detail::solve_in_span(T, nb, rows, Vector{kOne}))
                if ((ok = accept({u}))) break;
        } else {
            Subspace N2 = Wq[r].intersect(Pq[q - 1]);
            auto vb = N2.basis();
            for (const auto& u : ucands) {
                if (!T.form(u, u).is_zero()) continue;
                // M0 with q < r adds the linear condition l(v) = 0.  For M1
                // any v with l(v) = c != 0 works after u -> c u, v -> v / c.
                std::vector<Vector> rows;
                Vector rhs{kOne};
                bool isotropic_v = q < r && blk.kind == BlockKind::M0;
                if (isotropic_v) rhs.push_back(kZero);
                for (const auto& v : vb) {
                    Vector row{T.form(u, v)};
                    if (isotropic_v) row.push_back(T.root_norm(v));
                    rows.push_back(row);
                }
                for (auto v : detail::solve_in_span(T, vb, rows, rhs)) {
                    Vector uu = u;
                    if (blk.kind == BlockKind::M0 && !T.form(v, v).is_zero()) continue;
                    if (blk.kind == BlockKind::M1) {
                        Elem c = T.root_norm(v);
                        if (c.is_zero()) continue;
                        amb.scale(uu, c);
                        amb.scale(v, F.inv(c));
                    }
                    if ((ok = accept({uu, v}))) break;
                }
                if (ok) break;
            }
        }
        if (!ok) throw InternalError("canonicalize: no admissible vector for a block");
    }

    CanonicalResult res;
    res.alternating = T.alternating();
    res.canonical = canonical_from_blocks(target);
    std::vector<Vector> cols;
    std::map<Block, std::size_t> used;
    for (const Block& blk : target) {
        const auto& vs = found.at(blk).at(used[blk]++);
        cols.insert(cols.end(), vs.begin(), vs.end());
    }
    res.change.assign(T.n, std::vector<Elem>(T.n));
    for (std::size_t j = 0; j < T.n; ++j)
        for (std::size_t i = 0; i < T.n; ++i) res.change[i][j] = cols[j][i];

    if (detail::congruence(T, cols) != res.canonical.matrix)
        throw InternalError("canonicalize: C^T b C is not canonical");
    for (std::size_t j = 0; j < T.n; ++j)
        if (T.height(cols[j]) != res.canonical.heights[j])
            throw InternalError("canonicalize: basis vector has the wrong height");
    for (std::size_t q = 1; q <= t; ++q) {
        std::size_t cnt = 0;
        for (auto h : res.canonical.heights) cnt += h <= q;
        if (cnt != T.level(q).dim()) throw InternalError("canonicalize: basis does not split the flag");
    }
    return res;
}

}  // namespace nalie
