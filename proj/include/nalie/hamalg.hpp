#pragma once

/**
 * @file hamalg.hpp
 * @brief Poisson brackets, the Hamiltonian algebra P(omega) and simplicity tests.
 *
 * For a closed nondegenerate 2-form omega with matrix M, the Poisson bracket
 * is {f, g} = sum omega-bar_ij d_i f d_j g with omega-bar = M^{-1}.  P is O/K
 * with this bracket, realised on the basis x^(alpha), alpha != 0.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "derivations.hpp"
#include "divpow.hpp"
#include "forms.hpp"
#include "linalg.hpp"

namespace nalie {

/// dx_1dx_2 + ... + dx_{2r-1}dx_{2r} + sum eps_k (dx_{2k})^(2) + (dx_{2r+1})^(2) + ... + (dx_n)^(2).
inline Form2 kanon_form(const RingPtr& R, unsigned r, const std::vector<bool>& eps) {
    const unsigned n = R->n();
    if (2 * r > n || eps.size() != r) throw ValidationError("kanon form needs 2r <= n and r values of epsilon");
    Form2 w(R);
    DPoly one = DPoly::one(R);
    for (unsigned k = 0; k < r; ++k) {
        w.add_mix(2 * k, 2 * k + 1, one);
        if (eps[k]) w.add_sq(2 * k + 1, one);
    }
    for (unsigned i = 2 * r; i < n; ++i) w.add_sq(i, one);
    return w;
}

/// The three-variable families omega_1, omega_2, omega_3 with deformation coefficients a, b, c.
inline Form2 omega_family(const RingPtr& R, int which, Elem a, Elem b, Elem c) {
    if (R->n() != 3) throw ValidationError("omega family needs n = 3");
    const Heights& h = R->heights();
    DPoly one = DPoly::one(R);
    Form2 w(R);
    switch (which) {
        case 1: w.add_mix(0, 1, one); w.add_sq(2, one); break;
        case 2: w.add_sq(0, one); w.add_sq(1, one); w.add_sq(2, one); break;
        case 3: w.add_mix(0, 1, one); w.add_sq(1, one); w.add_sq(2, one); break;
        default: throw ValidationError("omega family index must be 1, 2 or 3");
    }
    auto bar = [&](unsigned i, unsigned j) { return DPoly::monomial(R, h.top(i) | h.top(j)); };
    w.add_mix(0, 1, bar(0, 1).scaled(a));
    w.add_mix(0, 2, bar(0, 2).scaled(b));
    w.add_mix(1, 2, bar(1, 2).scaled(c));
    return w;
}

/// A closed, nondegenerate 2-form with its inverse matrix.
class HamiltonianForm {
public:
    explicit HamiltonianForm(Form2 w, bool allow_alternating = false) : w_(std::move(w)) {
        if (!is_closed(w_)) throw PreconditionError("form is not closed");
        if (!allow_alternating && is_alternating(w_)) throw PreconditionError("form is alternating");
        M_ = matrix_of_form(w_);
        Minv_ = invert_matrix(M_);
        constant_ = true;
        for (const auto& row : Minv_)
            for (const auto& e : row)
                if (e.size() > 1 || (e.size() == 1 && e.terms().begin()->first != 0)) constant_ = false;
    }

    const Form2& form() const { return w_; }
    const RingPtr& ring() const { return w_.ring(); }
    unsigned n() const { return w_.n(); }
    const PolyMatrix& matrix() const { return M_; }
    const PolyMatrix& inverse() const { return Minv_; }
    bool constant_inverse() const { return constant_; }

private:
    Form2 w_;
    PolyMatrix M_, Minv_;
    bool constant_ = true;
};

/// Full O-valued bracket, constant term included.
inline DPoly poisson_full(const HamiltonianForm& H, const DPoly& f, const DPoly& g) {
    const unsigned n = H.n();
    std::vector<DPoly> df, dg;
    for (unsigned i = 0; i < n; ++i) {
        df.push_back(f.partial(i));
        dg.push_back(g.partial(i));
    }
    DPoly r(H.ring());
    for (unsigned i = 0; i < n; ++i) {
        if (df[i].is_zero()) continue;
        for (unsigned j = 0; j < n; ++j) {
            const DPoly& w = H.inverse()[i][j];
            if (w.is_zero() || dg[j].is_zero()) continue;
            r += w * df[i] * dg[j];
        }
    }
    return r;
}

/// Bracket of P = O/K: constants are dropped.
inline DPoly poisson(const HamiltonianForm& H, const DPoly& f, const DPoly& g) {
    return poisson_full(H, f, g).without_constant();
}

/// D_f = sum omega-bar_ij d_j f d_i.
inline SpecialDerivation hamiltonian_field(const HamiltonianForm& H, const DPoly& f) {
    SpecialDerivation D(H.ring());
    for (unsigned i = 0; i < H.n(); ++i)
        for (unsigned j = 0; j < H.n(); ++j) {
            const DPoly& w = H.inverse()[i][j];
            if (!w.is_zero()) D.comp(i) += w * f.partial(j);
        }
    return D;
}

/// Finite-dimensional Lie algebra given by sparse structure constants.
class LieAlgebra {
public:
    LieAlgebra(const Field& F, std::vector<Packed> labels)
        : F_(&F), labels_(std::move(labels)), sc_(pairs(labels_.size())) {}

    const Field& field() const { return *F_; }
    std::size_t dim() const { return labels_.size(); }
    const std::vector<Packed>& labels() const { return labels_; }

    /// [e_a, e_b]; the algebra is alternating so [e_b, e_a] is the same vector.
    const SparseVec& bracket_basis(std::size_t a, std::size_t b) const {
        static const SparseVec empty;
        if (a == b) return empty;
        if (a > b) std::swap(a, b);
        return sc_[tri(a, b)];
    }
    void set_bracket(std::size_t a, std::size_t b, SparseVec v) {
        if (a == b) throw InternalError("diagonal structure constant");
        if (a > b) std::swap(a, b);
        sc_[tri(a, b)] = std::move(v);
    }

    SparseVec bracket(const SparseVec& u, const SparseVec& v) const {
        SparseVec r;
        for (auto [a, x] : u)
            for (auto [b, y] : v) sparse_axpy(r, F_->mul(x, y), bracket_basis(a, b), *F_);
        return r;
    }

    /// Basis vectors of a subalgebra, if this algebra was built as one (parent coordinates).
    std::vector<SparseVec> embedding;
    std::size_t parent_dim = 0;

private:
    static std::size_t pairs(std::size_t d) { return d < 2 ? 0 : d * (d - 1) / 2; }
    std::size_t tri(std::size_t a, std::size_t b) const {
        std::size_t d = labels_.size();
        return a * (2 * d - a - 1) / 2 + (b - a - 1);
    }

    const Field* F_;
    std::vector<Packed> labels_;
    std::vector<SparseVec> sc_;
};

namespace detail {

inline SparseVec poly_to_sparse(const DPoly& f) {
    SparseVec v;
    for (auto [a, c] : f.terms())
        if (a != 0) v.emplace_back(a - 1, c);
    return v;
}

}  // namespace detail

/// P(omega): basis x^(alpha), alpha != 0, element i <-> packed index i + 1.
inline LieAlgebra build_P(const HamiltonianForm& H) {
    const RingPtr& R = H.ring();
    const Heights& h = R->heights();
    const Field& F = R->field();
    const unsigned n = H.n();
    const std::size_t dim = static_cast<std::size_t>(h.dim() - 1);
    std::vector<Packed> labels(dim);
    for (std::size_t i = 0; i < dim; ++i) labels[i] = static_cast<Packed>(i + 1);
    LieAlgebra L(F, labels);

    if (H.constant_inverse()) {
        std::vector<std::vector<Elem>> c(n, std::vector<Elem>(n));
        for (unsigned i = 0; i < n; ++i)
            for (unsigned j = 0; j < n; ++j) c[i][j] = H.inverse()[i][j].constant_term();
        std::vector<std::pair<std::uint32_t, Elem>> acc;
        for (std::size_t a = 0; a < dim; ++a) {
            Packed al = labels[a];
            for (std::size_t b = a + 1; b < dim; ++b) {
                Packed be = labels[b];
                acc.clear();
                for (unsigned i = 0; i < n; ++i) {
                    if (!(al & h.field_mask(i))) continue;
                    Packed ai = al - h.unit(i);
                    for (unsigned j = 0; j < n; ++j) {
                        if (c[i][j].is_zero() || !(be & h.field_mask(j))) continue;
                        Packed bj = be - h.unit(j);
                        if (ai & bj) continue;
                        Packed g = ai | bj;
                        if (g != 0) acc.emplace_back(g - 1, c[i][j]);
                    }
                }
                if (acc.empty()) continue;
                std::sort(acc.begin(), acc.end(), [](auto& x, auto& y) { return x.first < y.first; });
                SparseVec v;
                for (auto& [g, x] : acc) {
                    if (!v.empty() && v.back().first == g) {
                        v.back().second += x;
                        if (v.back().second.is_zero()) v.pop_back();
                    } else {
                        v.emplace_back(g, x);
                    }
                }
                if (!v.empty()) L.set_bracket(a, b, std::move(v));
            }
        }
    } else {
        std::vector<DPoly> basis;
        for (std::size_t a = 0; a < dim; ++a) basis.push_back(DPoly::monomial(R, labels[a]));
        for (std::size_t a = 0; a < dim; ++a) {
            DPoly self = poisson(H, basis[a], basis[a]);
            if (!self.is_zero()) throw InternalError("bracket is not alternating");
            for (std::size_t b = a + 1; b < dim; ++b) {
                SparseVec v = detail::poly_to_sparse(poisson(H, basis[a], basis[b]));
                if (!v.empty()) L.set_bracket(a, b, std::move(v));
            }
        }
    }
    return L;
}

/// Echelon basis of [L, L] (fully reduced, sorted by leading index).
inline std::vector<SparseVec> derived_basis(const LieAlgebra& L) {
    SparseEchelon e(L.field(), L.dim());
    for (std::size_t a = 0; a < L.dim() && !e.full(); ++a)
        for (std::size_t b = a + 1; b < L.dim() && !e.full(); ++b) {
            const SparseVec& v = L.bracket_basis(a, b);
            if (!v.empty()) e.insert(v);
        }
    return e.reduced_basis();
}

/// Subalgebra spanned by a fully reduced echelon basis.
inline LieAlgebra subalgebra(const LieAlgebra& L, const std::vector<SparseVec>& basis) {
    std::vector<Packed> labels;
    std::vector<int> coord(L.dim(), -1);
    SparseEchelon e(L.field(), L.dim());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].empty()) throw InternalError("zero basis vector");
        coord[basis[i].front().first] = static_cast<int>(i);
        labels.push_back(L.labels()[basis[i].front().first]);
        e.insert(basis[i]);
    }
    LieAlgebra S(L.field(), labels);
    S.embedding = basis;
    S.parent_dim = L.dim();
    for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t b = a + 1; b < basis.size(); ++b) {
            SparseVec w = L.bracket(basis[a], basis[b]);
            if (w.empty()) continue;
            SparseVec c;
            for (auto [i, x] : w)
                if (coord[i] >= 0) c.emplace_back(static_cast<std::uint32_t>(coord[i]), x);
            std::sort(c.begin(), c.end(), [](auto& x, auto& y) { return x.first < y.first; });
            // Check w = sum c_k basis_k.
            SparseVec chk = w;
            for (auto [k, x] : c) sparse_axpy(chk, x, basis[k], L.field());
            if (!chk.empty()) throw PreconditionError("subspace is not closed under the bracket");
            S.set_bracket(a, b, std::move(c));
        }
    return S;
}

inline LieAlgebra derived_algebra(const LieAlgebra& L) { return subalgebra(L, derived_basis(L)); }

inline LieAlgebra build_P1(const HamiltonianForm& H) { return derived_algebra(build_P(H)); }

// ---------------------------------------------------------------------------
// Dense adjoint matrices

template <class Ops>
typename Ops::Vec to_dense(const Ops& ops, const SparseVec& v) {
    auto d = ops.zero();
    for (auto [i, c] : v) ops.set(d, i, c);
    return d;
}

template <class Ops>
SparseVec to_sparse(const Ops& ops, const typename Ops::Vec& v) {
    SparseVec s;
    for (std::size_t i = 0; i < ops.n; ++i) {
        Elem c = ops.get(v, i);
        if (!c.is_zero()) s.emplace_back(static_cast<std::uint32_t>(i), c);
    }
    return s;
}

/// ad(x) as a dense matrix: column b is [x, e_b].
template <class Ops>
DenseMat<Ops> ad_matrix(const LieAlgebra& L, const Ops& ops, const typename Ops::Vec& x) {
    DenseMat<Ops> m(ops);
    const Field& F = L.field();
    std::vector<std::pair<std::size_t, Elem>> nz;
    for (std::size_t a = 0; a < L.dim(); ++a) {
        Elem c = ops.get(x, a);
        if (!c.is_zero()) nz.emplace_back(a, c);
    }
    for (std::size_t b = 0; b < L.dim(); ++b) {
        auto col = ops.zero();
        for (auto [a, c] : nz)
            for (auto [g, y] : L.bracket_basis(a, b)) ops.add(col, g, F.mul(c, y));
        m.cols.push_back(std::move(col));
    }
    return m;
}

/// Smallest ideal containing the given vectors (generators: every basis element).
template <class Ops>
Echelon<Ops> ideal_spin(const LieAlgebra& L, const Ops& ops, const std::vector<typename Ops::Vec>& start) {
    Echelon<Ops> e(ops);
    std::deque<typename Ops::Vec> todo;
    for (const auto& v : start)
        if (e.insert(v)) todo.push_back(v);
    while (!todo.empty() && !e.full()) {
        auto u = std::move(todo.front());
        todo.pop_front();
        auto ad = ad_matrix(L, ops, u);
        for (const auto& w : ad.cols) {
            auto r = e.reduce(w);
            if (!ops.is_zero(r)) {
                e.insert_reduced(r);
                todo.push_back(w);
                if (e.full()) break;
            }
        }
    }
    return e;
}

inline std::vector<SparseVec> ideal_spin(const LieAlgebra& L, const SparseVec& v) {
    return with_ops(L.field(), L.dim(), [&](auto ops) {
        auto e = ideal_spin(L, ops, {to_dense(ops, v)});
        std::vector<SparseVec> out;
        for (const auto& r : e.sorted_rows()) out.push_back(to_sparse(ops, r));
        return out;
    });
}

/// Center: common kernel of all ad(e_a).
inline std::vector<SparseVec> center(const LieAlgebra& L) {
    return with_ops(L.field(), L.dim(), [&](auto ops) {
        using Ops = decltype(ops);
        std::vector<typename Ops::Vec> K;
        for (std::size_t i = 0; i < L.dim(); ++i) K.push_back(ops.unit(i));
        for (std::size_t a = 0; a < L.dim() && !K.empty(); ++a) {
            auto ea = ops.unit(a);
            auto ad = ad_matrix(L, ops, ea);
            std::vector<typename Ops::Vec> imgs;
            for (const auto& k : K) imgs.push_back(ad.apply(k));
            Ops tops = ops;
            tops.n = K.size();
            std::vector<typename Ops::Vec> next;
            for (const auto& c : kernel_of(ops, tops, imgs)) {
                auto v = ops.zero();
                for (std::size_t i = 0; i < K.size(); ++i) ops.axpy(v, tops.get(c, i), K[i]);
                next.push_back(std::move(v));
            }
            K = std::move(next);
        }
        Echelon<Ops> e(ops);
        for (const auto& k : K) e.insert(k);
        std::vector<SparseVec> out;
        for (const auto& r : e.sorted_rows()) out.push_back(to_sparse(ops, r));
        return out;
    });
}

/// Whether L = [L, L].
inline bool is_perfect(const LieAlgebra& L) {
    SparseEchelon e(L.field(), L.dim());
    for (std::size_t a = 0; a < L.dim() && !e.full(); ++a)
        for (std::size_t b = a + 1; b < L.dim() && !e.full(); ++b) {
            const SparseVec& v = L.bracket_basis(a, b);
            if (!v.empty()) e.insert(v);
        }
    return e.full();
}

/// Exhaustive test: L perfect and every projective point spins to L.
inline bool is_simple_exhaustive(const LieAlgebra& L) {
    if (L.dim() == 0 || !is_perfect(L)) return false;
    double points = static_cast<double>(L.dim()) * static_cast<double>(L.field().degree());
    if (points > 24) throw PreconditionError("exhaustive simplicity test limited to 2^24 vectors");
    return with_ops(L.field(), L.dim(), [&](auto ops) {
        using Ops = decltype(ops);
        std::vector<typename Ops::Vec> basis;
        for (std::size_t i = 0; i < L.dim(); ++i) basis.push_back(ops.unit(i));
        return for_each_projective_point(ops, basis, [&](const typename Ops::Vec& v) {
            return ideal_spin(L, ops, std::vector<typename Ops::Vec>{v}).full();
        });
    });
}

namespace detail {

/// Index a with [e_a, U] not inside U, if any.
template <class Ops>
std::optional<std::size_t> ideal_violation(const LieAlgebra& L, const Ops& ops, const Echelon<Ops>& U) {
    for (const auto& u : U.rows()) {
        auto ad = ad_matrix(L, ops, u);
        for (std::size_t a = 0; a < L.dim(); ++a)
            if (!U.contains(ad.cols[a])) return a;
    }
    return std::nullopt;
}

/// Annihilator of W inside L (W in the dual).
template <class Ops>
Echelon<Ops> annihilator(const Ops& ops, const Echelon<Ops>& W) {
    // Rows of W as a map L -> K^{rank}; its kernel is the annihilator.
    Ops rops = ops;
    rops.n = W.rank();
    std::vector<typename Ops::Vec> cols;
    for (std::size_t j = 0; j < ops.n; ++j) {
        auto c = rops.zero();
        for (std::size_t r = 0; r < W.rank(); ++r) rops.set(c, r, ops.get(W.rows()[r], j));
        cols.push_back(std::move(c));
    }
    Echelon<Ops> e(ops);
    for (const auto& k : kernel_of(rops, ops, cols)) e.insert(k);
    return e;
}

template <class Ops>
bool is_simple_norton(const LieAlgebra& L, const Ops& ops, std::uint64_t seed) {
    const std::size_t n = L.dim();
    const Field& F = L.field();
    std::mt19937_64 rng(seed);
    auto random_vec = [&]() {
        auto v = ops.zero();
        for (std::size_t i = 0; i < n; ++i) ops.set(v, i, Elem(static_cast<std::uint32_t>(rng() % F.order())));
        return v;
    };
    std::vector<DenseMat<Ops>> gens;
    gens.push_back(ad_matrix(L, ops, random_vec()));
    gens.push_back(ad_matrix(L, ops, random_vec()));
    auto gen_ptrs = [&]() {
        std::vector<const DenseMat<Ops>*> p;
        for (const auto& g : gens) p.push_back(&g);
        return p;
    };

    auto norton = [&](const DenseMat<Ops>& t, const std::vector<typename Ops::Vec>& ker) {
        // Every nonzero vector of ker(theta) must generate L.
        bool ok = for_each_projective_point(ops, ker, [&](const typename Ops::Vec& v) {
            while (true) {
                auto S = spin(gen_ptrs(), {v}, ops);
                if (S.full()) return true;
                auto bad = ideal_violation(L, ops, S);
                if (!bad) return false;
                gens.push_back(ad_matrix(L, ops, ops.unit(*bad)));
            }
        });
        if (!ok) return false;

        // One vector of ker(theta^T) must generate the dual module.
        auto lker = kernel_of(t.transpose());
        if (lker.empty()) throw InternalError("left kernel of a singular matrix is empty");
        while (true) {
            auto S = spin(gen_ptrs(), {lker.front()}, ops, true);
            if (S.full()) return true;
            auto U = annihilator(ops, S);
            auto bad = ideal_violation(L, ops, U);
            if (!bad) return false;
            gens.push_back(ad_matrix(L, ops, ops.unit(*bad)));
        }
    };

    const std::size_t lambdas = std::min<std::size_t>(F.order(), 16);
    const double max_points = 65536;
    std::size_t next_basis = 0;
    for (int batch = 0; batch < 64; ++batch) {
        std::optional<DenseMat<Ops>> best;
        std::vector<typename Ops::Vec> best_ker;
        for (int attempt = 0; attempt < 8; ++attempt) {
            // A random element of the associative algebra generated by gens.
            std::vector<DenseMat<Ops>> words(gens.begin(), gens.end());
            for (int i = 0; i < 4; ++i) {
                const auto& A = words[rng() % words.size()];
                const auto& B = words[rng() % words.size()];
                words.push_back(A * B);
            }
            DenseMat<Ops> theta(ops);
            theta.cols.assign(n, ops.zero());
            for (const auto& w : words)
                theta.add_scaled(w, Elem(static_cast<std::uint32_t>(1 + rng() % (F.order() - 1))));
            for (std::size_t li = 0; li < lambdas; ++li) {
                DenseMat<Ops> t = theta;
                t.add_diagonal(Elem(static_cast<std::uint32_t>(li)));
                auto ker = kernel_of(t);
                if (ker.empty() || (best && ker.size() >= best_ker.size())) continue;
                best = std::move(t);
                best_ker = std::move(ker);
            }
            if (best && best_ker.size() <= 2) break;
        }
        if (best && std::pow(static_cast<double>(F.order()), static_cast<double>(best_ker.size())) <= max_points)
            return norton(*best, best_ker);
        // Enlarge the generating set and retry.
        gens.push_back(ad_matrix(L, ops, ops.unit(next_basis++ % n)));
    }
    throw InternalError("simplicity test found no element with a small kernel");
}

}  // namespace detail

/**
 * Whether L is simple: L = [L, L] and the adjoint module is irreducible.
 * Irreducibility is certified with Norton's criterion: for a singular
 * theta in the associative algebra A generated by ad L, the module is
 * irreducible iff every nonzero v in ker theta generates L under A and some
 * nonzero w in ker theta^T generates the dual.  Any proper invariant
 * subspace found along the way is confirmed to be an ideal before the
 * answer "not simple" is returned, so the result does not depend on the
 * random choices; only the running time does.
 */
inline bool is_simple(const LieAlgebra& L, std::uint64_t seed = 0x5eed) {
    if (L.dim() == 0 || !is_perfect(L)) return false;
    return with_ops(L.field(), L.dim(), [&](auto ops) { return detail::is_simple_norton(L, ops, seed); });
}

/// Jacobi identity on basis triples: all of them up to `exhaustive_dim`, else `samples` random ones.
inline bool check_jacobi(const LieAlgebra& L, std::size_t exhaustive_dim = 15, std::size_t samples = 10000,
                         std::uint64_t seed = 1) {
    const std::size_t d = L.dim();
    auto jac = [&](std::size_t a, std::size_t b, std::size_t c) {
        SparseVec ea{{static_cast<std::uint32_t>(a), kOne}}, eb{{static_cast<std::uint32_t>(b), kOne}},
            ec{{static_cast<std::uint32_t>(c), kOne}};
        SparseVec s = L.bracket(L.bracket_basis(a, b), ec);
        sparse_axpy(s, kOne, L.bracket(L.bracket_basis(b, c), ea), L.field());
        sparse_axpy(s, kOne, L.bracket(L.bracket_basis(c, a), eb), L.field());
        return s.empty();
    };
    if (d <= exhaustive_dim) {
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = a + 1; b < d; ++b)
                for (std::size_t c = b + 1; c < d; ++c)
                    if (!jac(a, b, c)) return false;
        return true;
    }
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s)
        if (!jac(rng() % d, rng() % d, rng() % d)) return false;
    return true;
}

/// dim of {D in W(n, m) : L_D omega = 0}.
inline std::size_t build_Ptilde_dim(const HamiltonianForm& H) {
    const RingPtr& R = H.ring();
    const unsigned n = H.n();
    const std::size_t blk = static_cast<std::size_t>(R->heights().dim());
    FormSpace<2> dst(R);
    return with_ops(R->field(), dst.dim(), [&](auto ops) {
        std::vector<typename decltype(ops)::Vec> cols;
        for (unsigned k = 0; k < n; ++k)
            for (std::size_t a = 0; a < blk; ++a) {
                auto D = SpecialDerivation::basis(R, static_cast<Packed>(a), k);
                cols.push_back(dst.to_vec(ops, lie_derivative<2>(D, H.form())));
            }
        return n * blk - rank_of(ops, cols);
    });
}

/// Element of P for a polynomial (constant dropped), in basis coordinates.
inline SparseVec element_of(const LieAlgebra& P, const DPoly& f) {
    if (P.dim() + 1 != f.heights().dim()) throw ValidationError("polynomial ring does not match the algebra");
    return detail::poly_to_sparse(f);
}

/// (ad(x_i x_j))^2 == ad(x_i^(2) + x_j^(2)) in P for omega = sum (dx_k)^(2).
inline bool verify_filt2_identity(const HamiltonianForm& H, const LieAlgebra& P, unsigned i, unsigned j) {
    if (i == j) throw ValidationError("filt2 identity needs i != j");
    const RingPtr& R = H.ring();
    const Heights& h = R->heights();
    if (i >= H.n() || j >= H.n()) throw ValidationError("variable index out of range");
    if (h.height(i) < 2 || h.height(j) < 2) throw PreconditionError("filt2 identity needs m_i, m_j >= 2");
    for (unsigned a = 0; a < H.n(); ++a)
        for (unsigned b = 0; b < H.n(); ++b) {
            Elem want = a == b ? kOne : kZero;
            const DPoly& m = H.matrix()[a][b];
            if (!(m == DPoly::constant(R, want))) throw PreconditionError("filt2 identity needs omega = sum (dx_k)^(2)");
        }
    DPoly xij = DPoly::monomial(R, h.unit(i) | h.unit(j));
    DPoly sq = DPoly::monomial(R, h.power(i, 2)) + DPoly::monomial(R, h.power(j, 2));
    return with_ops(R->field(), P.dim(), [&](auto ops) {
        auto A = ad_matrix(P, ops, to_dense(ops, element_of(P, xij)));
        auto B = ad_matrix(P, ops, to_dense(ops, element_of(P, sq)));
        auto A2 = A * A;
        for (std::size_t c = 0; c < P.dim(); ++c)
            if (A2.cols[c] != B.cols[c]) return false;
        return true;
    });
}

}  // namespace nalie
