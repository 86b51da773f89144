#pragma once

/**
 * @file forms.hpp
 * @brief Symmetric differential forms over O(n, m).
 *
 * A k-form is a sum f dx^(gamma) with |gamma| = k, where dx^(gamma) is a
 * divided power monomial in dx_1, ..., dx_n.  A monomial is stored as the
 * nondecreasing list of its variable indices, so (dx_1)^(2) dx_3 is {0, 0, 2}.
 * The dx monomials multiply like divided powers: dx^(a) dx^(b) is
 * dx^(a+b) when a_i & b_i == 0 for every i and zero otherwise.
 */

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "derivations.hpp"
#include "divpow.hpp"
#include "linalg.hpp"

namespace nalie {

template <unsigned K>
using DxMono = std::array<std::uint8_t, K>;

template <std::size_t K>
unsigned dx_exponent(const std::array<std::uint8_t, K>& g, unsigned i) {
    return static_cast<unsigned>(std::count(g.begin(), g.end(), static_cast<std::uint8_t>(i)));
}

/// dx^(g) * dx_i, or nothing if it vanishes.
template <unsigned K>
std::optional<DxMono<K + 1>> dx_times(const DxMono<K>& g, unsigned i) {
    if (dx_exponent(g, i) % 2 == 1) return std::nullopt;
    DxMono<K + 1> r{};
    std::copy(g.begin(), g.end(), r.begin());
    r[K] = static_cast<std::uint8_t>(i);
    std::sort(r.begin(), r.end());
    return r;
}

template <unsigned P, unsigned Q>
std::optional<DxMono<P + Q>> dx_mul(const DxMono<P>& a, const DxMono<Q>& b) {
    for (unsigned i : b)
        if (dx_exponent(a, i) & dx_exponent(b, i)) return std::nullopt;
    DxMono<P + Q> r{};
    std::copy(a.begin(), a.end(), r.begin());
    std::copy(b.begin(), b.end(), r.begin() + P);
    std::sort(r.begin(), r.end());
    return r;
}

/// dx^(g - eps_i); requires g_i > 0.
template <unsigned K>
DxMono<K - 1> dx_remove(const DxMono<K>& g, unsigned i) {
    DxMono<K - 1> r{};
    bool skipped = false;
    unsigned k = 0;
    for (auto v : g) {
        if (!skipped && v == i) { skipped = true; continue; }
        r[k++] = v;
    }
    return r;
}

/// All dx monomials of degree K in n variables, in lexicographic order.
template <unsigned K>
std::vector<DxMono<K>> dx_monomials(unsigned n) {
    std::vector<DxMono<K>> out;
    DxMono<K> cur{};
    auto rec = [&](auto&& self, unsigned pos, unsigned lo) -> void {
        if (pos == K) { out.push_back(cur); return; }
        for (unsigned i = lo; i < n; ++i) {
            cur[pos] = static_cast<std::uint8_t>(i);
            self(self, pos + 1, i);
        }
    };
    rec(rec, 0, 0);
    return out;
}

template <unsigned K>
class SymForm {
public:
    using Key = DxMono<K>;
    using Terms = std::map<Key, DPoly>;

    SymForm() = default;
    explicit SymForm(RingPtr R) : r_(std::move(R)) {}

    const RingPtr& ring() const { return r_; }
    unsigned n() const { return r_->n(); }
    const Terms& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }

    DPoly coeff(const Key& g) const {
        auto it = t_.find(g);
        return it == t_.end() ? DPoly(r_) : it->second;
    }

    void add(const Key& g, const DPoly& f) {
        for (auto v : g)
            if (v >= n()) throw ValidationError("dx index out of range");
        if (f.is_zero()) return;
        auto it = t_.find(g);
        if (it == t_.end()) {
            t_.emplace(g, f);
        } else {
            it->second += f;
            if (it->second.is_zero()) t_.erase(it);
        }
    }

    SymForm& operator+=(const SymForm& o) {
        for (const auto& [g, f] : o.t_) add(g, f);
        return *this;
    }
    friend SymForm operator+(SymForm a, const SymForm& b) { return a += b; }
    friend SymForm operator-(SymForm a, const SymForm& b) { return a += b; }

    friend SymForm operator*(const DPoly& f, const SymForm& w) {
        SymForm r(w.r_);
        for (const auto& [g, h] : w.t_) r.add(g, f * h);
        return r;
    }

    friend bool operator==(const SymForm& a, const SymForm& b) { return a.t_ == b.t_; }

    /// Coefficient of (dx_i)^(2) (2-forms only).
    DPoly sq(unsigned i) const
        requires(K == 2)
    {
        return coeff(Key{static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(i)});
    }
    /// Coefficient of dx_i dx_j, i != j (2-forms only).
    DPoly mix(unsigned i, unsigned j) const
        requires(K == 2)
    {
        if (i > j) std::swap(i, j);
        return coeff(Key{static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j)});
    }
    void add_sq(unsigned i, const DPoly& f)
        requires(K == 2)
    {
        add(Key{static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(i)}, f);
    }
    void add_mix(unsigned i, unsigned j, const DPoly& f)
        requires(K == 2)
    {
        if (i == j) throw ValidationError("mixed term needs two distinct indices");
        if (i > j) std::swap(i, j);
        add(Key{static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j)}, f);
    }
    /// Coefficient of dx_i (1-forms only).
    DPoly at(unsigned i) const
        requires(K == 1)
    {
        return coeff(Key{static_cast<std::uint8_t>(i)});
    }
    void add_at(unsigned i, const DPoly& f)
        requires(K == 1)
    {
        add(Key{static_cast<std::uint8_t>(i)}, f);
    }

    /// Evaluation at 0: keeps only the constant parts of the coefficients.
    SymForm at_origin() const {
        SymForm r(r_);
        for (const auto& [g, f] : t_) r.add(g, DPoly::constant(r_, f.constant_term()));
        return r;
    }

private:
    RingPtr r_;
    Terms t_;
};

using Form0 = SymForm<0>;
using Form1 = SymForm<1>;
using Form2 = SymForm<2>;
using Form3 = SymForm<3>;

inline Form0 as_form0(const DPoly& f) {
    Form0 w(f.ring());
    w.add({}, f);
    return w;
}

template <unsigned P, unsigned Q>
SymForm<P + Q> mul(const SymForm<P>& a, const SymForm<Q>& b) {
    SymForm<P + Q> r(a.ring());
    for (const auto& [ga, fa] : a.terms())
        for (const auto& [gb, fb] : b.terms())
            if (auto g = dx_mul<P, Q>(ga, gb)) r.add(*g, fa * fb);
    return r;
}

inline Form2 mul_11(const Form1& a, const Form1& b) { return mul<1, 1>(a, b); }

/// phi^(2) = sum f_i^2 (dx_i)^(2) + sum_{i<j} f_i f_j dx_i dx_j.
inline Form2 divided_square(const Form1& phi) {
    Form2 r(phi.ring());
    std::vector<std::pair<unsigned, DPoly>> c;
    for (const auto& [g, f] : phi.terms()) c.emplace_back(g[0], f);
    for (std::size_t a = 0; a < c.size(); ++a) {
        r.add_sq(c[a].first, c[a].second * c[a].second);
        for (std::size_t b = a + 1; b < c.size(); ++b)
            r.add_mix(c[a].first, c[b].first, c[a].second * c[b].second);
    }
    return r;
}

/// d(f dx^(g)) = sum_i d_i f dx_i dx^(g).
template <unsigned K>
SymForm<K + 1> d(const SymForm<K>& w) {
    SymForm<K + 1> r(w.ring());
    for (const auto& [g, f] : w.terms())
        for (unsigned i = 0; i < w.n(); ++i) {
            auto h = dx_times<K>(g, i);
            if (!h) continue;
            DPoly p = f.partial(i);
            if (!p.is_zero()) r.add(*h, p);
        }
    return r;
}

inline Form1 d(const DPoly& f) { return d<0>(as_form0(f)); }

/// Interior product: D _| (f dx^(g)) = f sum_{g_i > 0} D_i dx^(g - eps_i).
template <unsigned K>
    requires(K >= 1)
SymForm<K - 1> interior(const SpecialDerivation& D, const SymForm<K>& w) {
    SymForm<K - 1> r(w.ring());
    for (const auto& [g, f] : w.terms()) {
        unsigned prev = ~0u;
        for (auto v : g) {
            if (v == prev) continue;
            prev = v;
            const DPoly& Di = D.comp(v);
            if (!Di.is_zero()) r.add(dx_remove<K>(g, v), f * Di);
        }
    }
    return r;
}

/// Lie derivative by the Cartan formula D _| dw + d(D _| w).
template <unsigned K>
SymForm<K> lie_derivative(const SpecialDerivation& D, const SymForm<K>& w) {
    if constexpr (K == 0) {
        return as_form0(D.apply(w.coeff({})));
    } else {
        return interior<K + 1>(D, d<K>(w)) + d<K - 1>(interior<K>(D, w));
    }
}

inline bool is_closed(const Form2& w) { return d<2>(w).is_zero(); }

/// No (dx_i)^(2) coefficient is nonzero at the origin.
inline bool is_alternating(const Form2& w) {
    for (unsigned i = 0; i < w.n(); ++i)
        if (!w.sq(i).constant_term().is_zero()) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Matrices of 2-forms

using PolyMatrix = std::vector<std::vector<DPoly>>;

/// M with M_ii = coefficient of (dx_i)^(2) and M_ij = M_ji = coefficient of dx_i dx_j.
inline PolyMatrix matrix_of_form(const Form2& w) {
    unsigned n = w.n();
    PolyMatrix M(n, std::vector<DPoly>(n, DPoly(w.ring())));
    for (unsigned i = 0; i < n; ++i) {
        M[i][i] = w.sq(i);
        for (unsigned j = i + 1; j < n; ++j) M[i][j] = M[j][i] = w.mix(i, j);
    }
    return M;
}

inline Form2 form_from_matrix(const PolyMatrix& M) {
    unsigned n = static_cast<unsigned>(M.size());
    if (n == 0) throw ValidationError("empty matrix");
    Form2 w(M[0][0].ring());
    for (unsigned i = 0; i < n; ++i) {
        if (M[i].size() != n) throw ValidationError("matrix is not square");
        w.add_sq(i, M[i][i]);
        for (unsigned j = i + 1; j < n; ++j) {
            if (!(M[i][j] == M[j][i])) throw ValidationError("matrix is not symmetric");
            w.add_mix(i, j, M[i][j]);
        }
    }
    return w;
}

namespace detail {

/// Determinant of M restricted to the given rows and columns.  In
/// characteristic 2 it equals the permanent, so no signs are needed.
inline DPoly det_sub(const PolyMatrix& M, const std::vector<unsigned>& rows,
                     const std::vector<unsigned>& cols, const RingPtr& R) {
    const std::size_t k = rows.size();
    std::map<std::uint32_t, DPoly> memo;
    // f(mask) = det of rows[k - |mask| .. k) x cols in mask.
    memo.emplace(0u, DPoly::one(R));
    for (std::uint32_t size = 1; size <= k; ++size) {
        std::map<std::uint32_t, DPoly> next;
        for (const auto& [mask, val] : memo) {
            if (val.is_zero()) continue;
            unsigned row = rows[k - size];
            for (std::size_t c = 0; c < k; ++c) {
                if (mask & (1u << c)) continue;
                const DPoly& e = M[row][cols[c]];
                if (e.is_zero()) continue;
                std::uint32_t nm = mask | (1u << c);
                auto it = next.find(nm);
                DPoly t = e * val;
                if (it == next.end()) next.emplace(nm, t);
                else it->second += t;
            }
        }
        memo = std::move(next);
    }
    auto it = memo.find(static_cast<std::uint32_t>((std::uint64_t{1} << k) - 1));
    return it == memo.end() ? DPoly(R) : it->second;
}

}  // namespace detail

inline DPoly determinant(const PolyMatrix& M) {
    unsigned n = static_cast<unsigned>(M.size());
    std::vector<unsigned> all(n);
    for (unsigned i = 0; i < n; ++i) all[i] = i;
    return detail::det_sub(M, all, all, M[0][0].ring());
}

inline bool is_nondegenerate(const Form2& w) {
    return !determinant(matrix_of_form(w)).constant_term().is_zero();
}

/// Inverse via adjugate / determinant.
inline PolyMatrix invert_matrix(const PolyMatrix& M) {
    unsigned n = static_cast<unsigned>(M.size());
    const RingPtr& R = M[0][0].ring();
    DPoly det = determinant(M);
    if (det.constant_term().is_zero()) throw PreconditionError("form is degenerate at the origin");
    DPoly dinv = poly_inverse(det);
    PolyMatrix inv(n, std::vector<DPoly>(n, DPoly(R)));
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            std::vector<unsigned> rows, cols;
            for (unsigned a = 0; a < n; ++a)
                if (a != j) rows.push_back(a);
            for (unsigned b = 0; b < n; ++b)
                if (b != i) cols.push_back(b);
            DPoly minor = n == 1 ? DPoly::one(R) : detail::det_sub(M, rows, cols, R);
            inv[i][j] = minor * dinv;
        }
    return inv;
}

inline PolyMatrix matmul(const PolyMatrix& A, const PolyMatrix& B) {
    std::size_t n = A.size();
    PolyMatrix C(n, std::vector<DPoly>(B[0].size(), DPoly(A[0][0].ring())));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < B[0].size(); ++j)
            for (std::size_t k = 0; k < B.size(); ++k) C[i][j] += A[i][k] * B[k][j];
    return C;
}

// ---------------------------------------------------------------------------
// Cohomology classes

/// Coefficients b_ij (i < j, 0-based) of the classes x̄_i x̄_j dx_i dx_j.
using EtaClass = std::map<std::pair<unsigned, unsigned>, Elem>;

/// sum b_ij x̄_i x̄_j dx_i dx_j with x̄_i = x_i^(2^{m_i} - 1).
inline Form2 realize_eta(const EtaClass& eta, const RingPtr& R) {
    Form2 w(R);
    const Heights& h = R->heights();
    for (auto [ij, c] : eta) {
        auto [i, j] = ij;
        if (i >= j || j >= R->n()) throw ValidationError("bad class index pair");
        w.add_mix(i, j, DPoly::monomial(R, h.top(i) | h.top(j), c));
    }
    return w;
}

/// Index map between forms and coordinate vectors.
template <unsigned K>
class FormSpace {
public:
    explicit FormSpace(RingPtr R) : r_(std::move(R)), keys_(dx_monomials<K>(r_->n())) {
        for (std::size_t i = 0; i < keys_.size(); ++i) index_[keys_[i]] = i;
    }

    std::size_t dim() const { return keys_.size() * block(); }
    std::size_t block() const { return static_cast<std::size_t>(r_->heights().dim()); }
    const std::vector<DxMono<K>>& keys() const { return keys_; }

    std::size_t index(const DxMono<K>& g, Packed a) const { return index_.at(g) * block() + a; }

    SymForm<K> basis(std::size_t idx) const {
        SymForm<K> w(r_);
        w.add(keys_[idx / block()], DPoly::monomial(r_, static_cast<Packed>(idx % block())));
        return w;
    }

    template <class Ops>
    typename Ops::Vec to_vec(const Ops& ops, const SymForm<K>& w) const {
        auto v = ops.zero();
        for (const auto& [g, f] : w.terms())
            for (auto [a, c] : f.terms()) ops.set(v, index(g, a), c);
        return v;
    }

    template <class Ops>
    SymForm<K> from_vec(const Ops& ops, const typename Ops::Vec& v) const {
        SymForm<K> w(r_);
        for (std::size_t i = 0; i < dim(); ++i) {
            Elem c = ops.get(v, i);
            if (!c.is_zero())
                w.add(keys_[i / block()], DPoly::monomial(r_, static_cast<Packed>(i % block()), c));
        }
        return w;
    }

private:
    RingPtr r_;
    std::vector<DxMono<K>> keys_;
    std::map<DxMono<K>, std::size_t> index_;
};

/// Columns of d: SΩ^K -> SΩ^{K+1}.
template <unsigned K, class Ops>
std::vector<typename Ops::Vec> differential_columns(const RingPtr& R, const Ops& target) {
    FormSpace<K> src(R);
    FormSpace<K + 1> dst(R);
    std::vector<typename Ops::Vec> cols;
    cols.reserve(src.dim());
    for (std::size_t i = 0; i < src.dim(); ++i) cols.push_back(dst.to_vec(target, d<K>(src.basis(i))));
    return cols;
}

namespace detail {

template <unsigned K>
std::size_t kernel_dim_of_d(const RingPtr& R) {
    FormSpace<K> src(R);
    FormSpace<K + 1> dst(R);
    return with_ops(R->field(), dst.dim(), [&](auto ops) {
        auto cols = differential_columns<K>(R, ops);
        return src.dim() - rank_of(ops, cols);
    });
}

}  // namespace detail

/// dim H^k of the symmetric de Rham complex of O(n, m), k <= 2.
inline std::size_t cohomology_dims(unsigned n, const std::vector<unsigned>& heights, unsigned k,
                                   unsigned field_degree = 1) {
    if (heights.size() != n) throw ValidationError("heights length does not match n");
    if (k > 2) throw ValidationError("cohomology degree must be 0, 1 or 2");
    auto R = DivPowRing::make(heights, field_degree);
    std::size_t ker = 0, im = 0;
    if (k == 0) {
        ker = detail::kernel_dim_of_d<0>(R);
    } else if (k == 1) {
        ker = detail::kernel_dim_of_d<1>(R);
        im = FormSpace<0>(R).dim() - detail::kernel_dim_of_d<0>(R);
    } else {
        ker = detail::kernel_dim_of_d<2>(R);
        im = FormSpace<1>(R).dim() - detail::kernel_dim_of_d<1>(R);
    }
    return ker - im;
}

/// phi with d phi = w, if one exists.
inline std::optional<Form1> solve_potential(const Form2& w) {
    const RingPtr& R = w.ring();
    FormSpace<1> src(R);
    FormSpace<2> dst(R);
    return with_ops(R->field(), dst.dim(), [&](auto ops) -> std::optional<Form1> {
        using Ops = decltype(ops);
        Ops tops = ops;
        tops.n = src.dim();
        auto cols = differential_columns<1>(R, ops);
        TrackedEchelon<Ops> te(ops, tops);
        for (std::size_t j = 0; j < cols.size(); ++j) te.insert(cols[j], tops.unit(j));
        auto h = te.express(dst.to_vec(ops, w));
        if (!h) return std::nullopt;
        return src.from_vec(tops, *h);
    });
}

struct H2Class {
    std::vector<Elem> c;   ///< coefficients of (dx_i)^(2)
    EtaClass eta;          ///< coefficients of x̄_i x̄_j dx_i dx_j
    Form1 phi;             ///< a potential of the exact remainder
};

/// w = sum c_i (dx_i)^(2) + sum b_ij x̄_i x̄_j dx_i dx_j + d phi for a closed w.
inline H2Class h2_class(const Form2& w) {
    if (!is_closed(w)) throw PreconditionError("form is not closed");
    const RingPtr& R = w.ring();
    const unsigned n = R->n();
    const Heights& h = R->heights();
    FormSpace<1> src(R);
    FormSpace<2> dst(R);
    std::vector<Form2> reps;
    std::vector<std::pair<unsigned, unsigned>> labels;
    for (unsigned i = 0; i < n; ++i) {
        Form2 r(R);
        r.add_sq(i, DPoly::one(R));
        reps.push_back(r);
        labels.emplace_back(i, i);
    }
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = i + 1; j < n; ++j) {
            Form2 r(R);
            r.add_mix(i, j, DPoly::monomial(R, h.top(i) | h.top(j)));
            reps.push_back(r);
            labels.emplace_back(i, j);
        }
    return with_ops(R->field(), dst.dim(), [&](auto ops) {
        using Ops = decltype(ops);
        Ops tops = ops;
        tops.n = reps.size() + src.dim();
        TrackedEchelon<Ops> te(ops, tops);
        for (std::size_t j = 0; j < reps.size(); ++j) te.insert(dst.to_vec(ops, reps[j]), tops.unit(j));
        auto cols = differential_columns<1>(R, ops);
        for (std::size_t j = 0; j < cols.size(); ++j) te.insert(cols[j], tops.unit(reps.size() + j));
        auto sol = te.express(dst.to_vec(ops, w));
        if (!sol) throw InternalError("closed form outside the span of the cohomology basis");
        H2Class out{std::vector<Elem>(n), {}, Form1(R)};
        for (std::size_t j = 0; j < reps.size(); ++j) {
            Elem c = tops.get(*sol, j);
            if (labels[j].first == labels[j].second) out.c[labels[j].first] = c;
            else if (!c.is_zero()) out.eta[labels[j]] = c;
        }
        Ops pops = ops;
        pops.n = src.dim();
        auto pv = pops.zero();
        for (std::size_t j = 0; j < src.dim(); ++j) pops.set(pv, j, tops.get(*sol, reps.size() + j));
        out.phi = src.from_vec(pops, pv);
        return out;
    });
}

}  // namespace nalie
