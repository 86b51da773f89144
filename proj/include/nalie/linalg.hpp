#pragma once

/**
 * @file linalg.hpp
 * @brief Exact linear algebra over GF(2^k).
 *
 * Algorithms are written against a small vector-arithmetic policy:
 * `Gf2Ops` packs GF(2) vectors into 64-bit words, `GfqOps` stores one
 * element per entry.  Use `with_ops` to pick the policy for a field.
 */

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "error.hpp"
#include "field.hpp"

namespace nalie {

struct Gf2Ops {
    using Vec = std::vector<std::uint64_t>;
    std::size_t n = 0;

    explicit Gf2Ops(std::size_t dim) : n(dim) {}

    std::size_t words() const { return (n + 63) / 64; }
    Vec zero() const { return Vec(words(), 0); }
    Vec unit(std::size_t i) const {
        Vec v = zero();
        v[i / 64] |= std::uint64_t{1} << (i % 64);
        return v;
    }
    Elem get(const Vec& v, std::size_t i) const { return Elem((v[i / 64] >> (i % 64)) & 1); }
    void set(Vec& v, std::size_t i, Elem c) const {
        std::uint64_t bit = std::uint64_t{1} << (i % 64);
        if (c.v & 1) v[i / 64] |= bit;
        else v[i / 64] &= ~bit;
    }
    void add(Vec& y, std::size_t i, Elem c) const {
        if (c.v & 1) y[i / 64] ^= std::uint64_t{1} << (i % 64);
    }
    void axpy(Vec& y, Elem a, const Vec& x) const {
        if (!(a.v & 1)) return;
        for (std::size_t w = 0; w < y.size(); ++w) y[w] ^= x[w];
    }
    void scale(Vec& y, Elem a) const {
        if (!(a.v & 1)) std::fill(y.begin(), y.end(), 0);
    }
    Elem inv(Elem a) const {
        if (!(a.v & 1)) throw PreconditionError("division by zero in GF(2)");
        return kOne;
    }
    Elem mul(Elem a, Elem b) const { return Elem(a.v & b.v); }
    std::optional<std::size_t> lead(const Vec& v) const {
        for (std::size_t w = 0; w < v.size(); ++w)
            if (v[w]) return w * 64 + static_cast<std::size_t>(std::countr_zero(v[w]));
        return std::nullopt;
    }
    bool is_zero(const Vec& v) const {
        for (auto w : v)
            if (w) return false;
        return true;
    }
    Elem dot(const Vec& a, const Vec& b) const {
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < a.size(); ++w) acc ^= a[w] & b[w];
        return Elem(static_cast<std::uint32_t>(std::popcount(acc) & 1));
    }
    std::size_t field_order() const { return 2; }
    Elem element(std::size_t i) const { return Elem(static_cast<std::uint32_t>(i)); }
};

struct GfqOps {
    using Vec = std::vector<Elem>;
    const Field* F = nullptr;
    std::size_t n = 0;

    GfqOps(const Field& f, std::size_t dim) : F(&f), n(dim) {}

    Vec zero() const { return Vec(n, kZero); }
    Vec unit(std::size_t i) const {
        Vec v = zero();
        v[i] = kOne;
        return v;
    }
    Elem get(const Vec& v, std::size_t i) const { return v[i]; }
    void set(Vec& v, std::size_t i, Elem c) const { v[i] = c; }
    void add(Vec& y, std::size_t i, Elem c) const { y[i] += c; }
    void axpy(Vec& y, Elem a, const Vec& x) const {
        if (a.is_zero()) return;
        if (a.is_one()) {
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += x[i];
            return;
        }
        for (std::size_t i = 0; i < y.size(); ++i)
            if (!x[i].is_zero()) y[i] += F->mul(a, x[i]);
    }
    void scale(Vec& y, Elem a) const {
        for (auto& e : y) e = F->mul(a, e);
    }
    Elem inv(Elem a) const { return F->inv(a); }
    Elem mul(Elem a, Elem b) const { return F->mul(a, b); }
    std::optional<std::size_t> lead(const Vec& v) const {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!v[i].is_zero()) return i;
        return std::nullopt;
    }
    bool is_zero(const Vec& v) const {
        return std::all_of(v.begin(), v.end(), [](Elem e) { return e.is_zero(); });
    }
    Elem dot(const Vec& a, const Vec& b) const {
        Elem s;
        for (std::size_t i = 0; i < a.size(); ++i) s += F->mul(a[i], b[i]);
        return s;
    }
    std::size_t field_order() const { return F->order(); }
    Elem element(std::size_t i) const { return Elem(static_cast<std::uint32_t>(i)); }
};

/// Calls f with the fastest vector policy for the field.
template <class Fn>
decltype(auto) with_ops(const Field& F, std::size_t n, Fn&& f) {
    if (F.degree() == 1) return f(Gf2Ops(n));
    return f(GfqOps(F, n));
}

template <class Ops>
std::vector<Elem> to_elems(const Ops& ops, const typename Ops::Vec& v) {
    std::vector<Elem> r(ops.n);
    for (std::size_t i = 0; i < ops.n; ++i) r[i] = ops.get(v, i);
    return r;
}

template <class Ops>
typename Ops::Vec from_elems(const Ops& ops, const std::vector<Elem>& e) {
    auto v = ops.zero();
    for (std::size_t i = 0; i < e.size(); ++i) ops.set(v, i, e[i]);
    return v;
}

/**
 * Incrementally built reduced row echelon basis of a subspace.
 * Every stored row has leading entry 1 and is zero in the pivot columns of
 * all other rows.
 */
template <class Ops>
class Echelon {
public:
    using Vec = typename Ops::Vec;

    explicit Echelon(Ops ops) : ops_(std::move(ops)) {}

    const Ops& ops() const { return ops_; }
    std::size_t rank() const { return rows_.size(); }
    const std::vector<Vec>& rows() const { return rows_; }
    const std::vector<std::size_t>& pivots() const { return piv_; }
    bool full() const { return rows_.size() == ops_.n; }

    Vec reduce(Vec v) const {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            Elem c = ops_.get(v, piv_[r]);
            if (!c.is_zero()) ops_.axpy(v, c, rows_[r]);
        }
        return v;
    }

    bool contains(const Vec& v) const { return ops_.is_zero(reduce(v)); }

    /// Adds v; returns false if v was already in the span.
    bool insert(const Vec& v) { return insert_reduced(reduce(v)); }

    bool insert_reduced(Vec v) {
        auto p = ops_.lead(v);
        if (!p) return false;
        ops_.scale(v, ops_.inv(ops_.get(v, *p)));
        for (auto& row : rows_) {
            Elem c = ops_.get(row, *p);
            if (!c.is_zero()) ops_.axpy(row, c, v);
        }
        rows_.push_back(std::move(v));
        piv_.push_back(*p);
        return true;
    }

    /// Coordinates of v (which must lie in the span) w.r.t. rows().
    std::vector<Elem> coords(const Vec& v) const {
        std::vector<Elem> c(rows_.size());
        for (std::size_t r = 0; r < rows_.size(); ++r) c[r] = ops_.get(v, piv_[r]);
        return c;
    }

    /// Rows sorted by pivot column.
    std::vector<Vec> sorted_rows() const {
        std::vector<std::size_t> idx(rows_.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return piv_[a] < piv_[b]; });
        std::vector<Vec> out;
        for (auto i : idx) out.push_back(rows_[i]);
        return out;
    }

private:
    Ops ops_;
    std::vector<Vec> rows_;
    std::vector<std::size_t> piv_;
};

/**
 * Echelon basis that remembers, for each row, which combination of the
 * inserted vectors produced it.  Gives kernels and solutions of linear systems.
 */
template <class Ops>
class TrackedEchelon {
public:
    using Vec = typename Ops::Vec;

    TrackedEchelon(Ops space, Ops track) : ops_(std::move(space)), tops_(std::move(track)) {}

    /// Inserts v with history h; returns the history of a dependency if v reduced to zero.
    std::optional<Vec> insert(Vec v, Vec h) {
        reduce(v, h);
        auto p = ops_.lead(v);
        if (!p) return h;
        Elem s = ops_.inv(ops_.get(v, *p));
        ops_.scale(v, s);
        tops_.scale(h, s);
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            Elem c = ops_.get(rows_[r], *p);
            if (!c.is_zero()) {
                ops_.axpy(rows_[r], c, v);
                tops_.axpy(hist_[r], c, h);
            }
        }
        rows_.push_back(std::move(v));
        hist_.push_back(std::move(h));
        piv_.push_back(*p);
        return std::nullopt;
    }

    /// History expressing v as a combination of inserted vectors, if possible.
    std::optional<Vec> express(Vec v) const {
        Vec h = tops_.zero();
        reduce(v, h);
        if (!ops_.is_zero(v)) return std::nullopt;
        return h;
    }

    std::size_t rank() const { return rows_.size(); }

private:
    void reduce(Vec& v, Vec& h) const {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            Elem c = ops_.get(v, piv_[r]);
            if (!c.is_zero()) {
                ops_.axpy(v, c, rows_[r]);
                tops_.axpy(h, c, hist_[r]);
            }
        }
    }

    Ops ops_, tops_;
    std::vector<Vec> rows_, hist_;
    std::vector<std::size_t> piv_;
};

/// Matrix stored by columns.
template <class Ops>
struct DenseMat {
    using Vec = typename Ops::Vec;
    Ops rows;   ///< policy for column vectors (length = number of rows)
    std::vector<Vec> cols;

    explicit DenseMat(Ops r) : rows(std::move(r)) {}

    std::size_t nrows() const { return rows.n; }
    std::size_t ncols() const { return cols.size(); }

    Vec apply(const Vec& v) const {
        Vec y = rows.zero();
        for (std::size_t j = 0; j < cols.size(); ++j) {
            Elem c = rows.get(v, j);
            if (!c.is_zero()) rows.axpy(y, c, cols[j]);
        }
        return y;
    }

    /// w^T M, returned as a column-indexed vector (square matrices only).
    Vec apply_transpose(const Vec& w) const {
        Vec y = rows.zero();
        for (std::size_t j = 0; j < cols.size(); ++j) rows.set(y, j, rows.dot(cols[j], w));
        return y;
    }

    Elem at(std::size_t i, std::size_t j) const { return rows.get(cols[j], i); }

    static DenseMat identity(const Ops& ops) {
        DenseMat m(ops);
        for (std::size_t j = 0; j < ops.n; ++j) m.cols.push_back(ops.unit(j));
        return m;
    }

    DenseMat transpose() const {
        DenseMat t(rows);
        for (std::size_t i = 0; i < nrows(); ++i) {
            Vec c = rows.zero();
            for (std::size_t j = 0; j < ncols(); ++j) rows.set(c, j, at(i, j));
            t.cols.push_back(std::move(c));
        }
        return t;
    }

    friend DenseMat operator*(const DenseMat& a, const DenseMat& b) {
        DenseMat c(a.rows);
        for (const auto& col : b.cols) c.cols.push_back(a.apply(col));
        return c;
    }

    void add_scaled(const DenseMat& o, Elem s) {
        for (std::size_t j = 0; j < cols.size(); ++j) rows.axpy(cols[j], s, o.cols[j]);
    }

    void add_diagonal(Elem s) {
        for (std::size_t j = 0; j < cols.size(); ++j) rows.add(cols[j], j, s);
    }
};

/// Rank of the span of the given vectors.
template <class Ops>
std::size_t rank_of(const Ops& ops, const std::vector<typename Ops::Vec>& vs) {
    Echelon<Ops> e(ops);
    for (const auto& v : vs) {
        e.insert(v);
        if (e.full()) break;
    }
    return e.rank();
}

/// Basis of {x : sum_j x_j cols[j] = 0}; `tops` must have dimension cols.size().
template <class Ops>
std::vector<typename Ops::Vec> kernel_of(const Ops& ops, const Ops& tops,
                                         const std::vector<typename Ops::Vec>& cols) {
    TrackedEchelon<Ops> te(ops, tops);
    std::vector<typename Ops::Vec> out;
    for (std::size_t j = 0; j < cols.size(); ++j)
        if (auto dep = te.insert(cols[j], tops.unit(j))) out.push_back(std::move(*dep));
    return out;
}

template <class Ops>
std::vector<typename Ops::Vec> kernel_of(const DenseMat<Ops>& m) {
    Ops t = m.rows;
    t.n = m.ncols();
    return kernel_of(m.rows, t, m.cols);
}

/// Smallest subspace containing `start` and invariant under every generator.
template <class Ops>
Echelon<Ops> spin(const std::vector<const DenseMat<Ops>*>& gens,
                  const std::vector<typename Ops::Vec>& start, const Ops& ops,
                  bool transpose = false) {
    Echelon<Ops> e(ops);
    std::deque<typename Ops::Vec> todo;
    for (const auto& v : start) {
        auto r = e.reduce(v);
        if (e.insert_reduced(r)) todo.push_back(v);
    }
    while (!todo.empty() && !e.full()) {
        auto v = std::move(todo.front());
        todo.pop_front();
        for (const auto* g : gens) {
            auto w = transpose ? g->apply_transpose(v) : g->apply(v);
            auto r = e.reduce(w);
            if (!ops.is_zero(r)) {
                e.insert_reduced(r);
                todo.push_back(std::move(w));
                if (e.full()) break;
            }
        }
    }
    return e;
}

/// Calls f on one representative of every 1-dimensional subspace of span(basis).
template <class Ops, class Fn>
bool for_each_projective_point(const Ops& ops, const std::vector<typename Ops::Vec>& basis,
                               Fn&& f) {
    const std::size_t d = basis.size();
    const std::size_t q = ops.field_order();
    // The first nonzero coordinate is normalised to 1.
    for (std::size_t lead = 0; lead < d; ++lead) {
        std::size_t rest = d - lead - 1;
        std::uint64_t total = 1;
        for (std::size_t i = 0; i < rest; ++i) total *= q;
        for (std::uint64_t code = 0; code < total; ++code) {
            auto v = basis[lead];
            std::uint64_t c = code;
            for (std::size_t i = 0; i < rest; ++i) {
                ops.axpy(v, ops.element(c % q), basis[lead + 1 + i]);
                c /= q;
            }
            if (!f(v)) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Sparse vectors

using SparseVec = std::vector<std::pair<std::uint32_t, Elem>>;

inline void sparse_axpy(SparseVec& y, Elem a, const SparseVec& x, const Field& F) {
    if (a.is_zero() || x.empty()) return;
    SparseVec out;
    out.reserve(y.size() + x.size());
    std::size_t i = 0, j = 0;
    while (i < y.size() || j < x.size()) {
        if (j == x.size() || (i < y.size() && y[i].first < x[j].first)) {
            out.push_back(y[i++]);
        } else if (i == y.size() || x[j].first < y[i].first) {
            out.emplace_back(x[j].first, F.mul(a, x[j].second));
            ++j;
        } else {
            Elem c = y[i].second + F.mul(a, x[j].second);
            if (!c.is_zero()) out.emplace_back(y[i].first, c);
            ++i;
            ++j;
        }
    }
    y = std::move(out);
}

inline Elem sparse_get(const SparseVec& v, std::uint32_t i) {
    auto it = std::lower_bound(v.begin(), v.end(), i,
                               [](const auto& p, std::uint32_t k) { return p.first < k; });
    return (it != v.end() && it->first == i) ? it->second : kZero;
}

/// Echelon basis of sparse vectors, keyed by leading index.
class SparseEchelon {
public:
    explicit SparseEchelon(const Field& F, std::size_t n) : F_(&F), n_(n), row_of_(n, -1) {}

    std::size_t rank() const { return rows_.size(); }
    bool full() const { return rows_.size() == n_; }

    SparseVec reduce(SparseVec v) const {
        while (!v.empty()) {
            auto [i, c] = v.front();
            int r = row_of_[i];
            if (r < 0) break;
            sparse_axpy(v, c, rows_[static_cast<std::size_t>(r)], *F_);
        }
        // Leading entry is now free; reduce the tail too.
        for (std::size_t k = 1; k < v.size();) {
            auto [i, c] = v[k];
            int r = row_of_[i];
            if (r < 0) { ++k; continue; }
            sparse_axpy(v, c, rows_[static_cast<std::size_t>(r)], *F_);
        }
        return v;
    }

    bool insert(const SparseVec& v) {
        SparseVec r = reduce(v);
        if (r.empty()) return false;
        Elem s = F_->inv(r.front().second);
        for (auto& [i, c] : r) c = F_->mul(s, c);
        row_of_[r.front().first] = static_cast<int>(rows_.size());
        rows_.push_back(std::move(r));
        return true;
    }

    bool contains(const SparseVec& v) const { return reduce(v).empty(); }

    /// Fully reduced basis, sorted by leading index.
    std::vector<SparseVec> reduced_basis() const {
        std::vector<SparseVec> out;
        for (std::size_t i = 0; i < n_; ++i)
            if (row_of_[i] >= 0) out.push_back(reduce_tail(rows_[static_cast<std::size_t>(row_of_[i])]));
        return out;
    }

private:
    SparseVec reduce_tail(SparseVec v) const {
        for (std::size_t k = 1; k < v.size();) {
            auto [i, c] = v[k];
            int r = row_of_[i];
            if (r < 0) { ++k; continue; }
            sparse_axpy(v, c, rows_[static_cast<std::size_t>(r)], *F_);
        }
        return v;
    }

    const Field* F_;
    std::size_t n_;
    std::vector<int> row_of_;
    std::vector<SparseVec> rows_;
};

}  // namespace nalie
