#pragma once

/**
 * @file divpow.hpp
 * @brief The divided power algebra O(n, m) over GF(2^k).
 *
 * A basis monomial x^(alpha) with alpha_i < 2^{m_i} is stored as a packed
 * word: the exponent alpha_i occupies m_i bits starting at bit
 * m_1 + ... + m_{i-1}.  In characteristic 2 Lucas' theorem makes
 * x^(alpha) x^(beta) equal to x^(alpha|beta) when alpha & beta == 0 and
 * zero otherwise, so multiplication is two bit operations.
 */

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "field.hpp"

namespace nalie {

using Packed = std::uint32_t;

class Heights {
public:
    static constexpr unsigned kMaxTotal = 24;

    Heights() = default;

    explicit Heights(std::vector<unsigned> m) : m_(std::move(m)) {
        if (m_.empty()) throw ValidationError("heights must be non-empty");
        unsigned off = 0;
        for (std::size_t i = 0; i < m_.size(); ++i) {
            if (m_[i] < 1)
                throw ValidationError("height m_" + std::to_string(i + 1) + " must be >= 1");
            offset_.push_back(off);
            off += m_[i];
            if (off > kMaxTotal)
                throw ValidationError("sum of heights exceeds " + std::to_string(kMaxTotal));
        }
        total_ = off;
    }

    unsigned n() const { return static_cast<unsigned>(m_.size()); }
    unsigned height(unsigned i) const { return m_.at(i); }
    const std::vector<unsigned>& heights() const { return m_; }
    unsigned total() const { return total_; }
    /// dim O(n, m) = 2^m.
    std::uint64_t dim() const { return std::uint64_t{1} << total_; }
    unsigned offset(unsigned i) const { return offset_[i]; }
    Packed field_mask(unsigned i) const { return ((Packed{1} << m_[i]) - 1) << offset_[i]; }
    unsigned bound(unsigned i) const { return 1u << m_[i]; }

    unsigned exponent(Packed a, unsigned i) const { return (a >> offset_[i]) & ((1u << m_[i]) - 1); }

    Packed pack(const std::vector<unsigned>& alpha) const {
        if (alpha.size() != m_.size())
            throw ValidationError("multi-index has " + std::to_string(alpha.size()) +
                                  " entries, expected " + std::to_string(m_.size()));
        Packed p = 0;
        for (unsigned i = 0; i < n(); ++i) {
            if (alpha[i] >= bound(i))
                throw ValidationError("exponent " + std::to_string(alpha[i]) + " of x_" +
                                      std::to_string(i + 1) + " exceeds 2^" +
                                      std::to_string(m_[i]) + " - 1");
            p |= static_cast<Packed>(alpha[i]) << offset_[i];
        }
        return p;
    }

    std::vector<unsigned> unpack(Packed a) const {
        std::vector<unsigned> r(n());
        for (unsigned i = 0; i < n(); ++i) r[i] = exponent(a, i);
        return r;
    }

    /// |alpha| = sum of exponents.
    unsigned degree(Packed a) const {
        unsigned d = 0;
        for (unsigned i = 0; i < n(); ++i) d += exponent(a, i);
        return d;
    }

    /// x_i^(2^{m_i} - 1), the top power of one variable.
    Packed top(unsigned i) const { return field_mask(i); }
    /// delta = (2^{m_1}-1, ..., 2^{m_n}-1).
    Packed delta() const { return static_cast<Packed>(dim() - 1); }
    /// epsilon_i.
    Packed unit(unsigned i) const { return Packed{1} << offset_[i]; }
    /// x_i^(e) as a packed index.
    Packed power(unsigned i, unsigned e) const {
        if (e >= bound(i)) throw ValidationError("exponent out of range");
        return static_cast<Packed>(e) << offset_[i];
    }

    friend bool operator==(const Heights& a, const Heights& b) { return a.m_ == b.m_; }

private:
    std::vector<unsigned> m_;
    std::vector<unsigned> offset_;
    unsigned total_ = 0;
};

/// Product of basis monomials; empty when the product vanishes.
inline std::optional<Packed> mono_mul(Packed a, Packed b) {
    if (a & b) return std::nullopt;
    return a | b;
}

/// O(n, m) over GF(2^k).
class DivPowRing {
public:
    DivPowRing(Heights h, const Field& f) : h_(std::move(h)), f_(&f) {}

    static std::shared_ptr<const DivPowRing> make(std::vector<unsigned> m, unsigned k) {
        return std::make_shared<const DivPowRing>(Heights(std::move(m)), Field::gf(k));
    }

    const Heights& heights() const { return h_; }
    const Field& field() const { return *f_; }
    unsigned n() const { return h_.n(); }

    friend bool operator==(const DivPowRing& a, const DivPowRing& b) {
        return a.h_ == b.h_ && *a.f_ == *b.f_;
    }

private:
    Heights h_;
    const Field* f_;
};

using RingPtr = std::shared_ptr<const DivPowRing>;

class DPoly {
public:
    using Terms = std::map<Packed, Elem>;

    DPoly() = default;
    explicit DPoly(RingPtr r) : r_(std::move(r)) {}

    static DPoly constant(const RingPtr& r, Elem c) { return monomial(r, 0, c); }
    static DPoly one(const RingPtr& r) { return constant(r, kOne); }
    static DPoly monomial(const RingPtr& r, Packed a, Elem c = kOne) {
        DPoly p(r);
        if (a >= r->heights().dim()) throw ValidationError("monomial out of range");
        if (!c.is_zero()) p.t_[a] = c;
        return p;
    }
    static DPoly variable(const RingPtr& r, unsigned i) {
        return monomial(r, r->heights().unit(i));
    }

    const RingPtr& ring() const { return r_; }
    const Heights& heights() const { return r_->heights(); }
    const Field& field() const { return r_->field(); }
    const Terms& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    std::size_t size() const { return t_.size(); }

    Elem coeff(Packed a) const {
        auto it = t_.find(a);
        return it == t_.end() ? kZero : it->second;
    }
    Elem constant_term() const { return coeff(0); }

    void add_term(Packed a, Elem c) {
        if (c.is_zero()) return;
        auto [it, fresh] = t_.emplace(a, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) t_.erase(it);
        }
    }

    DPoly& operator+=(const DPoly& o) {
        check_same(o);
        for (auto [a, c] : o.t_) add_term(a, c);
        return *this;
    }
    friend DPoly operator+(DPoly a, const DPoly& b) { return a += b; }
    friend DPoly operator-(DPoly a, const DPoly& b) { return a += b; }

    DPoly scaled(Elem c) const {
        DPoly p(r_);
        if (c.is_zero()) return p;
        for (auto [a, x] : t_) p.t_.emplace_hint(p.t_.end(), a, field().mul(c, x));
        return p;
    }

    friend DPoly operator*(const DPoly& f, const DPoly& g) {
        f.check_same(g);
        DPoly p(f.r_);
        const Field& F = f.field();
        for (auto [a, x] : f.t_)
            for (auto [b, y] : g.t_)
                if ((a & b) == 0) p.add_term(a | b, F.mul(x, y));
        return p;
    }
    DPoly& operator*=(const DPoly& o) { return *this = *this * o; }

    /// d/dx_i x^(alpha) = x^(alpha - eps_i).
    DPoly partial(unsigned i) const {
        DPoly p(r_);
        const Heights& h = heights();
        if (i >= h.n()) throw ValidationError("variable index out of range");
        Packed mask = h.field_mask(i), u = h.unit(i);
        for (auto [a, c] : t_)
            if (a & mask) p.t_.emplace(a - u, c);
        return p;
    }

    /// Smallest |alpha| among the terms; empty for the zero polynomial.
    std::optional<unsigned> order() const {
        std::optional<unsigned> d;
        for (auto [a, c] : t_) {
            unsigned e = heights().degree(a);
            if (!d || e < *d) d = e;
        }
        return d;
    }

    /// Whether f lies in m^(j), the span of x^(alpha) with |alpha| >= j.
    bool in_filtration(unsigned j) const {
        auto d = order();
        return !d || *d >= j;
    }

    DPoly without_constant() const {
        DPoly p = *this;
        p.t_.erase(0);
        return p;
    }

    friend bool operator==(const DPoly& a, const DPoly& b) {
        if (a.r_ && b.r_ && !(*a.r_ == *b.r_)) return false;
        return a.t_ == b.t_;
    }

    void check_same(const DPoly& o) const {
        if (!r_ || !o.r_) throw ValidationError("polynomial without ambient algebra");
        if (r_ != o.r_ && !(*r_ == *o.r_))
            throw ValidationError("polynomials live in different divided power algebras");
    }

private:
    RingPtr r_;
    Terms t_;
};

namespace detail {

inline unsigned v2_factorial(std::uint64_t n) {
    return static_cast<unsigned>(n - static_cast<std::uint64_t>(std::popcount(n)));
}

/// Parity of (l s)! / ((l!)^s s!), the coefficient of (x^(l))^(s).
inline bool single_power_odd(std::uint64_t l, std::uint64_t s) {
    std::uint64_t v = v2_factorial(l * s);
    std::uint64_t w = s * v2_factorial(l) + v2_factorial(s);
    return v == w;
}

using Wide = std::vector<std::uint64_t>;
using WidePoly = std::map<Wide, Elem>;

inline WidePoly wide_mul(const WidePoly& f, const WidePoly& g, const Field& F) {
    WidePoly r;
    for (const auto& [a, x] : f)
        for (const auto& [b, y] : g) {
            bool ok = true;
            Wide c(a.size());
            for (std::size_t i = 0; i < a.size() && ok; ++i) {
                if (a[i] & b[i]) ok = false;
                c[i] = a[i] + b[i];
            }
            if (!ok) continue;
            Elem v = F.mul(x, y);
            auto [it, fresh] = r.emplace(std::move(c), v);
            if (!fresh) {
                it->second += v;
                if (it->second.is_zero()) r.erase(it);
            }
        }
    return r;
}

inline void wide_add(WidePoly& f, const WidePoly& g) {
    for (const auto& [a, x] : g) {
        auto [it, fresh] = f.emplace(a, x);
        if (!fresh) {
            it->second += x;
            if (it->second.is_zero()) f.erase(it);
        }
    }
}

}  // namespace detail

/**
 * f^(r) for f in the maximal ideal, by the multinomial rule
 * (sum u_t)^(r) = sum over r_1 + ... = r of prod u_t^(r_t).
 * Computed with unbounded exponents; throws if a surviving term leaves O(n, m).
 */
inline DPoly divided_power(const DPoly& f, unsigned r) {
    const RingPtr& R = f.ring();
    if (r == 0) return DPoly::one(R);
    if (!f.constant_term().is_zero())
        throw PreconditionError("divided power of a polynomial with nonzero constant term");
    if (r == 1) return f;
    const Heights& h = R->heights();
    const Field& F = R->field();
    const unsigned n = h.n();

    std::vector<detail::WidePoly> state(r + 1);
    state[0][detail::Wide(n, 0)] = kOne;
    for (auto [a, c] : f.terms()) {
        auto alpha = h.unpack(a);
        unsigned nonzero = 0, var = 0;
        for (unsigned i = 0; i < n; ++i)
            if (alpha[i]) { ++nonzero; var = i; }
        bool single = nonzero == 1 && std::popcount(alpha[var]) >= 1;
        std::vector<detail::WidePoly> next(r + 1);
        for (unsigned s = 0; s <= r; ++s) {
            if (state[s].empty()) continue;
            for (unsigned t = 0; s + t <= r; ++t) {
                detail::WidePoly p;
                if (t == 0) {
                    p[detail::Wide(n, 0)] = kOne;
                } else if (t == 1) {
                    detail::Wide w(alpha.begin(), alpha.end());
                    p[w] = c;
                } else {
                    if (!single) break;
                    // x_i^(l) is indecomposable only when l is a power of two,
                    // but the parity formula covers every l.
                    if (!detail::single_power_odd(alpha[var], t)) continue;
                    detail::Wide w(n, 0);
                    w[var] = static_cast<std::uint64_t>(alpha[var]) * t;
                    p[w] = F.pow(c, t);
                }
                detail::wide_add(next[s + t], detail::wide_mul(state[s], p, F));
            }
        }
        state = std::move(next);
    }
    DPoly out(R);
    for (const auto& [w, c] : state[r]) {
        std::vector<unsigned> e(n);
        for (unsigned i = 0; i < n; ++i) {
            if (w[i] >= h.bound(i))
                throw PreconditionError("divided power leaves O(n, m): exponent " +
                                        std::to_string(w[i]) + " of x_" + std::to_string(i + 1));
            e[i] = static_cast<unsigned>(w[i]);
        }
        out.add_term(h.pack(e), c);
    }
    return out;
}

/// Inverse of a unit, c^{-1} (1 + u + u^2 + ...) with u = 1 - f/c.
inline DPoly poly_inverse(const DPoly& f) {
    Elem c = f.constant_term();
    if (c.is_zero()) throw PreconditionError("polynomial with zero constant term is not invertible");
    const Field& F = f.field();
    Elem ci = F.inv(c);
    DPoly u = DPoly::one(f.ring()) - f.scaled(ci);
    DPoly sum(f.ring());
    DPoly term = DPoly::one(f.ring());
    while (!term.is_zero()) {
        sum += term;
        term = term * u;
    }
    return sum.scaled(ci);
}

}  // namespace nalie
