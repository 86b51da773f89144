#pragma once

/**
 * @file autom.hpp
 * @brief Admissible automorphisms of O(n, m), their action on functions and forms,
 *        the lambda map, the m~^(j) membership test and the normal form of
 *        Hamiltonian forms under G'.
 */

#include <algorithm>
#include <bit>
#include <optional>
#include <set>
#include <vector>

#include "derivations.hpp"
#include "divpow.hpp"
#include "flaginv.hpp"
#include "forms.hpp"
#include "hamalg.hpp"
#include "linalg.hpp"

namespace nalie {

/// sigma(x_i) = g_i, extended by sigma(x^(alpha)) = prod g_i^(alpha_i).
class AdmissibleAut {
public:
    explicit AdmissibleAut(std::vector<DPoly> images) : g_(std::move(images)) {
        if (g_.empty()) throw ValidationError("automorphism needs at least one image");
        R_ = g_[0].ring();
        const Heights& h = R_->heights();
        const unsigned n = R_->n();
        if (g_.size() != n)
            throw ValidationError("automorphism has " + std::to_string(g_.size()) + " images for " +
                                  std::to_string(n) + " variables");
        for (const auto& g : g_) g_[0].check_same(g);
        const Field& F = R_->field();

        // Linear part: row i holds the coefficients of x_j in g_i.
        for (unsigned i = 0; i < n; ++i) {
            if (!g_[i].constant_term().is_zero())
                throw ValidationError("image of x_" + std::to_string(i + 1) + " has a constant term");
            for (unsigned j = 0; j < n; ++j)
                if (!g_[i].coeff(h.unit(j)).is_zero() && h.height(j) < h.height(i))
                    throw ValidationError("image of x_" + std::to_string(i + 1) + " involves x_" +
                                          std::to_string(j + 1) + " of smaller height");
        }
        bool invertible = with_ops(F, n, [&](auto ops) {
            std::vector<typename decltype(ops)::Vec> rows;
            for (unsigned i = 0; i < n; ++i) {
                auto v = ops.zero();
                for (unsigned j = 0; j < n; ++j) ops.set(v, j, g_[i].coeff(h.unit(j)));
                rows.push_back(std::move(v));
            }
            return rank_of(ops, rows) == n;
        });
        if (!invertible) throw PreconditionError("linear part of the automorphism is not invertible");

        // Divided powers of the images.
        std::vector<std::vector<DPoly>> pw(n);
        for (unsigned i = 0; i < n; ++i) {
            pw[i].push_back(DPoly::one(R_));
            for (unsigned a = 1; a < h.bound(i); ++a) {
                try {
                    pw[i].push_back(divided_power(g_[i], a));
                } catch (const std::runtime_error&) {
                    throw ValidationError("divided power " + std::to_string(a) + " of the image of x_" +
                                          std::to_string(i + 1) + " leaves O(n, m)");
                }
            }
        }
        const Packed dim = static_cast<Packed>(h.dim());
        img_.reserve(dim);
        for (Packed a = 0; a < dim; ++a) {
            DPoly f = DPoly::one(R_);
            for (unsigned i = 0; i < n && !f.is_zero(); ++i) {
                unsigned e = h.exponent(a, i);
                if (e) f = f * pw[i][e];
            }
            img_.push_back(std::move(f));
        }

        in_gprime_ = true;
        identity_ = true;
        for (Packed a = 1; a < dim; ++a) {
            DPoly diff = img_[a] + DPoly::monomial(R_, a);
            if (diff.is_zero()) continue;
            identity_ = false;
            for (auto [b, c] : diff.terms())
                if (std::popcount(b) < 2) in_gprime_ = false;
            unsigned lo = h.degree(a), md = ~0u;
            for (auto [b, c] : diff.terms()) md = std::min(md, h.degree(b));
            int lvl = static_cast<int>(md) - static_cast<int>(lo);
            if (!min_shift_ || lvl < *min_shift_) min_shift_ = lvl;
        }
    }

    static AdmissibleAut identity(const RingPtr& R) {
        std::vector<DPoly> g;
        for (unsigned i = 0; i < R->n(); ++i) g.push_back(DPoly::variable(R, i));
        return AdmissibleAut(std::move(g));
    }

    const RingPtr& ring() const { return R_; }
    unsigned n() const { return R_->n(); }
    const std::vector<DPoly>& images() const { return g_; }
    /// sigma(x^(alpha)) for every packed alpha: the columns of the 2^m x 2^m matrix.
    const std::vector<DPoly>& matrix_columns() const { return img_; }

    bool is_identity() const { return identity_; }
    /// sigma f - f in m^2 for every f.
    bool in_gprime() const { return in_gprime_; }
    /// Largest j with (sigma - id) m^(l) in m^(l + j) for all l; nullopt for the identity.
    std::optional<int> level() const { return min_shift_; }
    /// Whether sigma lies in G'_j.
    bool in_gprime_level(int j) const { return in_gprime_ && (identity_ || *min_shift_ >= j); }

    DPoly apply(const DPoly& f) const {
        g_[0].check_same(f);
        DPoly r(R_);
        for (auto [a, c] : f.terms()) r += img_[a].scaled(c);
        return r;
    }

private:
    RingPtr R_;
    std::vector<DPoly> g_;
    std::vector<DPoly> img_;
    bool in_gprime_ = false;
    bool identity_ = false;
    std::optional<int> min_shift_;
};

inline DPoly apply_aut_poly(const AdmissibleAut& s, const DPoly& f) { return s.apply(f); }

/// sigma(f dx_i) = sigma(f) d(g_i).
inline Form1 apply_aut_form1(const AdmissibleAut& s, const Form1& w) {
    Form1 r(s.ring());
    for (const auto& [g, f] : w.terms()) r += s.apply(f) * d(s.images()[g[0]]);
    return r;
}

/// sigma(f dx_i dx_j) = sigma(f) dg_i dg_j and sigma(f (dx_i)^(2)) = sigma(f) (dg_i)^(2).
inline Form2 apply_aut_form2(const AdmissibleAut& s, const Form2& w) {
    Form2 r(s.ring());
    for (const auto& [g, f] : w.terms()) {
        DPoly sf = s.apply(f);
        Form1 di = d(s.images()[g[0]]);
        if (g[0] == g[1]) r += sf * divided_square(di);
        else r += sf * mul_11(di, d(s.images()[g[1]]));
    }
    return r;
}

/// lambda(c [dz_i dz_j]) = sqrt(c) x_i^(2^{m_i - 1}) x_j^(2^{m_j - 1}).
inline DPoly lambda_map(const EtaClass& eta, const RingPtr& R) {
    const Heights& h = R->heights();
    const Field& F = R->field();
    DPoly r(R);
    for (auto [ij, c] : eta) {
        auto [i, j] = ij;
        if (i >= j || j >= R->n()) throw ValidationError("bad class index pair");
        r.add_term(h.power(i, 1u << (h.height(i) - 1)) | h.power(j, 1u << (h.height(j) - 1)), F.sqrt(c));
    }
    return r;
}

/// D = sum (g_i - x_i) d_i for sigma in G'_j, checked against (sigma - id - D) m^(l) in m^(j + l + 1).
inline SpecialDerivation sigma_to_derivation(const AdmissibleAut& s) {
    if (!s.in_gprime()) throw PreconditionError("automorphism is not in G'");
    const RingPtr& R = s.ring();
    SpecialDerivation D(R);
    if (s.is_identity()) return D;
    for (unsigned i = 0; i < s.n(); ++i) D.comp(i) = s.images()[i] + DPoly::variable(R, i);
    const Heights& h = R->heights();
    const int j = *s.level();
    for (Packed a = 1; a < h.dim(); ++a) {
        DPoly x = DPoly::monomial(R, a);
        DPoly rem = s.apply(x) + x + D.apply(x);
        for (auto [b, c] : rem.terms())
            if (static_cast<int>(h.degree(b)) < j + static_cast<int>(h.degree(a)) + 1)
                throw PreconditionError("remainder condition fails for sigma - id - D");
    }
    return D;
}

/// Matrix of sigma on P = O/K in the basis x^(alpha), alpha != 0 (columns).
inline std::vector<SparseVec> aut_on_P(const AdmissibleAut& s) {
    std::vector<SparseVec> cols;
    const auto& img = s.matrix_columns();
    for (std::size_t a = 1; a < img.size(); ++a) cols.push_back(detail::poly_to_sparse(img[a]));
    return cols;
}

/// sigma [e_a, e_b] = [sigma e_a, sigma e_b] for all basis pairs of P.
inline bool preserves_bracket(const AdmissibleAut& s, const LieAlgebra& P) {
    auto M = aut_on_P(s);
    if (M.size() != P.dim()) throw ValidationError("automorphism and algebra have different sizes");
    const Field& F = P.field();
    auto apply = [&](const SparseVec& v) {
        SparseVec r;
        for (auto [i, c] : v) sparse_axpy(r, c, M[i], F);
        return r;
    };
    for (std::size_t a = 0; a < P.dim(); ++a)
        for (std::size_t b = a + 1; b < P.dim(); ++b)
            if (apply(P.bracket_basis(a, b)) != P.bracket(M[a], M[b])) return false;
    return true;
}

/// I = {i : (M^{-1})_ii != 0} for the constant part of a form.
inline std::set<unsigned> diagonal_support(const Form2& w) {
    PolyMatrix Minv = invert_matrix(matrix_of_form(w.at_origin()));
    std::set<unsigned> I;
    for (unsigned i = 0; i < w.n(); ++i)
        if (!Minv[i][i].constant_term().is_zero()) I.insert(i);
    return I;
}

/// Whether x^(alpha) dx_k lies in the spanning set T of m~^(j) S Omega^1.
inline bool in_tilde_m_monomial(const Heights& h, Packed a, unsigned k, unsigned j, const std::set<unsigned>& I) {
    if (h.degree(a) < j) return false;
    if (!I.count(k)) return true;
    int bits = std::popcount(a);
    if (bits == 2) return false;
    if (bits == 1) {
        for (unsigned q : I)
            if (h.height(q) >= 2 && a == h.power(q, 2)) return false;
    }
    return true;
}

inline bool in_tilde_m(const Form1& phi, unsigned j, const std::set<unsigned>& I) {
    const Heights& h = phi.ring()->heights();
    for (const auto& [g, f] : phi.terms())
        for (auto [a, c] : f.terms())
            if (!in_tilde_m_monomial(h, a, g[0], j, I)) return false;
    return true;
}

struct NormalizedForm {
    Form2 omega0;
    EtaClass eta;
    bool reduced = false;  ///< some i in I has m_i > 1, or no class touches I; all classes were absorbed
};

namespace detail {

inline Matrix constant_matrix(const Form2& w) {
    PolyMatrix M = matrix_of_form(w);
    Matrix b(M.size(), Vector(M.size()));
    for (std::size_t i = 0; i < M.size(); ++i)
        for (std::size_t j = 0; j < M.size(); ++j) b[i][j] = M[i][j].constant_term();
    return b;
}

/// Orthogonal sum of blocks M0, M1 (in either orientation) and 1, in any order.
inline bool is_block_canonical(const Matrix& b) {
    const std::size_t n = b.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> partners;
        for (std::size_t j = 0; j < n; ++j) {
            if (!(b[i][j] == kZero) && !(b[i][j] == kOne)) return false;
            if (j != i && b[i][j] == kOne) partners.push_back(j);
        }
        if (partners.empty()) {
            if (!(b[i][i] == kOne)) return false;
        } else {
            if (partners.size() != 1) return false;
            std::size_t j = partners[0];
            if (b[i][i] == kOne && b[j][j] == kOne) return false;
        }
    }
    return true;
}

/// Taller-variable rule: with dx_i dx_j in omega(0), i, j not in I, m_i < m_j and b_si, b_sj != 0 (s in I), drop b_sj.
inline bool remark1(EtaClass& eta, const Matrix& b0, const std::set<unsigned>& I, const Heights& h) {
    auto get = [&](unsigned p, unsigned q) {
        auto it = eta.find({std::min(p, q), std::max(p, q)});
        return it == eta.end() ? kZero : it->second;
    };
    const unsigned n = h.n();
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            if (i == j || I.count(i) || I.count(j) || b0[i][j].is_zero() || h.height(i) >= h.height(j)) continue;
            for (unsigned s : I)
                if (!get(s, i).is_zero() && !get(s, j).is_zero()) {
                    eta.erase({std::min(s, j), std::max(s, j)});
                    return true;
                }
        }
    return false;
}

/// Outside-I rule: sum_{i in I} b_ij [dz_i dz_j], j not in I, becomes c_sj [dz_s dz_j] with s minimal.
inline bool remark2(EtaClass& eta, const std::set<unsigned>& I, unsigned n) {
    bool changed = false;
    for (unsigned j = 0; j < n; ++j) {
        if (I.count(j)) continue;
        std::vector<unsigned> support;
        Elem c = kZero;
        for (unsigned i : I) {
            auto it = eta.find({std::min(i, j), std::max(i, j)});
            if (it != eta.end()) {
                support.push_back(i);
                c += it->second;
            }
        }
        if (support.size() < 2) continue;
        for (unsigned i : support) eta.erase({std::min(i, j), std::max(i, j)});
        unsigned s = support.front();
        if (!c.is_zero()) eta[{std::min(s, j), std::max(s, j)}] = c;
        changed = true;
    }
    return changed;
}

/// Triangle rule: b [dz_i dz_s] + b [dz_j dz_s] with i, j, s in I becomes b [dz_i dz_j].
inline bool remark3(EtaClass& eta, const std::set<unsigned>& I) {
    auto key = [](unsigned p, unsigned q) { return std::make_pair(std::min(p, q), std::max(p, q)); };
    for (unsigned s : I)
        for (unsigned i : I)
            for (unsigned j : I) {
                if (i == s || j == s || j <= i) continue;
                auto a = eta.find(key(i, s)), b = eta.find(key(j, s));
                if (a == eta.end() || b == eta.end() || !(a->second == b->second)) continue;
                Elem c = a->second;
                eta.erase(a);
                eta.erase(key(j, s));
                Elem& t = eta[key(i, j)];
                t += c;
                if (t.is_zero()) eta.erase(key(i, j));
                return true;
            }
    return false;
}

}  // namespace detail

/**
 * Representative of the G'-orbit of omega: omega(0) plus the residual classes
 * allowed when every i in I has m_i = 1 and some class touches I, after the taller-variable, outside-I and triangle rules.
 */
inline NormalizedForm normalize_form(const Form2& w) {
    const RingPtr& R = w.ring();
    const Heights& h = R->heights();
    const unsigned n = R->n();
    if (!is_closed(w)) throw PreconditionError("form is not closed");
    if (!is_nondegenerate(w)) throw PreconditionError("form is degenerate at the origin");
    if (is_alternating(w)) throw PreconditionError("form is alternating");

    Form2 w0 = w.at_origin();
    Matrix b0 = detail::constant_matrix(w0);
    if (!detail::is_block_canonical(b0)) throw PreconditionError("omega(0) is not a sum of M0, M1 and 1 blocks");

    std::set<unsigned> I = diagonal_support(w0);
    H2Class cls = h2_class(w);

    bool tall = false;
    for (unsigned i : I)
        if (h.height(i) > 1) tall = true;
    bool outside_only = true;
    for (auto [ij, c] : cls.eta)
        if (I.count(ij.first) || I.count(ij.second)) outside_only = false;
    bool untouched = !tall && outside_only;

    NormalizedForm out{w0, {}, tall || untouched};
    if (out.reduced) return out;

    for (auto [ij, c] : cls.eta)
        if (I.count(ij.first) || I.count(ij.second)) out.eta[ij] = c;
    while (detail::remark1(out.eta, b0, I, h) || detail::remark2(out.eta, I, n) || detail::remark3(out.eta, I)) {
    }
    return out;
}

}  // namespace nalie
