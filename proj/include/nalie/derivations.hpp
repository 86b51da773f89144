#pragma once

/**
 * @file derivations.hpp
 * @brief Special derivations D = sum f_i d/dx_i of O(n, m).
 */

#include <optional>
#include <vector>

#include "divpow.hpp"

namespace nalie {

class SpecialDerivation {
public:
    SpecialDerivation() = default;
    explicit SpecialDerivation(const RingPtr& R) : comps_(R->n(), DPoly(R)) {}
    explicit SpecialDerivation(std::vector<DPoly> comps) : comps_(std::move(comps)) {
        if (comps_.empty()) throw ValidationError("derivation needs at least one component");
        if (comps_.size() != comps_[0].ring()->n())
            throw ValidationError("derivation has " + std::to_string(comps_.size()) +
                                  " components for " + std::to_string(comps_[0].ring()->n()) +
                                  " variables");
        for (const auto& c : comps_) comps_[0].check_same(c);
    }

    /// x^(alpha) d/dx_i.
    static SpecialDerivation basis(const RingPtr& R, Packed alpha, unsigned i) {
        SpecialDerivation D(R);
        D.comps_.at(i) = DPoly::monomial(R, alpha);
        return D;
    }

    const RingPtr& ring() const { return comps_.at(0).ring(); }
    unsigned n() const { return static_cast<unsigned>(comps_.size()); }
    const DPoly& comp(unsigned i) const { return comps_.at(i); }
    DPoly& comp(unsigned i) { return comps_.at(i); }
    const std::vector<DPoly>& comps() const { return comps_; }

    bool is_zero() const {
        for (const auto& c : comps_)
            if (!c.is_zero()) return false;
        return true;
    }

    /// D(f) = sum f_i d_i f.
    DPoly apply(const DPoly& f) const {
        comps_.at(0).check_same(f);
        DPoly r(f.ring());
        for (unsigned i = 0; i < n(); ++i)
            if (!comps_[i].is_zero()) r += comps_[i] * f.partial(i);
        return r;
    }

    SpecialDerivation& operator+=(const SpecialDerivation& o) {
        check_same(o);
        for (unsigned i = 0; i < n(); ++i) comps_[i] += o.comps_[i];
        return *this;
    }
    friend SpecialDerivation operator+(SpecialDerivation a, const SpecialDerivation& b) {
        return a += b;
    }

    SpecialDerivation scaled(Elem c) const {
        SpecialDerivation r = *this;
        for (auto& p : r.comps_) p = p.scaled(c);
        return r;
    }

    /// Grading degree min(|alpha| - 1) over the nonzero terms.
    std::optional<int> degree() const {
        std::optional<int> d;
        for (const auto& c : comps_)
            if (auto o = c.order()) {
                int e = static_cast<int>(*o) - 1;
                if (!d || e < *d) d = e;
            }
        return d;
    }

    friend bool operator==(const SpecialDerivation& a, const SpecialDerivation& b) {
        return a.comps_ == b.comps_;
    }

    void check_same(const SpecialDerivation& o) const {
        if (n() != o.n()) throw ValidationError("derivations over different variable counts");
        comps_.at(0).check_same(o.comps_.at(0));
    }

private:
    std::vector<DPoly> comps_;
};

/// [D1, D2], component i = D1(g_i) + D2(f_i).
inline SpecialDerivation bracket(const SpecialDerivation& D1, const SpecialDerivation& D2) {
    D1.check_same(D2);
    SpecialDerivation r(D1.ring());
    for (unsigned i = 0; i < D1.n(); ++i) r.comp(i) = D1.apply(D2.comp(i)) + D2.apply(D1.comp(i));
    return r;
}

}  // namespace nalie
