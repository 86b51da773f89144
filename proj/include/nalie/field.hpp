#pragma once

/**
 * @file field.hpp
 * @brief Arithmetic in GF(2^k), 1 <= k <= 16.
 *
 * GF(2^k) is realised as GF(2)[x]/(p_k) where p_k is the lexicographically
 * least irreducible polynomial of degree k (for k = 1 the polynomial x + 1):
 *
 * | k | p_k  | k  | p_k    |
 * |---|------|----|--------|
 * | 1 | 0x3  | 9  | 0x203  |
 * | 2 | 0x7  | 10 | 0x409  |
 * | 3 | 0xb  | 11 | 0x805  |
 * | 4 | 0x13 | 12 | 0x1009 |
 * | 5 | 0x25 | 13 | 0x201b |
 * | 6 | 0x43 | 14 | 0x4021 |
 * | 7 | 0x83 | 15 | 0x8003 |
 * | 8 | 0x11b| 16 | 0x1002b|
 *
 * An element is stored as the bit vector of its residue (bit i is the
 * coefficient of x^i) and serialised as lowercase hex of that bit vector.
 * Multiplication goes through log/antilog tables built from the least
 * primitive element.
 */

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace nalie {

struct Elem {
    std::uint32_t v = 0;

    constexpr Elem() = default;
    constexpr explicit Elem(std::uint32_t bits) : v(bits) {}

    constexpr bool is_zero() const { return v == 0; }
    constexpr bool is_one() const { return v == 1; }
    friend constexpr Elem operator+(Elem a, Elem b) { return Elem(a.v ^ b.v); }
    friend constexpr Elem operator-(Elem a, Elem b) { return Elem(a.v ^ b.v); }
    constexpr Elem& operator+=(Elem b) { v ^= b.v; return *this; }
    friend constexpr bool operator==(Elem a, Elem b) { return a.v == b.v; }
    friend constexpr auto operator<=>(Elem a, Elem b) { return a.v <=> b.v; }
};

inline constexpr Elem kZero{0};
inline constexpr Elem kOne{1};

class Field {
public:
    static constexpr unsigned kMaxDegree = 16;

    /// Shared instance of GF(2^k).
    static const Field& gf(unsigned k) {
        if (k < 1 || k > kMaxDegree)
            throw ValidationError("field degree must be in 1..16, got " + std::to_string(k));
        static std::array<std::unique_ptr<Field>, kMaxDegree + 1> cache;
        static std::array<std::once_flag, kMaxDegree + 1> flags;
        std::call_once(flags[k], [k] { cache[k].reset(new Field(k)); });
        return *cache[k];
    }

    static constexpr std::uint32_t modulus_for(unsigned k) {
        constexpr std::uint32_t table[kMaxDegree + 1] = {
            0,     0x3,   0x7,    0xb,    0x13,   0x25,   0x43,   0x83,  0x11b,
            0x203, 0x409, 0x805, 0x1009, 0x201b, 0x4021, 0x8003, 0x1002b};
        return table[k];
    }

    unsigned degree() const { return k_; }
    std::uint32_t order() const { return q_; }
    std::uint32_t modulus() const { return modulus_for(k_); }
    Elem generator() const { return Elem(exp_[1]); }
    bool is_prime() const { return k_ == 1; }

    bool contains(Elem a) const { return a.v < q_; }

    Elem mul(Elem a, Elem b) const {
        if (k_ == 1) return Elem(a.v & b.v);
        if (a.v == 0 || b.v == 0) return kZero;
        return Elem(exp_[log_[a.v] + log_[b.v]]);
    }

    Elem inv(Elem a) const {
        if (a.v == 0) throw PreconditionError("division by zero in GF(2^" + std::to_string(k_) + ")");
        if (k_ == 1) return a;
        return Elem(exp_[(q_ - 1 - log_[a.v]) % (q_ - 1)]);
    }

    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }

    Elem pow(Elem a, std::uint64_t e) const {
        if (e == 0) return kOne;
        if (a.v == 0) return kZero;
        if (k_ == 1) return a;
        std::uint64_t l = (static_cast<std::uint64_t>(log_[a.v]) * (e % (q_ - 1))) % (q_ - 1);
        return Elem(exp_[l]);
    }

    Elem sqr(Elem a) const { return mul(a, a); }

    /// Unique square root, a^(2^(k-1)).
    Elem sqrt(Elem a) const {
        Elem r = a;
        for (unsigned i = 1; i < k_; ++i) r = sqr(r);
        return r;
    }

    std::string to_hex(Elem a) const {
        static constexpr char digits[] = "0123456789abcdef";
        if (a.v == 0) return "0";
        std::string s;
        for (std::uint32_t x = a.v; x != 0; x >>= 4) s.insert(s.begin(), digits[x & 0xf]);
        return s;
    }

    Elem from_hex(std::string_view s) const {
        if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) s.remove_prefix(2);
        if (s.empty() || s.size() > 5)
            throw ValidationError("bad field element '" + std::string(s) + "'");
        std::uint32_t v = 0;
        for (char c : s) {
            unsigned d;
            if (c >= '0' && c <= '9') d = static_cast<unsigned>(c - '0');
            else if (c >= 'a' && c <= 'f') d = static_cast<unsigned>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') d = static_cast<unsigned>(c - 'A' + 10);
            else throw ValidationError("bad hex digit in field element '" + std::string(s) + "'");
            v = (v << 4) | d;
        }
        if (v >= q_)
            throw ValidationError("field element '" + std::string(s) + "' out of range for GF(2^" +
                                  std::to_string(k_) + ")");
        return Elem(v);
    }

    /// Carry-less product reduced modulo p_k; independent of the tables.
    std::uint32_t slow_mul(std::uint32_t a, std::uint32_t b) const {
        std::uint32_t r = 0;
        std::uint32_t p = modulus();
        while (b) {
            if (b & 1) r ^= a;
            b >>= 1;
            a <<= 1;
            if (a & q_) a ^= p;
        }
        return r;
    }

    friend bool operator==(const Field& a, const Field& b) { return a.k_ == b.k_; }

private:
    explicit Field(unsigned k) : k_(k), q_(1u << k) {
        if (k == 1) {
            exp_ = {1, 1};
            log_ = {0, 0};
            return;
        }
        exp_.assign(2 * (q_ - 1), 0);
        log_.assign(q_, 0);
        for (std::uint32_t g = 2; g < q_; ++g) {
            std::uint32_t x = 1;
            std::uint32_t i = 0;
            bool primitive = true;
            for (; i < q_ - 1; ++i) {
                if (i > 0 && x == 1) { primitive = false; break; }
                exp_[i] = x;
                x = slow_mul(x, g);
            }
            if (primitive && x == 1) break;
        }
        for (std::uint32_t i = 0; i < q_ - 1; ++i) {
            exp_[i + q_ - 1] = exp_[i];
            log_[exp_[i]] = i;
        }
    }

    unsigned k_;
    std::uint32_t q_;
    std::vector<std::uint32_t> exp_;
    std::vector<std::uint32_t> log_;
};

}  // namespace nalie
