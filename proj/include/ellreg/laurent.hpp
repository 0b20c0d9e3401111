#pragma once

// Truncated Laurent series in one formal variable w over a coefficient ring C.
//
// A series stores the coefficients of w^lead .. w^trunc; everything above trunc is unknown.
// Products follow the usual rule trunc(ST) = min(S.trunc + T.lead, T.trunc + S.lead),
// so no operation ever reads a coefficient it does not know. There is deliberately no
// inverse or division by a series.

#include <algorithm>
#include <complex>
#include <concepts>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ellreg/error.hpp"

namespace ellreg
{

/// Ring operations for a coefficient type; specialize per instantiation.
template <typename C>
struct ring_traits;

template <typename C>
concept coefficient_ring = requires(const C &a, const C &b, long n) {
    { ring_traits<C>::zero() } -> std::convertible_to<C>;
    { ring_traits<C>::add(a, b) } -> std::convertible_to<C>;
    { ring_traits<C>::neg(a) } -> std::convertible_to<C>;
    { ring_traits<C>::mul(a, b) } -> std::convertible_to<C>;
    { ring_traits<C>::is_zero(a) } -> std::convertible_to<bool>;
    { ring_traits<C>::mul_int(a, n) } -> std::convertible_to<C>;
};

/// Rings that additionally support exact division by a nonzero integer.
template <typename C>
concept integer_divisible_ring = coefficient_ring<C> && requires(const C &a, long n) {
    { ring_traits<C>::div_int(a, n) } -> std::convertible_to<C>;
};

template <>
struct ring_traits<std::complex<double>>
{
    using value_type = std::complex<double>;
    static value_type zero() { return {0.0, 0.0}; }
    static value_type one() { return {1.0, 0.0}; }
    static value_type add(const value_type &a, const value_type &b) { return a + b; }
    static value_type neg(const value_type &a) { return -a; }
    static value_type mul(const value_type &a, const value_type &b) { return a * b; }
    static bool is_zero(const value_type &a) { return a == value_type{0.0, 0.0}; }
    static value_type mul_int(const value_type &a, long n) { return a * static_cast<double>(n); }
    static value_type div_int(const value_type &a, long n) { return a / static_cast<double>(n); }
};

template <coefficient_ring C>
class laurent_series
{
        using traits = ring_traits<C>;

    public:
        /// The zero series known up to w^-1.
        laurent_series() : m_lead(0), m_trunc(-1) {}

        laurent_series(int lead, std::vector<C> coeffs, int trunc) : m_lead(lead), m_trunc(trunc), m_coeffs(std::move(coeffs))
        {
            if (trunc < lead - 1) {
                throw error(errc::truncation_underflow, "truncation order below lead exponent - 1");
            }
            m_coeffs.resize(static_cast<std::size_t>(trunc - lead + 1), traits::zero());
            normalize();
        }

        static laurent_series zero(int trunc)
        {
            return laurent_series(trunc + 1, {}, trunc);
        }

        static laurent_series monomial(const C &c, int exponent, int trunc)
        {
            if (exponent > trunc) {
                return zero(trunc);
            }
            std::vector<C> coeffs(static_cast<std::size_t>(trunc - exponent + 1), traits::zero());
            coeffs[0] = c;
            return laurent_series(exponent, std::move(coeffs), trunc);
        }

        int lead_exponent() const { return m_lead; }
        int trunc_order() const { return m_trunc; }
        const std::vector<C> &coeffs() const { return m_coeffs; }
        bool is_zero() const { return m_coeffs.empty(); }

        /// Coefficient of w^k; ring zero below the lead exponent.
        C coefficient(int k) const
        {
            if (k > m_trunc) {
                throw error(errc::beyond_truncation,
                            "coefficient " + std::to_string(k) + " requested, series known to " + std::to_string(m_trunc));
            }
            if (k < m_lead) {
                return traits::zero();
            }
            return m_coeffs[static_cast<std::size_t>(k - m_lead)];
        }

        /// The w^-1 coefficient.
        C residue() const
        {
            return coefficient(-1);
        }

        /// Same series with the truncation lowered to trunc (no-op when trunc is not lower).
        laurent_series truncated(int trunc) const
        {
            if (trunc >= m_trunc) {
                return *this;
            }
            if (trunc < m_lead) {
                return zero(trunc);
            }
            std::vector<C> coeffs(m_coeffs.begin(), m_coeffs.begin() + (trunc - m_lead + 1));
            return laurent_series(m_lead, std::move(coeffs), trunc);
        }

        friend laurent_series add(const laurent_series &a, const laurent_series &b)
        {
            const int trunc = std::min(a.m_trunc, b.m_trunc);
            const int lead = std::min(a.m_lead, b.m_lead);
            if (trunc < lead) {
                return zero(trunc);
            }
            std::vector<C> coeffs(static_cast<std::size_t>(trunc - lead + 1), traits::zero());
            for (int k = lead; k <= trunc; ++k) {
                auto &slot = coeffs[static_cast<std::size_t>(k - lead)];
                if (k >= a.m_lead) {
                    slot = traits::add(slot, a.m_coeffs[static_cast<std::size_t>(k - a.m_lead)]);
                }
                if (k >= b.m_lead) {
                    slot = traits::add(slot, b.m_coeffs[static_cast<std::size_t>(k - b.m_lead)]);
                }
            }
            return laurent_series(lead, std::move(coeffs), trunc);
        }

        friend laurent_series negate(const laurent_series &a)
        {
            std::vector<C> coeffs;
            coeffs.reserve(a.m_coeffs.size());
            for (const auto &c : a.m_coeffs) {
                coeffs.push_back(traits::neg(c));
            }
            return laurent_series(a.m_lead, std::move(coeffs), a.m_trunc);
        }

        friend laurent_series mul(const laurent_series &a, const laurent_series &b)
        {
            const int lead = a.m_lead + b.m_lead;
            const int trunc = std::min(a.m_trunc + b.m_lead, b.m_trunc + a.m_lead);
            if (a.is_zero() || b.is_zero() || trunc < lead) {
                return zero(trunc);
            }
            const int span = trunc - lead;
            std::vector<C> coeffs(static_cast<std::size_t>(span + 1), traits::zero());
            const int na = static_cast<int>(a.m_coeffs.size());
            const int nb = static_cast<int>(b.m_coeffs.size());
            for (int i = 0; i < na && i <= span; ++i) {
                const auto &ai = a.m_coeffs[static_cast<std::size_t>(i)];
                if (traits::is_zero(ai)) {
                    continue;
                }
                for (int j = 0; j < nb && i + j <= span; ++j) {
                    const auto &bj = b.m_coeffs[static_cast<std::size_t>(j)];
                    if (traits::is_zero(bj)) {
                        continue;
                    }
                    auto &slot = coeffs[static_cast<std::size_t>(i + j)];
                    slot = traits::add(slot, traits::mul(ai, bj));
                }
            }
            return laurent_series(lead, std::move(coeffs), trunc);
        }

        friend laurent_series scale(const C &c, const laurent_series &a)
        {
            std::vector<C> coeffs;
            coeffs.reserve(a.m_coeffs.size());
            for (const auto &x : a.m_coeffs) {
                coeffs.push_back(traits::mul(c, x));
            }
            return laurent_series(a.m_lead, std::move(coeffs), a.m_trunc);
        }

        friend laurent_series int_pow(const laurent_series &a, int k)
        {
            if (k < 0) {
                throw error(errc::invalid_argument, "negative power of a Laurent series");
            }
            if (k == 0) {
                // 1 is known to the relative precision of a.
                const int trunc = a.m_trunc - a.m_lead;
                if (trunc < 0) {
                    throw error(errc::truncation_underflow, "zeroth power of a series with no known coefficients");
                }
                C one;
                if constexpr (requires { ring_traits<C>::one(); }) {
                    one = ring_traits<C>::one();
                } else {
                    one = C(1);
                }
                return monomial(one, 0, trunc);
            }
            laurent_series result = a;
            for (int i = 1; i < k; ++i) {
                result = mul(result, a);
            }
            return result;
        }

        friend laurent_series divide_by_integer(const laurent_series &a, long n)
            requires integer_divisible_ring<C>
        {
            if (n == 0) {
                throw error(errc::invalid_argument, "division by zero");
            }
            std::vector<C> coeffs;
            coeffs.reserve(a.m_coeffs.size());
            for (const auto &x : a.m_coeffs) {
                coeffs.push_back(traits::div_int(x, n));
            }
            return laurent_series(a.m_lead, std::move(coeffs), a.m_trunc);
        }

        /// Term-wise d/dw.
        friend laurent_series differentiate(const laurent_series &a)
        {
            if (a.is_zero()) {
                return zero(a.m_trunc - 1);
            }
            std::vector<C> coeffs;
            coeffs.reserve(a.m_coeffs.size());
            for (std::size_t i = 0; i < a.m_coeffs.size(); ++i) {
                coeffs.push_back(traits::mul_int(a.m_coeffs[i], a.m_lead + static_cast<long>(i)));
            }
            return laurent_series(a.m_lead - 1, std::move(coeffs), a.m_trunc - 1);
        }

        friend laurent_series operator+(const laurent_series &a, const laurent_series &b) { return add(a, b); }
        friend laurent_series operator-(const laurent_series &a, const laurent_series &b) { return add(a, negate(b)); }
        friend laurent_series operator*(const laurent_series &a, const laurent_series &b) { return mul(a, b); }

    private:
        void normalize()
        {
            std::size_t skip = 0;
            while (skip < m_coeffs.size() && traits::is_zero(m_coeffs[skip])) {
                ++skip;
            }
            if (skip > 0) {
                m_coeffs.erase(m_coeffs.begin(), m_coeffs.begin() + static_cast<std::ptrdiff_t>(skip));
                m_lead += static_cast<int>(skip);
            }
        }

        int m_lead;
        int m_trunc;
        std::vector<C> m_coeffs;
};

} // namespace ellreg
