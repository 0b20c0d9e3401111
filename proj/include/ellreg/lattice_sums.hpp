#pragma once

// Direct lattice sums G_{2k} = 1/2 sum' (m tau + n)^{-2k} in Eisenstein order (n innermost).
// Shares nothing with the q-series kernel: each row is a truncated direct sum plus a
// midpoint-rule tail, and rows are added until they fall below double precision.

#include <cmath>
#include <complex>

#include "ellreg/kernel.hpp"

namespace ellreg
{

namespace detail
{

/// Neumaier summation, componentwise.
class compensated_sum
{
    public:
        void add(cplx v)
        {
            step(m_re, m_re_c, v.real());
            step(m_im, m_im_c, v.imag());
        }
        cplx value() const { return {m_re + m_re_c, m_im + m_im_c}; }

    private:
        static void step(double &sum, double &comp, double v)
        {
            const double t = sum + v;
            comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
            sum = t;
        }
        double m_re = 0.0, m_re_c = 0.0, m_im = 0.0, m_im_c = 0.0;
};

/// sum_{n in Z} (x + n)^{-s}, s even >= 2, x not an integer.
inline cplx row_sum(cplx x, int s, int terms)
{
    auto power = [s](cplx v) {
        const cplx inv2 = 1.0 / (v * v);
        cplx p = 1.0;
        for (int i = 0; i < s / 2; ++i) {
            p *= inv2;
        }
        return p;
    };
    compensated_sum total;
    total.add(power(x));
    for (int n = terms; n >= 1; --n) { // smallest terms first
        total.add(power(x + static_cast<double>(n)));
        total.add(power(x - static_cast<double>(n)));
    }
    const double edge = terms + 0.5;
    // Midpoint Euler-Maclaurin: int_{edge}^inf f + f'(edge) / 24.
    total.add(std::pow(x + edge, 1.0 - s) / (s - 1.0) - s / 24.0 * std::pow(x + edge, -1.0 - s));
    total.add(std::pow(edge - x, 1.0 - s) / (s - 1.0) - s / 24.0 * std::pow(edge - x, -1.0 - s));
    return total.value();
}

/// sum_{n != 0} n^{-s} = 2 zeta(s), same truncation.
inline double zero_row_sum(int s, int terms)
{
    compensated_sum total;
    for (int n = terms; n >= 1; --n) {
        total.add(std::pow(static_cast<double>(n), -s));
    }
    total.add(std::pow(terms + 0.5, 1.0 - s) / (s - 1.0) - s / 24.0 * std::pow(terms + 0.5, -1.0 - s));
    return 2.0 * total.value().real();
}

} // namespace detail

/// G_{weight} from the lattice, weight even >= 2; weight 2 is the Eisenstein-ordered value.
inline cplx lattice_eisenstein(cplx tau, int weight, int terms = 20000)
{
    cplx total = detail::zero_row_sum(weight, terms);
    for (int m = 1; m < 200; ++m) {
        const cplx row = detail::row_sum(static_cast<double>(m) * tau, weight, terms) +
                         detail::row_sum(-static_cast<double>(m) * tau, weight, terms);
        total += row;
        if (std::abs(row) < 1e-18 * std::abs(total)) {
            break;
        }
    }
    return 0.5 * total;
}

/// eta1 = 2 G_2 and its completion eta1 - pi / Im tau, from lattice sums.
inline std::pair<cplx, cplx> lattice_eta1(cplx tau, int terms = 20000)
{
    const cplx eta1 = 2.0 * lattice_eisenstein(tau, 2, terms);
    return {eta1, eta1 - pi / tau.imag()};
}

} // namespace ellreg
