#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ellreg
{

/// Failure categories raised by the library. Every throw site uses exactly one.
enum class errc
{
    non_positive_imaginary_part,
    cutoff_too_small,
    jet_cap_exceeded,
    pole_at_lattice_point,
    truncation_underflow,
    beyond_truncation,
    invalid_argument,
    syntax_error,
    unknown_symbol,
    self_difference,
    pole_hit,
    no_poles,
    not_meromorphic,
    non_constant_result,
    non_convergence,
    pole_on_boundary,
};

inline std::string_view to_string(errc code)
{
    switch (code) {
        case errc::non_positive_imaginary_part: return "NonPositiveImaginaryPart";
        case errc::cutoff_too_small: return "CutoffTooSmall";
        case errc::jet_cap_exceeded: return "JetCapExceeded";
        case errc::pole_at_lattice_point: return "PoleAtLatticePoint";
        case errc::truncation_underflow: return "TruncationUnderflow";
        case errc::beyond_truncation: return "BeyondTruncation";
        case errc::invalid_argument: return "InvalidArgument";
        case errc::syntax_error: return "SyntaxError";
        case errc::unknown_symbol: return "UnknownSymbol";
        case errc::self_difference: return "SelfDifference";
        case errc::pole_hit: return "PoleHit";
        case errc::no_poles: return "NoPoles";
        case errc::not_meromorphic: return "NotMeromorphic";
        case errc::non_constant_result: return "NonConstantResult";
        case errc::non_convergence: return "NonConvergence";
        case errc::pole_on_boundary: return "PoleOnBoundary";
    }
    return "Unknown";
}

class error : public std::runtime_error
{
    public:
        error(errc code, const std::string &what, std::optional<std::size_t> offset = std::nullopt)
            : std::runtime_error(std::string(to_string(code)) + ": " + what), m_code(code), m_offset(offset)
        {}
        errc code() const noexcept
        {
            return m_code;
        }
        /// Byte offset into the parsed text, for syntax-level failures.
        std::optional<std::size_t> offset() const noexcept
        {
            return m_offset;
        }

    private:
        errc m_code;
        std::optional<std::size_t> m_offset;
};

} // namespace ellreg
