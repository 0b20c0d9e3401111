#pragma once

// Recursive-descent parser for the integrand DSL.
//
//   expr   := ["+"|"-"] term { ("+"|"-") term }
//   term   := factor { ("*"|"/") factor }        "/" only by a numeric scalar
//   factor := base [ "^" uint ]
//   base   := atom | const | number | "(" expr ")" | "(" decimal "," decimal ")"
//   atom   := ("wp" {"'"} | "Z") "(" uint "-" uint ")"
//   const  := "g2" | "g3" | "eta1h" | "pi" | "G" even>=4
//
// Errors carry the byte offset of the offending token.

#include <cctype>
#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>

#include "ellreg/error.hpp"
#include "ellreg/expr.hpp"

namespace ellreg
{

namespace detail
{

class dsl_parser
{
    public:
        explicit dsl_parser(std::string_view text) : m_text(text) {}

        expr parse_all()
        {
            expr e = parse_expr();
            skip_space();
            if (m_pos != m_text.size()) {
                fail("unexpected '" + std::string(1, m_text[m_pos]) + "'");
            }
            return e;
        }

    private:
        [[noreturn]] void fail(const std::string &what, errc code = errc::syntax_error) const
        {
            throw error(code, what + " at offset " + std::to_string(m_pos), m_pos);
        }

        void skip_space()
        {
            while (m_pos < m_text.size() && std::isspace(static_cast<unsigned char>(m_text[m_pos]))) {
                ++m_pos;
            }
        }

        char peek()
        {
            skip_space();
            return m_pos < m_text.size() ? m_text[m_pos] : '\0';
        }

        bool accept(char c)
        {
            if (peek() == c) {
                ++m_pos;
                return true;
            }
            return false;
        }

        void expect(char c)
        {
            if (!accept(c)) {
                fail(std::string("expected '") + c + "'");
            }
        }

        expr parse_expr()
        {
            expr result;
            bool negate = false;
            if (accept('-')) {
                negate = true;
            } else {
                accept('+');
            }
            result = parse_term();
            if (negate) {
                result = -result;
            }
            for (;;) {
                if (accept('+')) {
                    result += parse_term();
                } else if (accept('-')) {
                    result -= parse_term();
                } else {
                    return result;
                }
            }
        }

        expr parse_term()
        {
            expr result = parse_factor();
            for (;;) {
                if (accept('*')) {
                    result = result * parse_factor();
                } else if (peek() == '/') {
                    const std::size_t at = m_pos++;
                    const expr divisor = parse_factor();
                    const auto &terms = divisor.terms();
                    if (divisor.is_zero()) {
                        m_pos = at;
                        fail("division by zero");
                    }
                    if (terms.size() != 1 || !terms.begin()->first.empty()) {
                        m_pos = at;
                        fail("division is only allowed by a numeric scalar");
                    }
                    result *= 1.0 / terms.begin()->second;
                } else {
                    return result;
                }
            }
        }

        expr parse_factor()
        {
            const expr base = parse_base();
            if (!accept('^')) {
                return base;
            }
            skip_space();
            const int k = parse_uint();
            expr result = expr::scalar(1.0);
            for (int i = 0; i < k; ++i) {
                result = result * base;
            }
            return result;
        }

        expr parse_base()
        {
            const char c = peek();
            if (c == '(') {
                const std::size_t open = m_pos++;
                if (auto literal = try_complex_literal()) {
                    return expr::scalar(*literal);
                }
                m_pos = open + 1;
                expr inner = parse_expr();
                expect(')');
                return inner;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                return expr::scalar(parse_decimal());
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                return parse_symbol();
            }
            if (c == '\0') {
                fail("unexpected end of input");
            }
            fail("unexpected '" + std::string(1, c) + "'");
        }

        std::optional<cplx> try_complex_literal()
        {
            const std::size_t start = m_pos;
            auto signed_decimal = [&]() -> std::optional<double> {
                skip_space();
                double sign = 1.0;
                if (m_pos < m_text.size() && (m_text[m_pos] == '-' || m_text[m_pos] == '+')) {
                    sign = m_text[m_pos] == '-' ? -1.0 : 1.0;
                    ++m_pos;
                    skip_space();
                }
                if (m_pos >= m_text.size() ||
                    !(std::isdigit(static_cast<unsigned char>(m_text[m_pos])) || m_text[m_pos] == '.')) {
                    return std::nullopt;
                }
                return sign * parse_decimal();
            };
            const auto re = signed_decimal();
            if (re && accept(',')) {
                const auto im = signed_decimal();
                if (im && accept(')')) {
                    return cplx(*re, *im);
                }
            }
            m_pos = start;
            return std::nullopt;
        }

        double parse_decimal()
        {
            skip_space();
            const char *first = m_text.data() + m_pos;
            const char *last = m_text.data() + m_text.size();
            double value = 0.0;
            const auto res = std::from_chars(first, last, value, std::chars_format::general);
            if (res.ec != std::errc() || res.ptr == first) {
                fail("malformed number");
            }
            m_pos += static_cast<std::size_t>(res.ptr - first);
            return value;
        }

        int parse_uint()
        {
            const std::size_t start = m_pos;
            int value = 0;
            while (m_pos < m_text.size() && std::isdigit(static_cast<unsigned char>(m_text[m_pos]))) {
                if (value > 100000) {
                    fail("integer too large");
                }
                value = value * 10 + (m_text[m_pos] - '0');
                ++m_pos;
            }
            if (m_pos == start) {
                fail("expected an unsigned integer");
            }
            return value;
        }

        std::string parse_identifier()
        {
            const std::size_t start = m_pos;
            while (m_pos < m_text.size() && std::isalnum(static_cast<unsigned char>(m_text[m_pos]))) {
                ++m_pos;
            }
            return std::string(m_text.substr(start, m_pos - start));
        }

        int parse_point()
        {
            skip_space();
            const std::size_t at = m_pos;
            const int p = parse_uint();
            if (p == 0) {
                m_pos = at;
                fail("point indices are 1-based");
            }
            return p;
        }

        expr parse_symbol()
        {
            const std::size_t start = m_pos;
            const std::string name = parse_identifier();
            if (name == "wp" || name == "Z") {
                int order = 0;
                if (name == "wp") {
                    while (m_pos < m_text.size() && m_text[m_pos] == '\'') {
                        ++order;
                        ++m_pos;
                    }
                }
                expect('(');
                const int a = parse_point();
                expect('-');
                const int b = parse_point();
                if (a == b) {
                    m_pos = start;
                    fail("argument z_" + std::to_string(a) + " - z_" + std::to_string(a) + " is identically zero",
                         errc::self_difference);
                }
                expect(')');
                return name == "wp" ? expr::wp(order, a, b) : expr::zhat(a, b);
            }
            if (name == "g2") {
                return expr::constant(atom_kind::g2);
            }
            if (name == "g3") {
                return expr::constant(atom_kind::g3);
            }
            if (name == "eta1h") {
                return expr::constant(atom_kind::eta1hat);
            }
            if (name == "pi") {
                return expr::constant(atom_kind::pi);
            }
            if (name.size() > 1 && name[0] == 'G') {
                int weight = 0;
                const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), weight);
                if (res.ec == std::errc() && res.ptr == name.data() + name.size() && weight >= 4 && weight % 2 == 0 &&
                    name[1] != '0') {
                    return expr::eisenstein(weight);
                }
            }
            m_pos = start;
            fail("unknown symbol '" + name + "'", errc::unknown_symbol);
        }

        std::string_view m_text;
        std::size_t m_pos = 0;
};

} // namespace detail

inline expr parse(std::string_view text)
{
    return detail::dsl_parser(text).parse_all();
}

} // namespace ellreg
