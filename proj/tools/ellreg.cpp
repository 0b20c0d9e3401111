// ellreg: command-line front end for the regularized-integral engine and its oracles.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ellreg/ellreg.hpp"
#include "ellreg/suites.hpp"

namespace
{

using ellreg::cplx;
using json = nlohmann::ordered_json;

enum exit_code : int
{
    exit_ok = 0,
    exit_usage = 1,
    exit_non_convergence = 2,
    exit_check_failure = 3,
};

const char *exit_hint(int code)
{
    switch (code) {
        case exit_ok: return "ok";
        case exit_usage: return "usage-or-input-error";
        case exit_non_convergence: return "non-convergence";
        case exit_check_failure: return "check-failure";
    }
    return "unknown";
}

class usage_error : public std::runtime_error
{
        using std::runtime_error::runtime_error;
};

/// "a+bi" / "a-bi": the sign between the parts is mandatory.
cplx parse_complex_literal(const std::string &text)
{
    auto fail = [&]() -> cplx { throw usage_error("complex literal '" + text + "' is not of the form a+bi"); };
    if (text.size() < 4 || text.back() != 'i') {
        return fail();
    }
    std::size_t split = std::string::npos;
    for (std::size_t k = 1; k + 1 < text.size(); ++k) {
        if ((text[k] == '+' || text[k] == '-') && text[k - 1] != 'e' && text[k - 1] != 'E') {
            split = k;
        }
    }
    if (split == std::string::npos) {
        return fail();
    }
    auto number = [&](std::string_view s) {
        double v = 0.0;
        const char *first = s.data();
        if (!s.empty() && s.front() == '+') {
            ++first;
        }
        const auto res = std::from_chars(first, s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
            fail();
        }
        return v;
    };
    const std::string_view view(text);
    const double re = number(view.substr(0, split));
    const double im = number(view.substr(split, text.size() - split - 1));
    return {re, im};
}

/// "2=a+bi,3=c+di"
ellreg::assignment parse_fix_list(const std::string &text)
{
    ellreg::assignment out;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) {
            end = text.size();
        }
        const std::string item = text.substr(start, end - start);
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw usage_error("--fix entry '" + item + "' is not of the form N=a+bi");
        }
        int point = 0;
        const auto res = std::from_chars(item.data(), item.data() + eq, point);
        if (res.ec != std::errc() || res.ptr != item.data() + eq || point < 1) {
            throw usage_error("--fix entry '" + item + "' has a bad point index");
        }
        out[point] = parse_complex_literal(item.substr(eq + 1));
        start = end + 1;
    }
    return out;
}

std::string format_complex(cplx c)
{
    std::string re = ellreg::detail::format_real(c.real());
    std::string im = ellreg::detail::format_real(std::abs(c.imag()));
    return re + (c.imag() < 0.0 ? "-" : "+") + im + "i";
}

json to_json(cplx c)
{
    return json::array({c.real(), c.imag()});
}

int env_int(const char *name, int fallback)
{
    const char *raw = std::getenv(name);
    if (!raw || !*raw) {
        return fallback;
    }
    int v = 0;
    const std::string_view s(raw);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 1) {
        throw usage_error(std::string(name) + " must be a positive integer");
    }
    return v;
}

ellreg::modular_context make_context(cplx tau)
{
    if (!(tau.imag() > 0.0)) {
        throw ellreg::error(ellreg::errc::non_positive_imaginary_part, "im(tau) must be positive");
    }
    const int cutoff = env_int("ELLREG_SERIES_CUTOFF", ellreg::default_series_cutoff(tau));
    const int cap = env_int("ELLREG_JET_CAP", ellreg::default_jet_cap);
    return ellreg::new_context(tau, cutoff, cap);
}

struct request
{
    std::string command;
    std::string tau_text;
    std::string expr_text;
    std::vector<int> order;
    bool trace = false;
    bool as_json = false;
    int var = 0;
    int at = 0;
    int expand_order = 0;
    std::string fix_text;
    std::vector<double> eps;
    std::string extrapolation = "even-powers";
    int panel_nodes = 0;
    double tolerance = 0.0;
    std::string suite = "paper";
};

struct outcome
{
    json report = json::object();
    std::string text;
    int code = exit_ok;
};

outcome run_integrate(const request &req)
{
    outcome out;
    const cplx tau = parse_complex_literal(req.tau_text);
    const auto ctx = make_context(tau);
    const ellreg::expr f = ellreg::parse(req.expr_text);
    const std::vector<int> order = req.order.empty() ? ellreg::natural_order(f) : req.order;

    std::vector<ellreg::step_trace> traces;
    const ellreg::expr c = ellreg::integrate_all_symbolic(f, order, &traces, ctx.jet_cap());
    const cplx value = ellreg::evaluate(c, ctx, {});

    json steps = json::array();
    for (const auto &t : traces) {
        json step{{"var", t.var}, {"result", ellreg::render_expr(t.result)}};
        if (req.trace) {
            step["anchor"] = t.anchor;
            json residues = json::array();
            for (const auto &r : t.residues) {
                residues.push_back({{"point", r.point}, {"residue", ellreg::render_expr(r.residue)}});
            }
            step["residues"] = residues;
        }
        steps.push_back(step);
    }
    out.report["value"] = to_json(value);
    out.report["symbolic"] = ellreg::render_expr(c);
    out.report["steps"] = steps;

    std::string text;
    if (req.trace) {
        for (const auto &t : traces) {
            text += "step z" + std::to_string(t.var);
            if (!t.residues.empty()) {
                text += " (anchor z" + std::to_string(t.anchor) + ")";
            }
            text += ": " + ellreg::render_expr(t.result) + "\n";
            for (const auto &r : t.residues) {
                text += "  residue at z" + std::to_string(r.point) + ": " + ellreg::render_expr(r.residue) + "\n";
            }
        }
    }
    text += "symbolic: " + ellreg::render_expr(c) + "\n";
    text += "value: " + format_complex(value) + "\n";
    out.text = text;
    return out;
}

ellreg::pv_options pv_options_from(const request &req)
{
    ellreg::pv_options opts;
    if (!req.eps.empty()) {
        opts.eps_list = req.eps;
    }
    if (req.extrapolation == "even-powers") {
        opts.extrapolation = ellreg::extrapolation_kind::even_powers;
    } else if (req.extrapolation == "linear") {
        opts.extrapolation = ellreg::extrapolation_kind::linear;
    } else if (req.extrapolation == "eps-log-eps") {
        opts.extrapolation = ellreg::extrapolation_kind::eps_log_eps;
    } else {
        throw usage_error("unknown extrapolation '" + req.extrapolation + "'");
    }
    if (req.panel_nodes > 0) {
        opts.panel_nodes = req.panel_nodes;
    }
    if (req.tolerance > 0.0) {
        opts.tolerance = req.tolerance;
    }
    return opts;
}

outcome run_pv(const request &req)
{
    outcome out;
    const cplx tau = parse_complex_literal(req.tau_text);
    const auto ctx = make_context(tau);
    const ellreg::expr f = ellreg::parse(req.expr_text);
    ellreg::assignment fixed = parse_fix_list(req.fix_text);
    if (fixed.count(req.var)) {
        throw usage_error("--fix must not assign the integration variable");
    }
    const auto opts = pv_options_from(req);

    const ellreg::pv_report rep = ellreg::pv_single_step(f, req.var, fixed, ctx, opts);
    const ellreg::expr symbolic = ellreg::integrate_once(f, req.var, {}, nullptr, ctx.jet_cap());
    const cplx engine = ellreg::evaluate(symbolic, ctx, fixed);
    const ellreg::verdict v = ellreg::compare(engine, rep, 1e-3);

    json per_eps = json::array();
    for (std::size_t k = 0; k < rep.per_eps_values.size(); ++k) {
        per_eps.push_back({{"eps", rep.eps_used[k]}, {"value", to_json(rep.per_eps_values[k])}});
    }
    out.report["value"] = to_json(engine);
    out.report["oracle"] = {{"value", to_json(rep.value)},
                            {"per_eps", per_eps},
                            {"error", rep.extrapolated_error},
                            {"converged", rep.converged},
                            {"extrapolation", std::string(ellreg::to_string(opts.extrapolation))},
                            {"patch_radius", rep.patch_radius}};
    out.report["checks"] = json::array({{{"name", "engine_vs_oracle"},
                                         {"pass", v.pass},
                                         {"got", to_json(engine)},
                                         {"want", to_json(rep.value)},
                                         {"rel_err", v.rel_dev}}});

    std::string text;
    for (std::size_t k = 0; k < rep.per_eps_values.size(); ++k) {
        text += "eps " + ellreg::detail::format_real(rep.eps_used[k]) + ": " + format_complex(rep.per_eps_values[k]) +
                "\n";
    }
    text += "oracle: " + format_complex(rep.value) + " (error " + ellreg::detail::format_real(rep.extrapolated_error) +
            (rep.converged ? ", converged" : ", NOT converged") + ")\n";
    text += "engine: " + format_complex(engine) + "\n";
    text += "relative deviation: " + ellreg::detail::format_real(v.rel_dev) + "\n";
    out.text = text;
    out.code = rep.converged ? exit_ok : exit_non_convergence;
    return out;
}

outcome run_check(const request &req)
{
    outcome out;
    std::optional<cplx> tau;
    if (!req.tau_text.empty()) {
        tau = parse_complex_literal(req.tau_text);
        make_context(*tau);
    }
    const auto results = ellreg::checks::run_suite(req.suite, tau);
    json checks = json::array();
    std::string text;
    std::size_t failed = 0;
    for (const auto &r : results) {
        json item{{"name", r.name},
                  {"pass", r.pass},
                  {"got", to_json(r.got)},
                  {"want", to_json(r.want)},
                  {"rel_err", r.rel_err}};
        if (r.criterion > 0) {
            item["criterion"] = r.criterion;
        }
        if (!r.detail.empty()) {
            item["detail"] = r.detail;
        }
        checks.push_back(item);
        char line[256];
        std::snprintf(line, sizeof line, "%-4s %-48s err=%.3e", r.pass ? "ok" : "FAIL", r.name.c_str(), r.rel_err);
        text += line;
        if (!r.detail.empty()) {
            text += "  " + r.detail;
        }
        text += "\n";
        failed += r.pass ? 0 : 1;
    }
    text += std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) + " checks passed\n";
    out.report["suite"] = req.suite;
    out.report["checks"] = checks;
    out.text = text;
    out.code = failed == 0 ? exit_ok : exit_check_failure;
    return out;
}

outcome run_constants(const request &req)
{
    outcome out;
    const auto ctx = make_context(parse_complex_literal(req.tau_text));
    json constants = json::object();
    std::string text;
    for (const auto &[name, value] : ctx.constants()) {
        constants[name] = to_json(value);
        text += name + " = " + format_complex(value) + "\n";
    }
    out.report["q"] = to_json(ctx.q());
    out.report["series_cutoff"] = ctx.series_cutoff();
    out.report["jet_cap"] = ctx.jet_cap();
    out.report["constants"] = constants;
    out.text = "q = " + format_complex(ctx.q()) + "\n" + text;
    return out;
}

outcome run_expand(const request &req)
{
    outcome out;
    const auto ctx = make_context(parse_complex_literal(req.tau_text));
    const ellreg::expr f = ellreg::parse(req.expr_text);
    const ellreg::assignment fixed = parse_fix_list(req.fix_text);
    const auto series = ellreg::laurent_expand(f, req.var, req.at, req.expand_order, ctx.jet_cap());

    // Numeric values need every remaining point; z_var is replaced by z_at.
    bool numeric = true;
    for (const int p : f.points()) {
        if (p != req.var && !fixed.count(p)) {
            numeric = false;
        }
    }
    json coeffs = json::array();
    std::string text = "expansion at z" + std::to_string(req.var) + " = z" + std::to_string(req.at) + " + w\n";
    for (int k = series.lead_exponent(); k <= series.trunc_order(); ++k) {
        const ellreg::expr c = series.coefficient(k);
        json item{{"power", k}, {"expr", ellreg::render_expr(c)}};
        text += "w^" + std::to_string(k) + ": " + ellreg::render_expr(c);
        if (numeric) {
            const cplx v = ellreg::evaluate(c, ctx, fixed);
            item["value"] = to_json(v);
            text += "  = " + format_complex(v);
        }
        text += "\n";
        coeffs.push_back(item);
    }
    out.report["lead"] = series.lead_exponent();
    out.report["trunc"] = series.trunc_order();
    out.report["coefficients"] = coeffs;
    out.text = text;
    return out;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Regularized integrals of configuration-space correlators on an elliptic curve"};
    app.require_subcommand(1);
    request req;

    auto add_tau = [&](CLI::App *sub, bool required) {
        auto *opt = sub->add_option("--tau", req.tau_text, "modular parameter as a+bi, im > 0");
        if (required) {
            opt->required();
        }
    };

    auto *integrate = app.add_subcommand("integrate", "iterated regularized integral over all points");
    add_tau(integrate, true);
    integrate->add_option("--order", req.order, "integration order, e.g. 3,1,2")->delimiter(',')->allow_extra_args(false);
    integrate->add_flag("--trace", req.trace, "print every step with its residues");
    integrate->add_flag("--json", req.as_json, "JSON report");
    integrate->add_option("expr", req.expr_text, "integrand")->required();

    auto *pv = app.add_subcommand("pv", "principal-value quadrature of one step against the engine");
    add_tau(pv, true);
    pv->add_option("--var", req.var, "integration variable")->required()->check(CLI::PositiveNumber);
    pv->add_option("--fix", req.fix_text, "fixed points, e.g. \"2=0.5+0.3i,3=0.1+0.7i\"");
    pv->add_option("--eps", req.eps, "excision radii, decreasing")->delimiter(',')->allow_extra_args(false);
    pv->add_option("--extrapolation", req.extrapolation, "even-powers | linear | eps-log-eps");
    pv->add_option("--panel-nodes", req.panel_nodes, "trapezoid nodes per lattice direction");
    pv->add_option("--tolerance", req.tolerance, "relative error required for convergence");
    pv->add_flag("--json", req.as_json, "JSON report");
    pv->add_option("expr", req.expr_text, "integrand")->required();

    auto *check = app.add_subcommand("check", "run a named regression suite");
    check->add_option("--suite", req.suite, "paper | kernel | properties | all")
        ->check(CLI::IsMember({"paper", "kernel", "properties", "all"}));
    add_tau(check, false);
    check->add_flag("--json", req.as_json, "JSON report");

    auto *constants = app.add_subcommand("constants", "modular constants at tau");
    add_tau(constants, true);
    constants->add_flag("--json", req.as_json, "JSON report");

    auto *expand = app.add_subcommand("expand", "Laurent expansion of an integrand at z_var = z_at + w");
    add_tau(expand, true);
    expand->add_option("--var", req.var, "expanded variable")->required()->check(CLI::PositiveNumber);
    expand->add_option("--at", req.at, "expansion point")->required()->check(CLI::PositiveNumber);
    expand->add_option("--order", req.expand_order, "highest power of w")->required();
    expand->add_option("--fix", req.fix_text, "point values for numeric coefficients");
    expand->add_flag("--json", req.as_json, "JSON report");
    expand->add_option("expr", req.expr_text, "integrand")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    req.command = app.get_subcommands().front()->get_name();
    const auto start = std::chrono::steady_clock::now();
    outcome out;
    json error_entry;
    try {
        if (req.command == "integrate") {
            out = run_integrate(req);
        } else if (req.command == "pv") {
            out = run_pv(req);
        } else if (req.command == "check") {
            out = run_check(req);
        } else if (req.command == "constants") {
            out = run_constants(req);
        } else {
            out = run_expand(req);
        }
    } catch (const ellreg::error &e) {
        out = outcome{};
        out.code = e.code() == ellreg::errc::non_convergence ? exit_non_convergence : exit_usage;
        error_entry = {{"kind", std::string(ellreg::to_string(e.code()))}, {"message", e.what()}};
        if (e.offset()) {
            error_entry["offset"] = *e.offset();
        }
    } catch (const usage_error &e) {
        out = outcome{};
        out.code = exit_usage;
        error_entry = {{"kind", "Usage"}, {"message", e.what()}};
    }
    const double millis =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    if (req.as_json) {
        json report;
        report["command"] = req.command;
        if (!req.tau_text.empty()) {
            try {
                report["tau"] = to_json(parse_complex_literal(req.tau_text));
            } catch (const usage_error &) {
                report["tau"] = req.tau_text;
            }
        }
        if (!req.expr_text.empty()) {
            report["expr"] = req.expr_text;
        }
        for (auto &[key, value] : out.report.items()) {
            report[key] = value;
        }
        if (!error_entry.is_null()) {
            report["error"] = error_entry;
        }
        report["exit_hint"] = exit_hint(out.code);
        report["timing_ms"] = millis;
        std::cout << report.dump(2) << "\n";
    } else if (!error_entry.is_null()) {
        std::cerr << "ellreg: " << error_entry["message"].get<std::string>() << "\n";
    } else {
        std::cout << out.text;
    }
    return out.code;
}
