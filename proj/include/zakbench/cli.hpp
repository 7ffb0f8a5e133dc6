#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "acceptance.hpp"
#include "certificates.hpp"
#include "constructions.hpp"
#include "gabor.hpp"
#include "invariance.hpp"
#include "serialize.hpp"
#include "spread.hpp"
#include "zak.hpp"

namespace zakbench::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSchema = "zakbench/1";

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = {"zak",     "bounds", "invariance", "construct",
                                                   "certify", "spread", "s0norm",     "selftest"};
    return names;
}

/// Thrown by parse_command for --help; carries the usage text.
struct HelpRequested {
    std::string text;
};

struct CommandSpec {
    std::string command;
    std::string window = "example1";
    std::int64_t n = 720;
    std::int64_t nl = 64;
    std::int64_t q = 1;
    std::int64_t p = 1;
    std::optional<Rational> alpha;
    std::optional<Rational> beta;
    TimeFrequencyShift shift{Rational(0), Rational(0)};
    double tol = 1e-6;
    int sign = -1;
    std::int64_t r = 1;
    std::int64_t m1 = 0;
    std::int64_t m2 = 0;
    std::int64_t p1 = 1;
    std::int64_t p2 = 1;
    std::string h = "exp:1,0";
    double eps = 0.3;
    double a = 0.0;
    double b = 0.0;
    std::int64_t pad = 8;
    double t = 8.0;
    double k = 16.0;
    double step = 0.25;
    std::string level = "quick";
    std::string out;
    std::string csv;
    std::string h_csv;

    friend bool operator==(const CommandSpec&, const CommandSpec&) = default;
};

// ---------------------------------------------------------------------------
// JSON echo of the command

inline json to_json(const CommandSpec& s) {
    auto opt = [](const std::optional<Rational>& r) { return r ? json(r->str()) : json(nullptr); };
    return {{"command", s.command}, {"window", s.window}, {"N", s.n},          {"L", s.nl},
            {"Q", s.q},             {"P", s.p},           {"alpha", opt(s.alpha)}, {"beta", opt(s.beta)},
            {"shift", {{"u", s.shift.u.str()}, {"eta", s.shift.eta.str()}}},
            {"tol", s.tol},         {"sign", s.sign},     {"R", s.r},          {"M1", s.m1},
            {"M2", s.m2},           {"P1", s.p1},         {"P2", s.p2},        {"h", s.h},
            {"eps", s.eps},         {"a", s.a},           {"b", s.b},          {"pad", s.pad},
            {"T", s.t},             {"K", s.k},           {"step", s.step},    {"level", s.level},
            {"out", s.out},         {"csv", s.csv},       {"h_csv", s.h_csv}};
}

inline CommandSpec command_from_json(const json& j) {
    CommandSpec s;
    auto opt = [&](const char* key) -> std::optional<Rational> {
        if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
        return rational_from_json(j.at(key), key);
    };
    s.command = detail::get_field<std::string>(j, "command", "");
    s.window = detail::get_field<std::string>(j, "window", s.window);
    s.n = detail::get_field(j, "N", s.n);
    s.nl = detail::get_field(j, "L", s.nl);
    s.q = detail::get_field(j, "Q", s.q);
    s.p = detail::get_field(j, "P", s.p);
    s.alpha = opt("alpha");
    s.beta = opt("beta");
    if (j.contains("shift")) {
        const json& sh = j.at("shift");
        s.shift = {rational_from_json(detail::require_field(sh, "u"), "u"),
                   rational_from_json(detail::require_field(sh, "eta"), "eta")};
    }
    s.tol = detail::get_field(j, "tol", s.tol);
    s.sign = detail::get_field(j, "sign", s.sign);
    s.r = detail::get_field(j, "R", s.r);
    s.m1 = detail::get_field(j, "M1", s.m1);
    s.m2 = detail::get_field(j, "M2", s.m2);
    s.p1 = detail::get_field(j, "P1", s.p1);
    s.p2 = detail::get_field(j, "P2", s.p2);
    s.h = detail::get_field(j, "h", s.h);
    s.eps = detail::get_field(j, "eps", s.eps);
    s.a = detail::get_field(j, "a", s.a);
    s.b = detail::get_field(j, "b", s.b);
    s.pad = detail::get_field(j, "pad", s.pad);
    s.t = detail::get_field(j, "T", s.t);
    s.k = detail::get_field(j, "K", s.k);
    s.step = detail::get_field(j, "step", s.step);
    s.level = detail::get_field(j, "level", s.level);
    s.out = detail::get_field(j, "out", s.out);
    s.csv = detail::get_field(j, "csv", s.csv);
    s.h_csv = detail::get_field(j, "h_csv", s.h_csv);
    return s;
}

// ---------------------------------------------------------------------------
// Window and multiplier resolution

namespace detail {

inline bool is_json_path(const std::string& name) {
    return name.size() > 5 && name.compare(name.size() - 5, 5, ".json") == 0;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline std::int64_t suggest_multiple(std::int64_t n, std::int64_t d) { return std::max<std::int64_t>(d, n / d * d); }

inline void require_divisible(std::int64_t n, std::int64_t d, const std::string& flag, const std::string& why) {
    if (d > 1 && n % d != 0)
        fail(std::to_string(n) + " not divisible by " + std::to_string(d) + " (" + why + "); use " + flag + " " +
             std::to_string(suggest_multiple(n, d)));
}

}  // namespace detail

/// Named windows or a WindowSpec JSON file, at the command's N.
inline WindowSpec window_spec(const CommandSpec& s) {
    WindowSpec w;
    w.n = s.n;
    w.label = s.window;
    const std::string& name = s.window;
    if (detail::is_json_path(name)) {
        w = window_spec_from_json(detail::read_json_file(name));
        w.n = s.n;
        if (w.label.empty()) w.label = name;
    } else if (name == "indicator") {
        w.shape = PiecewiseShape{{{Rational(0), Rational(1), cplx{1.0, 0.0}}}};
    } else if (name == "example1") {
        w.shape = example1_shape();
    } else if (name == "example1-corrected") {
        w.shape = example1_corrected_shape();
    } else if (name == "example2") {
        w.shape = Example2Shape{s.eps, s.sign, s.nl};
    } else if (name == "gaussian") {
        w.shape = GaussianShape{};
    } else if (name == "gaussian-normalized") {
        w.shape = GaussianShape{1.0, std::pow(2.0, 0.25), Rational(8)};
    } else if (name.rfind("bspline", 0) == 0 && name.size() > 7) {
        int order = 0;
        const auto* first = name.data() + 7;
        const auto res = std::from_chars(first, name.data() + name.size(), order);
        if (res.ec != std::errc() || res.ptr != name.data() + name.size())
            fail("unknown window '" + name + "'; B-splines are named bspline<order>, e.g. bspline2");
        w.shape = BSplineShape{order, Rational(1), 1.0};
    } else {
        fail("unknown window '" + name +
             "'; use indicator, example1, example1-corrected, example2, gaussian, gaussian-normalized, "
             "bspline<order> or a .json window spec");
    }
    return w;
}

struct ResolvedWindow {
    WindowSpec spec;
    RationalLattice lattice;
};

/// Applies the dilation normalisation when (alpha, beta) is given.
inline ResolvedWindow resolve_window(const CommandSpec& s) {
    WindowSpec w = window_spec(s);
    if (s.alpha || s.beta) {
        if (!s.alpha || !s.beta) fail("--alpha and --beta must be given together");
        auto norm = dilate_normalize(w, *s.alpha, *s.beta);
        return {std::move(norm.spec), norm.lattice};
    }
    return {std::move(w), RationalLattice(s.q, s.p)};
}

/// Grid multiple N must have for the window's breakpoints to be exact.
inline std::int64_t window_rate_multiple(const WindowSpec& w) {
    if (const auto* p = std::get_if<PiecewiseShape>(&w.shape)) {
        std::int64_t d = 1;
        for (const auto& piece : p->pieces) d = std::lcm(d, std::lcm(piece.a.den(), piece.b.den()));
        return d;
    }
    if (std::holds_alternative<Example2Shape>(w.shape)) return 6;
    return 1;
}

inline bool uses_window(const std::string& c) {
    return c == "zak" || c == "bounds" || c == "invariance" || c == "spread" || c == "s0norm";
}

inline bool uses_lattice(const std::string& c) { return c == "bounds" || c == "invariance"; }

/// Multiplier for `certify`: exp:a,b is e^{2 pi i (a P1 x + b P2 omega)};
/// example1-corrected is the two-valued multiplier on sixths.
inline HGrid certify_multiplier(const CommandSpec& s) {
    if (s.h == "example1-corrected") {
        if (s.p1 != 3 || s.p2 != 1) fail("the example1-corrected multiplier has P1 = 3, P2 = 1; pass --P1 3 --P2 1");
        return example1_corrected_multiplier(s.n, s.nl, s.sign);
    }
    if (s.h.rfind("exp:", 0) != 0)
        fail("unknown multiplier '" + s.h + "'; use exp:a,b or example1-corrected");
    const std::string body = s.h.substr(4);
    const auto comma = body.find(',');
    if (comma == std::string::npos) fail("multiplier exp:a,b needs two integers, got '" + s.h + "'");
    std::int64_t a = 0, b = 0;
    try {
        a = std::stoll(body.substr(0, comma));
        b = std::stoll(body.substr(comma + 1));
    } catch (const std::exception&) {
        fail("multiplier exp:a,b needs two integers, got '" + s.h + "'");
    }
    return HGrid::sample(s.p1, s.p2, s.n / s.p1, s.nl / s.p2, [&](const Rational& x, const Rational& w) {
        return unit_phase(Rational(a * s.p1) * x + Rational(b * s.p2) * w);
    });
}

/// Builder input for `construct`: a named construction or an SQP JSON file.
inline SQPSpec construct_spec(const CommandSpec& s) {
    if (s.window == "example1-corrected") return example1_sqp(s.sign);
    if (s.window == "example2") return example2_sqp(s.eps, s.sign);
    if (detail::is_json_path(s.window)) return sqp_spec_from_json(detail::read_json_file(s.window));
    fail("construct needs --window example1-corrected, example2 or a .json builder spec (got '" + s.window + "')");
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline TimeFrequencyShift parse_shift(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) fail("malformed shift '" + text + "'; expected u,eta such as 1/2,0");
    return {Rational::parse(text.substr(0, comma)), Rational::parse(text.substr(comma + 1))};
}

inline int parse_sign(const std::string& text) {
    if (text == "+1" || text == "1" || text == "+") return 1;
    if (text == "-1" || text == "-") return -1;
    fail("malformed sign '" + text + "'; use --sign +1 or --sign -1");
}

}  // namespace detail

/// Validates every divisibility precondition of the selected operation.
inline void validate(const CommandSpec& s) {
    require(std::find(subcommands().begin(), subcommands().end(), s.command) != subcommands().end(),
            "unknown subcommand '" + s.command + "'");
    require(s.n >= 1, "N must be a positive integer; use --N 720");
    require(s.nl >= 1, "L must be a positive integer; use --L 64");
    require(s.sign == 1 || s.sign == -1, "sign must be +1 or -1");
    if (s.command == "selftest") {
        require(s.level == "quick" || s.level == "full", "level must be quick or full; use --level quick");
        return;
    }
    if (uses_window(s.command)) {
        const ResolvedWindow rw = resolve_window(s);
        if (!std::holds_alternative<RawShape>(rw.spec.shape))
            detail::require_divisible(s.n, window_rate_multiple(rw.spec), "--N",
                                      "window " + s.window + " needs breakpoints on the 1/N grid");
        if (uses_lattice(s.command))
            detail::require_divisible(s.n, std::lcm(rw.lattice.p, rw.lattice.q), "--N",
                                      "the lattice needs N divisible by lcm(P, Q)");
    }
    if (s.command == "zak" || s.command == "invariance" || s.command == "certify") {
        detail::require_divisible(s.n, s.shift.u.den(), "--N", "shift u = " + s.shift.u.str() + " must lie on the grid");
        detail::require_divisible(s.nl, s.shift.eta.den(), "--L",
                                  "shift eta = " + s.shift.eta.str() + " must lie on the omega grid");
    }
    if (s.command == "invariance") require(s.tol >= 0.0, "tolerance must be nonnegative; use --tol 1e-6");
    if (s.command == "construct") {
        const SQPSpec sqp = construct_spec(s);
        std::int64_t d = sqp.R;
        if (const auto* t = std::get_if<CellTable>(&sqp.h)) d = std::lcm(d, static_cast<std::int64_t>(t->cells.size()));
        if (const auto* t = std::get_if<CellTable>(&sqp.seed)) d = std::lcm(d, static_cast<std::int64_t>(t->cells.size()));
        if (std::holds_alternative<SmoothMultiplier>(sqp.h)) d = std::lcm(d, std::int64_t{6});
        d = std::lcm(d, sqp.P);
        detail::require_divisible(s.n, d, "--N", "the construction needs its cells and R, P on the grid");
    }
    if (s.command == "certify") {
        require(s.r >= 1, "R must be a positive integer; use --R 1");
        require(s.p1 >= 1 && s.p2 >= 1, "P1 and P2 must be positive integers");
        detail::require_divisible(s.n, s.h == "example1-corrected" ? 6 : s.p1, "--N",
                                  "the multiplier grid needs N divisible by P1");
        detail::require_divisible(s.nl, s.p2, "--L", "the multiplier grid needs L divisible by P2");
    }
    if (s.command == "spread") require(s.pad >= 1, "pad must be a positive integer; use --pad 8");
    if (s.command == "s0norm")
        require(s.t > 0.0 && s.k > 0.0 && s.step > 0.0, "T, K and step must be positive; use --T 8 --K 16 --step 0.25");
}

/// Parses an argv-like token list (without the program name).
inline CommandSpec parse_command(const std::vector<std::string>& tokens) {
    CommandSpec s;
    CLI::App app("Zak transform and Gabor invariance toolkit", "zakbench");
    app.require_subcommand(1);
    // "--h" names the multiplier, so help is long-form only.
    app.set_help_flag("--help", "Print this help message and exit");
    std::string shift_text, sign_text, alpha_text, beta_text;

    auto window_opts = [&](CLI::App* c) {
        c->add_option("--window", s.window, "named window or .json spec");
        c->add_option("--N", s.n, "samples per unit length");
        c->add_option("--eps", s.eps, "second example parameter");
    };
    auto lattice_opts = [&](CLI::App* c) {
        c->add_option("--Q", s.q, "lattice parameter Q");
        c->add_option("--P", s.p, "lattice parameter P");
        c->add_option("--alpha", alpha_text, "separable lattice step alpha");
        c->add_option("--beta", beta_text, "separable lattice step beta");
    };
    auto output_opts = [&](CLI::App* c, bool grids) {
        c->add_option("--out", s.out, "report path (default stdout)");
        if (grids) {
            c->add_option("--csv", s.csv, "grid CSV path");
            c->add_option("--h-csv", s.h_csv, "multiplier CSV path");
        }
    };

    auto* zak_cmd = app.add_subcommand("zak", "discrete Zak transform and identity diagnostics");
    window_opts(zak_cmd);
    zak_cmd->add_option("--L", s.nl, "omega points per unit");
    zak_cmd->add_option("--shift", shift_text, "covariance test shift u,eta");
    zak_cmd->add_option("--sign", sign_text, "second example product sign");
    output_opts(zak_cmd, true);

    auto* bounds_cmd = app.add_subcommand("bounds", "Riesz bounds of the Zibulski-Zeevi field");
    window_opts(bounds_cmd);
    bounds_cmd->add_option("--L", s.nl, "omega points per unit");
    bounds_cmd->add_option("--sign", sign_text, "second example product sign");
    lattice_opts(bounds_cmd);
    output_opts(bounds_cmd, false);

    auto* inv_cmd = app.add_subcommand("invariance", "least-squares shift-invariance test");
    window_opts(inv_cmd);
    inv_cmd->add_option("--L", s.nl, "omega points per unit");
    lattice_opts(inv_cmd);
    inv_cmd->add_option("--shift", shift_text, "candidate shift u,eta");
    inv_cmd->add_option("--tol", s.tol, "membership tolerance");
    inv_cmd->add_option("--sign", sign_text, "sign for the optional product certificate");
    inv_cmd->add_option("--R", s.r, "product length for the optional certificate");
    inv_cmd->add_option("--M1", s.m1, "x frequency of the product target");
    inv_cmd->add_option("--M2", s.m2, "omega frequency of the product target");
    output_opts(inv_cmd, true);

    auto* con_cmd = app.add_subcommand("construct", "build a window from conditions (S), (Q), (P)");
    window_opts(con_cmd);
    con_cmd->add_option("--L", s.nl, "omega points per unit");
    con_cmd->add_option("--sign", sign_text, "product condition sign");
    output_opts(con_cmd, true);

    auto* cert_cmd = app.add_subcommand("certify", "winding numbers and divisibility certificate");
    cert_cmd->add_option("--h", s.h, "multiplier: exp:a,b or example1-corrected");
    cert_cmd->add_option("--N", s.n, "multiplier x points per unit");
    cert_cmd->add_option("--L", s.nl, "multiplier omega points per unit");
    cert_cmd->add_option("--P1", s.p1, "x period 1/P1");
    cert_cmd->add_option("--P2", s.p2, "omega period 1/P2");
    cert_cmd->add_option("--R", s.r, "product length");
    cert_cmd->add_option("--M1", s.m1, "x frequency of the product target");
    cert_cmd->add_option("--M2", s.m2, "omega frequency of the product target");
    cert_cmd->add_option("--shift", shift_text, "shift u,eta");
    cert_cmd->add_option("--sign", sign_text, "product sign");
    output_opts(cert_cmd, true);

    auto* spread_cmd = app.add_subcommand("spread", "time and frequency spreads");
    window_opts(spread_cmd);
    spread_cmd->add_option("--a", s.a, "time centre");
    spread_cmd->add_option("--b", s.b, "frequency centre");
    spread_cmd->add_option("--pad", s.pad, "zero-padding factor");
    spread_cmd->add_option("--sign", sign_text, "second example product sign");
    output_opts(spread_cmd, false);

    auto* s0_cmd = app.add_subcommand("s0norm", "Gaussian short-time Fourier l1 estimate");
    window_opts(s0_cmd);
    s0_cmd->add_option("--T", s.t, "time range");
    s0_cmd->add_option("--K", s.k, "frequency range");
    s0_cmd->add_option("--step", s.step, "lattice step");
    s0_cmd->add_option("--sign", sign_text, "second example product sign");
    output_opts(s0_cmd, false);

    auto* self_cmd = app.add_subcommand("selftest", "run the acceptance criteria");
    self_cmd->add_option("--level", s.level, "quick or full");
    output_opts(self_cmd, false);

    std::vector<std::string> args(tokens.rbegin(), tokens.rend());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        const CLI::App* target = &app;
        for (auto* sub : app.get_subcommands()) target = sub;
        throw HelpRequested{target->help()};
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        if (msg.empty()) msg = e.get_name();
        fail("invalid command line: " + msg + "; run zakbench --help");
    }
    for (auto* sub : app.get_subcommands()) s.command = sub->get_name();
    if (!shift_text.empty()) s.shift = detail::parse_shift(shift_text);
    if (!sign_text.empty()) s.sign = detail::parse_sign(sign_text);
    if (!alpha_text.empty()) s.alpha = Rational::parse(alpha_text);
    if (!beta_text.empty()) s.beta = Rational::parse(beta_text);
    validate(s);
    return s;
}

// ---------------------------------------------------------------------------
// Dispatch

struct Outcome {
    json report;
    int exit_code = 0;
};

namespace detail {

struct CsvJob {
    std::string path;
    std::string content;
};

inline json point_json(const GridPoint& g) { return {{"x", g.x.str()}, {"omega", g.omega.str()}}; }

inline json window_json(const SampledWindow& w) {
    const Support sup = measured_support(w);
    json j = {{"label", w.label()}, {"N", w.rate()}, {"start_index", w.start()},
              {"samples", w.size()}, {"energy", w.energy()}};
    j["support"] = sup.empty ? json(nullptr) : json({sup.lo.str(), sup.hi.str()});
    return j;
}

inline json lattice_json(const RationalLattice& l) {
    return {{"Q", l.q}, {"P", l.p}, {"density", l.density().str()}};
}

inline json provenance(const WindowSpec& w, std::int64_t nl) {
    json p = {{"N", w.n}, {"L", nl}, {"window_spec", zakbench::to_json(w)}};
    if (const auto* g = std::get_if<GaussianShape>(&w.shape)) p["gaussian_tail_bound"] = gaussian_tail_bound(*g);
    return p;
}

template <class Writer>
std::string render(Writer&& write) {
    std::ostringstream os;
    write(os);
    return os.str();
}

// Writes through a temporary file so that no partial CSV is ever visible.
inline void write_atomically(const CsvJob& job) {
    const std::string tmp = job.path + ".partial";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) fail("cannot write '" + job.path + "'");
        out << job.content;
        if (!out) fail("cannot write '" + job.path + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, job.path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail("cannot write '" + job.path + "'");
    }
}

inline std::string indexed_path(const std::string& path, std::size_t q, std::size_t count) {
    if (count == 1) return path;
    const std::filesystem::path p(path);
    return (p.parent_path() / (p.stem().string() + ".q" + std::to_string(q) + p.extension().string())).string();
}

inline int dispatch(const CommandSpec& s, json& results, json& prov, std::vector<CsvJob>& csv) {
    const std::string& c = s.command;
    if (c == "selftest") {
        const auto level = s.level == "full" ? acceptance::Level::full : acceptance::Level::quick;
        auto criteria = acceptance::run_all(level);
        criteria.push_back(acceptance::sign_mutation());
        bool ok = true;
        json list = json::array();
        for (const auto& r : criteria) {
            ok = ok && r.passed;
            json m = json::object();
            for (const auto& x : r.measurements) m[x.name] = x.value;
            list.push_back({{"id", r.id == 0 ? json("mutation") : json(r.id)},
                            {"title", r.title},
                            {"passed", r.passed},
                            {"detail", r.detail},
                            {"measurements", m}});
        }
        results = {{"level", s.level}, {"passed", ok}, {"criteria", list}};
        return ok ? 0 : 3;
    }
    if (c == "certify") {
        const HGrid h = certify_multiplier(s);
        const auto cert = divisibility_certificate(h, s.r, s.shift, s.m1, s.m2, s.sign);
        results = {{"multiplier", {{"spec", s.h}, {"P1", h.p1()}, {"P2", h.p2()}, {"nx", h.nx()}, {"nl", h.nl()}}},
                   {"R", cert.R},
                   {"shift", {{"u", s.shift.u.str()}, {"eta", s.shift.eta.str()}}},
                   {"M1", cert.m1},
                   {"M2", cert.m2},
                   {"sign", cert.sign},
                   {"product_defect", cert.product_defect},
                   {"product_holds", cert.product_holds},
                   {"q1", cert.q1},
                   {"q2", cert.q2},
                   {"rounding_defect", cert.rounding_defect},
                   {"identity_x", cert.identity_x},
                   {"identity_omega", cert.identity_omega},
                   {"integer_solvable", cert.integer_solvable},
                   {"pass", cert.pass},
                   {"reason", cert.reason}};
        prov = {{"N", s.n}, {"L", s.nl}};
        if (!s.h_csv.empty()) csv.push_back({s.h_csv, render([&](std::ostream& os) { write_csv(os, h); })});
        return cert.pass ? 0 : 3;
    }
    if (c == "construct") {
        const SQPSpec sqp = construct_spec(s);
        const auto built = construct_from_sqp(sqp, s.n, s.nl);
        const auto d = sqp_check(built.F, built.h, sqp.R, sqp.P, sqp.sign);
        results = {{"builder", zakbench::to_json(sqp)},
                   {"defects", {{"S", d.s}, {"Q", d.q}, {"P", d.p}}},
                   {"window", window_json(built.window)}};
        prov = {{"N", s.n}, {"L", s.nl}, {"support_threshold", 1e-13}};
        if (!s.csv.empty()) csv.push_back({s.csv, render([&](std::ostream& os) { write_csv(os, built.F); })});
        if (!s.h_csv.empty()) csv.push_back({s.h_csv, render([&](std::ostream& os) { write_csv(os, built.h); })});
        return 0;
    }

    const ResolvedWindow rw = resolve_window(s);
    const SampledWindow w = realize(rw.spec);
    prov = provenance(rw.spec, s.nl);
    results["window"] = window_json(w);

    if (c == "spread") {
        const auto r = time_frequency_spread(w, s.a, s.b, s.pad);
        results["spread"] = {{"a", s.a},
                             {"b", s.b},
                             {"pad", s.pad},
                             {"time_variance", r.time_variance},
                             {"frequency_variance", r.frequency_variance},
                             {"product", r.product},
                             {"transform_length", r.transform_length}};
        return 0;
    }
    if (c == "s0norm") {
        results["s0"] = {{"T", s.t}, {"K", s.k}, {"step", s.step}, {"estimate", feichtinger_norm_estimate(w, s.t, s.k, s.step)}};
        return 0;
    }

    const ZakGrid grid = zak(w, s.nl);
    results["grid"] = {{"Nx", grid.nx()}, {"L", grid.nl()}, {"k_min", grid.k_min()}, {"k_max", grid.k_max()}};
    if (c == "zak") {
        const auto d = validate_zak(w, grid, s.shift);
        results["diagnostics"] = {{"shift", {{"u", s.shift.u.str()}, {"eta", s.shift.eta.str()}}},
                                  {"window_energy", d.window_energy},
                                  {"grid_energy", d.grid_energy},
                                  {"unitarity_defect", d.unitarity_defect},
                                  {"covariance_defect", d.covariance_defect}};
        if (!s.csv.empty()) csv.push_back({s.csv, render([&](std::ostream& os) { write_csv(os, grid); })});
        return 0;
    }
    results["lattice"] = lattice_json(rw.lattice);
    if (c == "bounds") {
        const ZZField field = zz_field(grid, rw.lattice);
        const auto b = riesz_bounds(field);
        results["bounds"] = {{"A", b.lower},
                             {"B", b.upper},
                             {"argmin", point_json(b.argmin)},
                             {"argmax", point_json(b.argmax)},
                             {"rank_margin", b.rank_margin}};
        if (b.rank_margin > 1e-8)
            results["dual"] = {{"reproducing_defect", reproducing_defect(field, dual_field(field))}};
        else
            results["dual"] = nullptr;
        return 0;
    }
    // invariance
    const auto rep = invariance_test(grid, rw.lattice, s.shift, s.tol);
    json hs = json::array();
    for (std::size_t q = 0; q < rep.h.size(); ++q)
        hs.push_back({{"q", q}, {"min_modulus", rep.h[q].min_modulus()}, {"max_modulus", rep.h[q].max_modulus()}});
    results["invariance"] = {{"shift", {{"u", s.shift.u.str()}, {"eta", s.shift.eta.str()}}},
                             {"residual", rep.residual},
                             {"tolerance", rep.tolerance},
                             {"decision", rep.member ? "member" : "not member"},
                             {"degenerate_points", rep.degenerate_count},
                             {"h", hs}};
    if (s.r >= 2 && rep.h.size() == 1) {
        json cert = {{"R", s.r}, {"M1", s.m1}, {"M2", s.m2}, {"sign", s.sign}};
        try {
            cert["product_defect"] = h_product_check(rep.h[0], s.r, s.shift, s.m1, s.m2, s.sign);
            const auto wn = winding_numbers(rep.h[0]);
            cert["winding"] = {{"q1", wn.q1}, {"q2", wn.q2}, {"rounding_defect", wn.rounding_defect}};
        } catch (const Error& e) {
            cert["winding"] = {{"error", e.what()}};
        }
        results["invariance"]["certificates"] = cert;
    }
    if (!s.csv.empty()) csv.push_back({s.csv, render([&](std::ostream& os) { write_csv(os, rep.point_residual); })});
    if (!s.h_csv.empty())
        for (std::size_t q = 0; q < rep.h.size(); ++q)
            csv.push_back({indexed_path(s.h_csv, q, rep.h.size()),
                           render([&](std::ostream& os) { write_csv(os, rep.h[q]); })});
    return 0;
}

}  // namespace detail

/// Executes a validated command. CSV files are written only when the
/// command exits with status 0.
inline Outcome run(const CommandSpec& s) {
    const auto started = std::chrono::steady_clock::now();
    json results = json::object(), prov = json::object();
    std::vector<detail::CsvJob> csv;
    Outcome o;
    std::optional<Error> error;
    try {
        validate(s);
        o.exit_code = detail::dispatch(s, results, prov, csv);
        if (o.exit_code == 0)
            for (const auto& job : csv) detail::write_atomically(job);
    } catch (const Error& e) {
        error = e;
    } catch (const std::exception& e) {
        error = Error(ErrorKind::numerical, e.what());
    }
    if (error) o.exit_code = error->kind() == ErrorKind::precondition ? 2 : 3;

    o.report = json::object();
    o.report["schema"] = kSchema;
    o.report["tool"] = {{"name", "zakbench"}, {"version", kVersion}};
    o.report["input"] = to_json(s);
    o.report["status"] = error ? "error" : (o.exit_code == 0 ? "ok" : "failed");
    o.report["exit_code"] = o.exit_code;
    o.report["results"] = error ? json(nullptr) : results;
    o.report["provenance"] = prov;
    if (error)
        o.report["error"] = {{"kind", error->kind() == ErrorKind::precondition ? "precondition" : "numerical"},
                             {"message", error->what()}};
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    o.report["timing"] = {{"seconds", seconds}};
    return o;
}

}  // namespace zakbench::cli
