#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <zakbench/cli.hpp>

using namespace zakbench;
using namespace zakbench::cli;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    for (std::string t; is >> t;) out.push_back(t);
    return out;
}

CommandSpec parse(const std::string& line) { return parse_command(split(line)); }

std::string parse_error(const std::string& line) {
    try {
        (void)parse(line);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::precondition);
        return e.what();
    }
    ADD_FAILURE() << "accepted: " << line;
    return {};
}

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() /
                       (std::string("zakbench_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json without_timing(json report) {
    report.erase("timing");
    return report;
}

}  // namespace

TEST(Parse, InvarianceCommand) {
    const CommandSpec s = parse("invariance --window example1 --N 720 --Q 1 --P 3 --shift 1/2,0 --L 64");
    EXPECT_EQ(s.command, "invariance");
    EXPECT_EQ(s.window, "example1");
    EXPECT_EQ(s.n, 720);
    EXPECT_EQ(s.nl, 64);
    EXPECT_EQ(s.q, 1);
    EXPECT_EQ(s.p, 3);
    EXPECT_EQ(s.shift, (TimeFrequencyShift{Rational(1, 2), Rational(0)}));
}

TEST(Parse, CertifyCommand) {
    const CommandSpec s = parse("certify --h exp:2,0 --R 2 --shift 1/2,0 --M1 4 --N 32 --L 32 --sign +1");
    EXPECT_EQ(s.command, "certify");
    EXPECT_EQ(s.h, "exp:2,0");
    EXPECT_EQ(s.r, 2);
    EXPECT_EQ(s.m1, 4);
    EXPECT_EQ(s.sign, 1);
    EXPECT_EQ(parse("construct --window example2 --sign -1").sign, -1);
}

TEST(Parse, SeparableLattice) {
    const CommandSpec s = parse("bounds --window gaussian --alpha 1 --beta 3/2");
    ASSERT_TRUE(s.alpha && s.beta);
    EXPECT_EQ(*s.beta, Rational(3, 2));
    EXPECT_EQ(resolve_window(s).lattice, RationalLattice(2, 3));
    EXPECT_NE(parse_error("bounds --window gaussian --alpha 1").find("--alpha and --beta"), std::string::npos);
}

TEST(Parse, IndivisibleResolutionSuggestsFix) {
    const std::string msg = parse_error("invariance --window example1 --N 721 --Q 1 --P 3 --shift 1/2,0");
    EXPECT_NE(msg.find("721 not divisible by 6"), std::string::npos) << msg;
    EXPECT_NE(msg.find("use --N 720"), std::string::npos) << msg;
}

TEST(Parse, LatticeAndShiftDivisibility) {
    EXPECT_NE(parse_error("bounds --window indicator --N 10 --Q 1 --P 3").find("10 not divisible by 3"),
              std::string::npos);
    EXPECT_NE(parse_error("zak --window indicator --N 720 --shift 1/7,0").find("not divisible by 7"), std::string::npos);
    EXPECT_NE(parse_error("zak --window indicator --L 64 --shift 0,1/3").find("use --L"), std::string::npos);
    EXPECT_NE(parse_error("bounds --window indicator --Q 2 --P 4").find("gcd"), std::string::npos);
}

TEST(Parse, MalformedInput) {
    EXPECT_NE(parse_error("zak --shift 1/2").find("malformed shift"), std::string::npos);
    EXPECT_NE(parse_error("zak --sign 2").find("malformed sign"), std::string::npos);
    EXPECT_NE(parse_error("zak --window nosuch").find("unknown window"), std::string::npos);
    EXPECT_NE(parse_error("frobnicate").find("invalid command line"), std::string::npos);
    EXPECT_NE(parse_error("zak --Q 3").find("invalid command line"), std::string::npos);
    EXPECT_NE(parse_error("selftest --level slow").find("level"), std::string::npos);
}

TEST(Parse, HelpIsNotAnError) {
    EXPECT_THROW((void)parse("--help"), HelpRequested);
    try {
        (void)parse("invariance --help");
    } catch (const HelpRequested& h) {
        EXPECT_NE(h.text.find("--shift"), std::string::npos);
    }
}

TEST(CommandJson, RoundTrip) {
    for (const char* line : {"invariance --window example1 --N 720 --Q 1 --P 3 --shift 1/2,0 --tol 1e-7",
                             "bounds --window gaussian --alpha 1 --beta 3/2",
                             "certify --h exp:2,0 --R 2 --shift 1/2,0 --M1 4 --N 32 --L 32 --sign +1",
                             "spread --window bspline3 --a 1.5 --pad 4", "s0norm --window example1 --K 32",
                             "selftest --level full"}) {
        const CommandSpec s = parse(line);
        EXPECT_EQ(command_from_json(json::parse(to_json(s).dump())), s) << line;
    }
}

TEST(WindowSpecJson, RoundTripEveryVariant) {
    const std::vector<WindowSpec> specs = {
        {example1_shape(), 720, "e1"},
        {GaussianShape{0.5, 1.25, Rational(4)}, 360, "g"},
        {BSplineShape{3, Rational(1, 2), 2.0}, 120, "b"},
        {Example2Shape{0.2, 1, 32}, 72, "e2"},
        {RawShape{8, -3, {cplx{1.0, -0.5}, cplx{0.25, 0.0}}}, 8, "raw"},
    };
    for (const auto& s : specs) EXPECT_EQ(window_spec_from_json(json::parse(to_json(s).dump())), s) << s.label;
    EXPECT_THROW((void)window_spec_from_json(json{{"variant", "triangle"}}), Error);
    EXPECT_THROW((void)window_spec_from_json(json{{"params", json::object()}}), Error);
}

TEST(SQPSpecJson, RoundTrip) {
    for (const SQPSpec& s : {example1_sqp(-1), example1_sqp(1), example2_sqp(0.25)})
        EXPECT_EQ(sqp_spec_from_json(json::parse(to_json(s).dump())), s);
    EXPECT_THROW((void)sqp_spec_from_json(json{{"h", {{"formula", "wavy"}}}, {"seed", {{"formula", "bump"}}}}), Error);
}

TEST(Run, InvarianceReport) {
    const Outcome o = run(parse("invariance --window example1 --N 720 --Q 1 --P 3 --shift 1/2,0"));
    EXPECT_EQ(o.exit_code, 0);
    EXPECT_EQ(o.report["schema"], "zakbench/1");
    EXPECT_EQ(o.report["status"], "ok");
    const auto& inv = o.report["results"]["invariance"];
    EXPECT_EQ(inv["decision"], "not member");
    EXPECT_NEAR(inv["residual"].get<double>(), 4.0 / 9.0, 1e-12);
    EXPECT_EQ(o.report["provenance"]["window_spec"]["variant"], "piecewise");
}

TEST(Run, CorrectedExampleIsMember) {
    const Outcome o = run(parse("invariance --window example1-corrected --Q 1 --P 3 --shift 1/2,0"));
    EXPECT_EQ(o.exit_code, 0);
    EXPECT_EQ(o.report["results"]["invariance"]["decision"], "member");
}

TEST(Run, BoundsOfDisplayedExample) {
    const Outcome o = run(parse("bounds --window example1 --Q 1 --P 3"));
    ASSERT_EQ(o.exit_code, 0);
    EXPECT_NEAR(o.report["results"]["bounds"]["A"].get<double>(), 2.25, 1e-9);
    EXPECT_NEAR(o.report["results"]["bounds"]["B"].get<double>(), 9.0, 1e-9);
    EXPECT_LE(o.report["results"]["dual"]["reproducing_defect"].get<double>(), 1e-10);
}

TEST(Run, GaussianTailBoundIsRecorded) {
    const Outcome o = run(parse("spread --window gaussian --N 720"));
    ASSERT_EQ(o.exit_code, 0);
    EXPECT_LT(o.report["provenance"]["gaussian_tail_bound"].get<double>(), 1e-80);
    EXPECT_NEAR(o.report["results"]["spread"]["product"].get<double>(), 1.0 / (16.0 * std::numbers::pi * std::numbers::pi), 1e-6);
}

TEST(Run, CertificateOutcomes) {
    EXPECT_EQ(run(parse("certify --h exp:2,0 --R 2 --shift 1/2,0 --M1 4 --N 32 --L 32 --sign +1")).exit_code, 0);
    const Outcome bad = run(parse("certify --h exp:2,0 --R 2 --shift 1/2,0 --M1 3 --N 32 --L 32 --sign +1"));
    EXPECT_EQ(bad.exit_code, 3);
    EXPECT_EQ(bad.report["status"], "failed");
    EXPECT_FALSE(bad.report["results"]["integer_solvable"].get<bool>());
}

TEST(Run, NumericalErrorExitsThree) {
    const Outcome o = run(parse("certify --h example1-corrected --P1 3 --R 2 --shift 1/2,0 --M2 1"));
    EXPECT_EQ(o.exit_code, 3);
    EXPECT_EQ(o.report["status"], "error");
    EXPECT_EQ(o.report["error"]["kind"], "numerical");
    EXPECT_NE(o.report["error"]["message"].get<std::string>().find("phase aliasing"), std::string::npos);
    EXPECT_TRUE(o.report["results"].is_null());
}

TEST(Run, MalformedMultiplierExitsTwo) {
    const Outcome o = run(parse("certify --h exp:1 --N 32 --L 32"));
    EXPECT_EQ(o.exit_code, 2);
    EXPECT_NE(o.report["error"]["message"].get<std::string>().find("exp:a,b"), std::string::npos);
}

TEST(Run, PreconditionErrorExitsTwo) {
    CommandSpec s = parse("zak --window indicator");
    s.n = 721;
    s.shift = {Rational(1, 2), Rational(0)};
    const Outcome o = run(s);
    EXPECT_EQ(o.exit_code, 2);
    EXPECT_EQ(o.report["error"]["kind"], "precondition");
}

TEST(Run, IndicatorCsvIsAllOnes) {
    const fs::path dir = scratch_dir();
    const fs::path csv = dir / "zak.csv";
    const Outcome o = run(parse("zak --window indicator --N 12 --L 4 --csv " + csv.string()));
    ASSERT_EQ(o.exit_code, 0);
    std::istringstream in(slurp(csv));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x,omega,re,im");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(line.substr(line.rfind(',', line.rfind(',') - 1)), ",1,0") << line;
    }
    EXPECT_EQ(rows, 48);
    fs::remove_all(dir);
}

TEST(Run, NoCsvWhenTheCommandFails) {
    const fs::path dir = scratch_dir();
    const fs::path good = dir / "good.csv", bad = dir / "bad.csv";
    EXPECT_EQ(run(parse("certify --h exp:2,0 --R 2 --shift 1/2,0 --M1 4 --N 32 --L 32 --sign +1 --h-csv " +
                        good.string()))
                  .exit_code,
              0);
    EXPECT_TRUE(fs::exists(good));
    EXPECT_EQ(run(parse("certify --h exp:2,0 --R 2 --shift 1/2,0 --M1 3 --N 32 --L 32 --sign +1 --h-csv " +
                        bad.string()))
                  .exit_code,
              3);
    EXPECT_FALSE(fs::exists(bad));
    EXPECT_FALSE(fs::exists(bad.string() + ".partial"));
    fs::remove_all(dir);
}

TEST(Run, MultiplierCsvsPerLatticeRow) {
    const fs::path dir = scratch_dir();
    const Outcome o = run(parse("invariance --window gaussian --N 360 --Q 2 --P 3 --shift 1/4,0 --h-csv " +
                                (dir / "h.csv").string() + " --csv " + (dir / "r.csv").string()));
    ASSERT_EQ(o.exit_code, 0);
    EXPECT_TRUE(fs::exists(dir / "h.q0.csv"));
    EXPECT_TRUE(fs::exists(dir / "h.q1.csv"));
    EXPECT_TRUE(fs::exists(dir / "r.csv"));
    fs::remove_all(dir);
}

TEST(Run, ConstructFromJsonSpec) {
    const fs::path dir = scratch_dir();
    const fs::path spec = dir / "builder.json";
    std::ofstream(spec) << to_json(example1_sqp(-1)).dump();
    const Outcome o = run(parse("construct --window " + spec.string()));
    ASSERT_EQ(o.exit_code, 0);
    EXPECT_LE(o.report["results"]["defects"]["S"].get<double>(), 1e-12);
    EXPECT_EQ(o.report["results"]["window"]["support"][0], "1/6");
    fs::remove_all(dir);
}

TEST(Run, WindowFromJsonFile) {
    const fs::path dir = scratch_dir();
    const fs::path spec = dir / "w.json";
    std::ofstream(spec) << to_json(WindowSpec{example1_corrected_shape(), 720, "mine"}).dump();
    const Outcome o = run(parse("invariance --window " + spec.string() + " --Q 1 --P 3 --shift 1/2,0"));
    ASSERT_EQ(o.exit_code, 0);
    EXPECT_EQ(o.report["results"]["invariance"]["decision"], "member");
    fs::remove_all(dir);
}

TEST(Run, DeterministicApartFromTiming) {
    const CommandSpec s = parse("invariance --window example2 --N 360 --Q 1 --P 3 --shift 1/2,0 --R 2 --M2 1");
    const std::string a = without_timing(run(s).report).dump(2);
    const std::string b = without_timing(run(s).report).dump(2);
    EXPECT_EQ(a, b);
    EXPECT_TRUE(json::parse(a)["results"]["invariance"].contains("certificates"));
}

#ifdef ZAKBENCH_EXE
TEST(Executable, ReportOnStdoutAndExitCode) {
    const fs::path dir = scratch_dir();
    const fs::path out = dir / "report.json";
    const std::string cmd = std::string(ZAKBENCH_EXE) + " bounds --window example1 --Q 1 --P 3 --out " + out.string();
    EXPECT_EQ(std::system(cmd.c_str()), 0);
    const json report = json::parse(slurp(out));
    EXPECT_EQ(report["exit_code"], 0);
    EXPECT_EQ(report["tool"]["version"], kVersion);
    const std::string bad = std::string(ZAKBENCH_EXE) + " zak --N 721 2> " + (dir / "err.txt").string();
    const int status = std::system(bad.c_str());
    EXPECT_EQ(WEXITSTATUS(status), 2);
    EXPECT_NE(slurp(dir / "err.txt").find("not divisible by 6"), std::string::npos);
    fs::remove_all(dir);
}
#endif
