#include <zakbench/cli.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    using namespace zakbench::cli;
    const std::vector<std::string> tokens(argv + 1, argv + argc);
    CommandSpec spec;
    try {
        spec = parse_command(tokens);
    } catch (const HelpRequested& h) {
        std::cout << h.text;
        return 0;
    } catch (const zakbench::Error& e) {
        std::cerr << "zakbench: " << e.what() << '\n';
        return 2;
    }

    const Outcome outcome = run(spec);
    const std::string text = outcome.report.dump(2) + "\n";
    if (spec.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(spec.out, std::ios::binary);
        out << text;
        if (!out) {
            std::cerr << "zakbench: cannot write report to '" << spec.out << "'\n";
            return 2;
        }
    }
    if (spec.command == "selftest" && outcome.report["results"].is_object())
        for (const auto& c : outcome.report["results"]["criteria"])
            std::cerr << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["id"].dump() << ' '
                      << c["title"].get<std::string>() << '\n';
    if (outcome.report.contains("error"))
        std::cerr << "zakbench: " << outcome.report["error"]["message"].get<std::string>() << '\n';
    return outcome.exit_code;
}
