// Scripted external policy for tests and as a reference implementation of
// the wire protocol v1. Reads one JSON request per stdin line and answers
// one JSON response per line.
//
// --script takes a comma-separated list consumed one item per request:
//   good       valid PolicyOutput (label from --label)
//   bad        deliberately malformed JSON
//   invalid    well-formed JSON violating the PolicyOutput schema
//   echo       echoes the request object back (never schema-valid)
// The last item repeats once the list is exhausted.

#include <nlohmann/json.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

int main(int argc, char** argv) {
    std::string script = "good";
    std::string label = "Healthy";
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--script" && i + 1 < argc) script = argv[++i];
        else if (arg == "--label" && i + 1 < argc) label = argv[++i];
        else {
            std::cerr << "usage: policy_stub [--script good,bad,...] [--label Label]\n";
            return 2;
        }
    }

    std::vector<std::string> steps;
    std::stringstream ss(script);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) steps.push_back(item);
    }
    if (steps.empty()) steps.push_back("good");

    std::size_t index = 0;
    std::string line;
    while (std::getline(std::cin, line)) {
        const std::string& step = index < steps.size() ? steps[index] : steps.back();
        ++index;
        if (step == "bad") {
            std::cout << "{this is not json" << std::endl;
            continue;
        }
        if (step == "invalid") {
            std::cout << json{{"label", "NotALabel"}, {"reasoning", "oops"}}.dump() << std::endl;
            continue;
        }
        if (step == "echo") {
            std::cout << line << std::endl;
            continue;
        }
        const json out = {{"label", label},
                          {"reasoning", "scripted stub response"},
                          {"evidence_citations", {"stub script"}},
                          {"propagation_claims", json::array()},
                          {"next_candidates", json::array()},
                          {"direction", "upstream"}};
        std::cout << out.dump() << std::endl;
    }
    return 0;
}
