//------------------------------------------------------------------------------
// main.cpp
// syngen: scripted assertion generator for loop testing. Reads a feedback
// payload (JSON) on stdin and writes a JSON array of {id, sva} to stdout.
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "svacov/feedback.hpp"
#include "svacov/json_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <sstream>

using namespace svacov;

int main(int argc, char** argv) {
    CLI::App app{"scripted assertion generator (feedback JSON in, {id, sva} array out)"};
    std::string mode = "perfect";
    app.add_option("--mode", mode, "perfect|one|none")->capture_default_str();
    bool malformed = false;
    app.add_flag("--emit-garbage", malformed, "reply with non-JSON (failure-path testing)");
    CLI11_PARSE(app, argc, argv);

    SyntheticMode m;
    if (mode == "perfect")
        m = SyntheticMode::perfect;
    else if (mode == "one")
        m = SyntheticMode::one_point;
    else if (mode == "none")
        m = SyntheticMode::none;
    else {
        std::cerr << "unknown --mode '" << mode << "'\n";
        return 3;
    }

    std::ostringstream buffer;
    buffer << std::cin.rdbuf();

    if (malformed) {
        std::cout << "this is not JSON\n";
        return 0;
    }

    try {
        FeedbackPayload payload =
            feedback_from_json(nlohmann::json::parse(buffer.str()));
        nlohmann::json out = nlohmann::json::array();
        for (const auto& g : synthetic_generate(payload, m))
            out.push_back({{"id", g.id}, {"sva", g.sva}});
        std::cout << out.dump() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "syngen: " << e.what() << "\n";
        return 1;
    }
}
