// ndsym command-line front-end: one JSON config per run, artifacts to an
// output directory, exit 0/1/2 for pass / failed check / bad configuration.
// All functionality lives behind the shared-library C interface.

#include <ndsym/ndsym.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CommandDesc {
    const char* name;
    const char* help;
};

constexpr CommandDesc kCommands[] = {
    {"check-symbol", "negative-definiteness and symbol-class checks"},
    {"evolve", "time-sliced evolution of an initial function"},
    {"compose", "discrete symbol composition b # c"},
    {"kernel", "Markov transition kernel over a time window"},
    {"sample", "sample process paths through a kernel chain"},
    {"verify-decomposition", "one-step decomposition identity and scaling checks"},
    {"verify-family", "Markov evolution-family axioms"},
    {"convergence", "dyadic slice-refinement trace of the sliced symbol"},
    {"cross-validate", "parametrix vs time-slicing comparison"},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("ndsym ") + ndsym_version() +
                 " — batch runner for symbol evolution experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    for (const CommandDesc& cmd : kCommands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", config_path, "JSON run configuration")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    std::ifstream in(config_path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (!in) {
        std::fprintf(stderr, "ndsym: cannot read %s\n", config_path.c_str());
        return 2;
    }

    nlohmann::json config;
    try {
        config = nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "ndsym: malformed config: %s\n", e.what());
        return 2;
    }
    config["command"] = command;
    if (out_dir.empty()) out_dir = config.value("output_dir", std::string("out"));

    char* summary = nullptr;
    ndsym_status status = ndsym_run_json(config.dump().c_str(), out_dir.c_str(), &summary);
    if (summary) {
        std::fputs(summary, stdout);
        ndsym_string_free(summary);
    }
    switch (status) {
    case NDSYM_OK:
        return 0;
    case NDSYM_ERR_CHECK_FAILED:
        return 1;
    default:
        std::fprintf(stderr, "ndsym: %s\n", ndsym_last_error());
        return 2;
    }
}
