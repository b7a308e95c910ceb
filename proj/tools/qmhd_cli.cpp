// qmhd: dispersion tables, linear simulations, soliton runs and the oracle
// suite. Every subcommand writes CSV (or a report) to --out or stdout.

#include "qmhd/commands.hpp"
#include "qmhd/config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Common {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App *cmd, Common &common)
{
    cmd->add_option("--config", common.config_path, "key = value config file");
    cmd->add_option("--out", common.out, "output path (stdout when empty)");
    cmd->add_option("--seed", common.seed, "seed for randomized checks");
    cmd->allow_extras();
    cmd->footer("Any config key may be overridden as --section.key <value>, e.g. --background.hbar 0.5");
}

qmhd::RunConfig build_config(const Common &common, const std::vector<std::string> &extras)
{
    qmhd::RunConfig config = common.config_path.empty() ? qmhd::RunConfig{} : qmhd::load_config(common.config_path);
    for (std::size_t i = 0; i < extras.size(); ++i) {
        std::string arg = extras[i];
        if (arg.rfind("--", 0) != 0) {
            throw qmhd::ConfigError(0, "unexpected argument '" + arg + "'");
        }
        arg.erase(0, 2);
        std::string value;
        if (const auto eq = arg.find('='); eq != std::string::npos) {
            value = arg.substr(eq + 1);
            arg.resize(eq);
        } else if (i + 1 < extras.size()) {
            value = extras[++i];
        } else {
            throw qmhd::ConfigError(0, "missing value for --" + arg);
        }
        qmhd::apply_override(config, arg, value);
    }
    if (!common.out.empty()) {
        config.out = common.out;
    }
    if (common.seed) {
        config.seed = *common.seed;
    }
    qmhd::validate_config(config);
    return config;
}

int emit(const std::string &text, const std::string &path)
{
    if (path.empty()) {
        std::cout << text;
        return std::cout ? qmhd::kExitOk : qmhd::kExitConfigError;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        std::cerr << "error: cannot write '" << path << "'\n";
        return qmhd::kExitConfigError;
    }
    file << text;
    return qmhd::kExitOk;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Quantum-corrected MHD waves, linear simulation and log-NLS solitons"};
    app.require_subcommand(1);

    Common dispersion_opts;
    Common simulate_opts;
    Common soliton_opts;
    Common validate_opts;
    bool inject_fault = false;

    auto *dispersion = app.add_subcommand("dispersion", "closed-form phase speeds over a k range");
    auto *simulate = app.add_subcommand("simulate", "time-domain run of one seeded plane wave");
    auto *soliton = app.add_subcommand("soliton", "log-NLS soliton transit and profile");
    auto *validate = app.add_subcommand("validate", "run the oracle suite");
    add_common(dispersion, dispersion_opts);
    add_common(simulate, simulate_opts);
    add_common(soliton, soliton_opts);
    add_common(validate, validate_opts);
    validate->add_flag("--inject-fault", inject_fault, "corrupt the closed-form side of the eigen check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? qmhd::kExitOk : qmhd::kExitConfigError;
    }

    try {
        if (dispersion->parsed()) {
            const auto config = build_config(dispersion_opts, dispersion->remaining());
            return emit(qmhd::cmd_dispersion(config), config.out);
        }
        if (simulate->parsed()) {
            const auto config = build_config(simulate_opts, simulate->remaining());
            return emit(qmhd::cmd_simulate(config), config.out);
        }
        if (soliton->parsed()) {
            const auto config = build_config(soliton_opts, soliton->remaining());
            return emit(qmhd::cmd_soliton(config), config.out);
        }
        if (validate->parsed()) {
            const auto config = build_config(validate_opts, validate->remaining());
            const auto report = qmhd::cmd_validate(config.seed, {inject_fault});
            const int written = emit(report.text, config.out);
            if (written != qmhd::kExitOk) {
                return written;
            }
            return report.passed() ? qmhd::kExitOk : qmhd::kExitValidationFailed;
        }
    } catch (const qmhd::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return qmhd::kExitConfigError;
    } catch (const qmhd::Error &e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return qmhd::kExitNumericalFailure;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return qmhd::kExitNumericalFailure;
    }
    return qmhd::kExitOk;
}
