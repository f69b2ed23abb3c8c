// Command-line front end; talks to the library through the C interface only.

#include "wavecast/wavecast.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

namespace {

int exit_code(wc_status s) {
    switch (s) {
    case WC_OK: return 0;
    case WC_ERR_DATA:
    case WC_ERR_IO: return 2;
    case WC_ERR_NUMERIC: return 3;
    default: return 1;
    }
}

int report_failure(wc_status s) {
    std::fprintf(stderr, "wavecast: %s\n", wc_last_error());
    return exit_code(s);
}

bool is_stochastic(const std::string& command) {
    return command == "train" || command == "gridsearch" || command == "compare";
}

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wavelet + bidirectional LSTM forecasting toolkit"};
    app.set_version_flag("--version", wc_version());
    app.require_subcommand(1);

    std::string manifest_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool quiet = false;
    int verbose = 0;
    std::size_t seed_given = 0;
    // Global flags are accepted before or after the subcommand, so every
    // subcommand's --help lists them too.
    auto add_common = [&](CLI::App* a) {
        a->add_option("--manifest", manifest_path, "Run manifest (key = value lines); required");
        a->add_option_function<std::uint64_t>(
            "--seed",
            [&](const std::uint64_t& v) {
                seed = v;
                ++seed_given;
            },
            "Run seed; overrides the manifest. Drawn from entropy and printed when absent");
        a->add_option("--out", out_dir, "Output directory; overrides the manifest's 'out'");
        a->add_option("--threads", threads, "Parallel trials for gridsearch and compare")->check(CLI::Range(1u, 1024u));
        a->add_flag("--quiet", quiet, "Suppress progress messages and the summary");
        a->add_flag("-v,--verbose", verbose, "More progress detail (repeatable)");
    };
    add_common(&app);

    const std::pair<const char*, const char*> commands[] = {
        {"ingest", "Align OHLCV files and case counts into frame.csv and stats.json"},
        {"stats", "Descriptive statistics of the frame columns (stats.json)"},
        {"unitroot", "ADF and Phillips-Perron tests for every frame column (unitroot.json)"},
        {"decompose", "Per-column wavelet coefficients (decompose/<column>.csv)"},
        {"train", "Train one model and evaluate it on the test split (model.json, train.json)"},
        {"gridsearch", "Hyperparameter search (trials.json, ranking.csv, timings.csv)"},
        {"forecast", "Forecast the next horizon days from a trained model (forecast.csv)"},
        {"compare", "RAW vs WT_AD vs WT_ADA over several seeds (comparison.json)"},
    };
    for (const auto& [name, help] : commands) {
        add_common(app.add_subcommand(name, help));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    if (manifest_path.empty()) {
        std::fprintf(stderr, "wavecast: --manifest is required\n");
        return 1;
    }

    wc_set_verbosity(quiet ? 0 : 1 + verbose);
    wc_manifest* manifest = nullptr;
    if (const auto s = wc_manifest_load(manifest_path.c_str(), &manifest); s != WC_OK) {
        return report_failure(s);
    }
    auto set = [&](const char* key, const std::string& value) {
        return wc_manifest_set(manifest, key, value.c_str());
    };

    wc_status s = WC_OK;
    // --out is relative to the working directory, manifest paths to the manifest.
    if (!out_dir.empty()) s = set("out", std::filesystem::absolute(out_dir).string());
    if (s == WC_OK && threads > 0) s = set("threads", std::to_string(threads));
    if (s == WC_OK && seed_given > 0) {
        s = set("seed", std::to_string(seed));
    } else if (s == WC_OK && is_stochastic(command)) {
        char* existing = nullptr;
        s = wc_manifest_get(manifest, "seed", &existing);
        if (s == WC_OK && existing == nullptr) {
            const auto drawn = entropy_seed();
            std::fprintf(stderr, "seed: %llu\n", static_cast<unsigned long long>(drawn));
            s = set("seed", std::to_string(drawn));
        }
        wc_string_free(existing);
    }
    if (s != WC_OK) {
        wc_manifest_free(manifest);
        return report_failure(s);
    }

    char* report = nullptr;
    s = wc_run_command(manifest, command.c_str(), &report);
    wc_manifest_free(manifest);
    if (s != WC_OK) {
        return report_failure(s);
    }
    if (!quiet && report) {
        std::fputs(report, stdout);
    }
    wc_string_free(report);
    return 0;
}
