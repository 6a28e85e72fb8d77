// sqglab command-line front end.  Parses flags and config files, then drives
// the shared library through its C interface only.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sqglab.h"

namespace {

using nlohmann::json;

// Minimal flat-TOML reader: `key = value` lines with numbers, quoted
// strings, booleans and one-level arrays.  Comments start with '#'.
json parse_flat_toml(std::istream& in) {
    json out = json::object();
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("config line " + std::to_string(lineno) + ": " + msg);
    };
    auto parse_scalar = [&](std::string tok) -> json {
        if (tok.empty()) fail("empty value");
        if (tok.front() == '"') {
            if (tok.size() < 2 || tok.back() != '"') fail("unterminated string");
            return tok.substr(1, tok.size() - 2);
        }
        if (tok == "true") return true;
        if (tok == "false") return false;
        try {
            std::size_t used = 0;
            if (tok.find_first_of(".eE") == std::string::npos) {
                const long long v = std::stoll(tok, &used);
                if (used == tok.size()) return v;
            }
            const double v = std::stod(tok, &used);
            if (used == tok.size()) return v;
        } catch (...) {
        }
        fail("cannot parse value '" + tok + "'");
        return nullptr;
    };
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) fail("empty key");
        if (!val.empty() && val.front() == '[') {
            if (val.back() != ']') fail("unterminated array");
            json arr = json::array();
            std::stringstream items(val.substr(1, val.size() - 2));
            std::string item;
            while (std::getline(items, item, ',')) {
                item = trim(item);
                if (!item.empty()) arr.push_back(parse_scalar(item));
            }
            out[key] = arr;
        } else {
            out[key] = parse_scalar(val);
        }
    }
    return out;
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        json j;
        in >> j;
        return j;
    }
    return parse_flat_toml(in);
}

std::string take_string(char* s) {
    std::string out = s ? s : "";
    sqg_string_free(s);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sqglab: spectral simulation and statistical verification of the stochastic "
                 "streamline dynamics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sqg_version()));

    char* names_raw = nullptr;
    if (sqg_experiment_list(&names_raw) != SQG_OK) {
        std::cerr << "error: " << sqg_last_error() << "\n";
        return 2;
    }
    std::vector<std::string> names;
    {
        std::stringstream ss(take_string(names_raw));
        std::string item;
        while (std::getline(ss, item, ',')) names.push_back(item);
    }

    struct {
        std::string config_file;
        std::string out_dir;
        std::string preset;
        std::string format;
        double delta = NAN, epsilon = NAN, T = NAN, dt = NAN, lambda = NAN, t_frak = NAN;
        std::int64_t N = -1, M = -1, ensembles = -1, p = -1, samples = -1;
        std::uint64_t seed = 0;
        bool seed_set = false;
        bool quiet = false;
    } opt;

    std::vector<CLI::App*> subs;
    for (const auto& name : names) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", opt.config_file, "TOML or JSON config file");
        sub->add_option("--out", opt.out_dir, "output directory for CSV tables and reports");
        sub->add_option("--seed", opt.seed, "root seed")->each([&](const std::string&) {
            opt.seed_set = true;
        });
        sub->add_option("--delta", opt.delta, "diffusion exponent");
        sub->add_option("--epsilon", opt.epsilon, "regularity margin");
        sub->add_option("-N,--N", opt.N, "truncation band");
        sub->add_option("-M,--M", opt.M, "comparison band");
        sub->add_option("-T,--T", opt.T, "time horizon");
        sub->add_option("--dt", opt.dt, "time step (0 = automatic policy)");
        sub->add_option("--ensembles", opt.ensembles, "ensemble size");
        sub->add_option("--samples", opt.samples, "Monte Carlo sample count");
        sub->add_option("--p", opt.p, "moment order (L^{2p} norms)");
        sub->add_option("--lambda", opt.lambda, "exponential-moment parameter");
        sub->add_option("--t-frak", opt.t_frak, "contraction-statistic horizon");
        sub->add_option("--preset", opt.preset, "multiplier preset: spde | generator");
        sub->add_option("--format", opt.format, "trajectory output format: jsonl | bin");
        sub->add_flag("--quiet", opt.quiet, "suppress the per-check summary");
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    std::string experiment;
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed()) experiment = names[i];

    json overrides = json::object();
    try {
        if (!opt.config_file.empty()) overrides = load_config_file(opt.config_file);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (opt.seed_set) overrides["seed"] = opt.seed;
    if (!std::isnan(opt.delta)) overrides["delta"] = opt.delta;
    if (!std::isnan(opt.epsilon)) overrides["epsilon"] = opt.epsilon;
    if (!std::isnan(opt.T)) overrides["T"] = opt.T;
    if (!std::isnan(opt.dt)) overrides["dt"] = opt.dt;
    if (!std::isnan(opt.lambda)) overrides["lambda"] = opt.lambda;
    if (!std::isnan(opt.t_frak)) overrides["t_frak"] = opt.t_frak;
    if (opt.N >= 0) overrides["N"] = opt.N;
    if (opt.M >= 0) overrides["M"] = opt.M;
    if (opt.ensembles >= 0) overrides["ensembles"] = opt.ensembles;
    if (opt.p >= 0) overrides["p"] = opt.p;
    if (opt.samples >= 0) overrides["samples"] = opt.samples;
    if (!opt.preset.empty()) overrides["preset"] = opt.preset;
    if (!opt.format.empty()) overrides["format"] = opt.format;

    sqg_report* report = nullptr;
    const std::string cfg = overrides.dump();
    const sqg_status st = sqg_experiment_run(experiment.c_str(), cfg.c_str(),
                                             opt.out_dir.empty() ? nullptr : opt.out_dir.c_str(),
                                             &report);
    if (st != SQG_OK) {
        std::cerr << "error: " << sqg_last_error() << "\n";
        return 2;
    }

    if (!opt.quiet) {
        char* summary = nullptr;
        if (sqg_report_summary(report, &summary) == SQG_OK) std::cout << take_string(summary);
    }
    int passed = 0;
    sqg_report_passed(report, &passed);
    if (opt.out_dir.empty() && !opt.quiet) {
        char* rj = nullptr;
        if (sqg_report_json(report, &rj) == SQG_OK) std::cout << take_string(rj) << "\n";
    }
    sqg_report_free(report);
    return passed ? 0 : 1;
}
