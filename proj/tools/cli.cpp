#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mwlab/arith_sieve.hpp"
#include "mwlab/fwht.hpp"
#include "mwlab/lemma_lab.hpp"
#include "mwlab/limits.hpp"
#include "mwlab/report.hpp"
#include "mwlab/sum_lab.hpp"
#include "mwlab/walsh.hpp"

namespace mwlab::cli {

namespace {

struct Globals {
    std::optional<int> lambda;
    std::uint64_t seed = 1;
    std::string out;
    std::string format;
    std::optional<double> max_mem_gib;
    unsigned threads = 0;
    bool wall_clock = false;
};

struct Outcome {
    RunManifest manifest;
    bool summarize = true;
};

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// "0b101", "0x5", "5" as a bitmask; "{0,2}" or "0,2" as bit positions.
WalshMask parse_mask(std::string text, int lambda)
{
    text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }),
               text.end());
    try {
        if (text.find(',') != std::string::npos || text.starts_with('{')) {
            if (text.starts_with('{')) text = text.substr(1);
            if (text.ends_with('}')) text.pop_back();
            std::vector<int> positions;
            std::stringstream ss(text);
            for (std::string item; std::getline(ss, item, ',');) {
                if (!item.empty()) positions.push_back(std::stoi(item));
            }
            return WalshMask::from_positions(positions, lambda);
        }
        std::size_t used = 0;
        std::uint64_t bits = 0;
        if (text.starts_with("0b") || text.starts_with("0B")) {
            bits = std::stoull(text.substr(2), &used, 2);
            used += 2;
        } else {
            bits = std::stoull(text, &used, 0);
        }
        if (used != text.size()) throw std::invalid_argument(text);
        return WalshMask(bits, lambda);
    } catch (const ArgumentError&) {
        throw;
    } catch (const std::logic_error&) {
        throw ArgumentError("cannot parse mask '" + text + "'");
    }
}

ResourceLimits resolve_limits(const Globals& g)
{
    auto limits = ResourceLimits::from_environment();
    if (g.max_mem_gib) limits.set_max_mem_gib(*g.max_mem_gib);
    return limits;
}

int require_lambda(const Globals& g, std::string_view command)
{
    if (!g.lambda) throw ArgumentError(std::string(command) + " needs --lambda");
    return *g.lambda;
}

Json top_entries(const Spectrum& s, std::size_t count)
{
    std::vector<std::uint64_t> order(s.size());
    std::iota(order.begin(), order.end(), std::uint64_t{0});
    count = std::min(count, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                      [&](std::uint64_t a, std::uint64_t b) {
                          const double x = std::abs(s[a]), y = std::abs(s[b]);
                          return x != y ? x > y : a < b;
                      });
    Json top = Json::array();
    for (std::size_t i = 0; i < count; ++i) {
        top.push_back({{"mask", order[i]}, {"value", json_number(s[order[i]])}});
    }
    return top;
}

void write_output(const Globals& g, const RunManifest& manifest, std::ostream& out)
{
    std::string format = g.format;
    if (format.empty()) format = ends_with(g.out, ".csv") ? "csv" : "json";
    const std::string text = format == "csv" ? emit_csv(manifest.reports) : serialize_manifest(manifest);
    if (g.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(g.out, std::ios::binary);
    if (!file) throw ArgumentError("cannot open '" + g.out + "' for writing");
    file << text;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Walsh correlation and bilinear-sum laboratory", "mwlab"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(MWLAB_VERSION));

    Globals g;
    app.add_option("--lambda", g.lambda, "Bit length lambda");
    app.add_option("--seed", g.seed, "Seed for every random draw")->capture_default_str();
    app.add_option("--out", g.out, "Write the manifest (JSON or CSV by extension) to this path");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--max-mem-gib", g.max_mem_gib, "Memory budget in GiB (also WSL_MAX_MEM_GIB)")
        ->check(CLI::PositiveNumber);
    app.add_option("--threads", g.threads, "Worker threads, 0 = hardware concurrency");
    app.add_flag("--wall-clock", g.wall_clock, "Record start and finish timestamps");

    // sieve
    std::string sieve_kind = "moebius";
    auto* sieve_cmd = app.add_subcommand("sieve", "Tabulate an arithmetic function on [0, 2^lambda)");
    sieve_cmd->add_option("--kind", sieve_kind, "moebius | liouville | von_mangoldt")->capture_default_str();

    // spectrum
    std::string spectrum_kind = "moebius";
    std::string spectrum_in;
    std::size_t spectrum_top = 8;
    bool spectrum_normalized = false;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Walsh spectrum of a sieved or dumped sequence");
    spectrum_cmd->add_option("--kind", spectrum_kind, "Function to sieve")->capture_default_str();
    spectrum_cmd->add_option("--in", spectrum_in, "Read an AWS1 dump instead of sieving");
    spectrum_cmd->add_option("--top", spectrum_top, "Largest entries to list")->capture_default_str();
    spectrum_cmd->add_flag("--normalized", spectrum_normalized, "Scale by 2^-lambda");

    // theorem-scan
    std::string scan_kind = "moebius";
    std::optional<int> scan_lo, scan_hi;
    int scan_step = 1;
    auto* theorem_cmd = app.add_subcommand("theorem-scan", "Maximal Walsh correlation against the theorem bound");
    theorem_cmd->add_option("--kind", scan_kind, "moebius | liouville")->capture_default_str();
    theorem_cmd->add_option("--lambda-min", scan_lo, "First lambda");
    theorem_cmd->add_option("--lambda-max", scan_hi, "Last lambda");
    theorem_cmd->add_option("--step", scan_step, "Lambda step")->check(CLI::PositiveNumber)->capture_default_str();

    // lemma-check
    std::string lemma_name;
    std::string lemma_masks = "structured";
    std::optional<int> lemma_lo, lemma_hi;
    ScanConfig lemma_defaults;
    std::vector<int> lemma_r = lemma_defaults.lemma4_r;
    std::size_t lemma_residues = lemma_defaults.lemma4_residues;
    std::vector<int> lemma_sigma = lemma_defaults.lemma5_sigma;
    std::vector<int> lemma_t = lemma_defaults.lemma5_t;
    std::size_t lemma_intervals = lemma_defaults.lemma6_intervals;
    auto* lemma_cmd = app.add_subcommand("lemma-check", "Frequency-side inequalities over a mask family");
    lemma_cmd->add_option("--lemma", lemma_name, "1..6 or L1..L6")->required();
    lemma_cmd->add_option("--masks", lemma_masks, "all | structured | random[:count]")->capture_default_str();
    lemma_cmd->add_option("--lambda-min", lemma_lo, "First lambda");
    lemma_cmd->add_option("--lambda-max", lemma_hi, "Last lambda");
    lemma_cmd->add_option("--r", lemma_r, "Residue moduli exponents (lemma 4)");
    lemma_cmd->add_option("--residues", lemma_residues, "Residues drawn per (mask, r)");
    lemma_cmd->add_option("--sigma", lemma_sigma, "Tail widths (lemma 5)");
    lemma_cmd->add_option("--t", lemma_t, "Band exponents (lemma 5)");
    lemma_cmd->add_option("--intervals", lemma_intervals, "Intervals drawn per mask (lemma 6)");

    // bilinear family
    struct BilinearFlags {
        int mu = 4;
        std::optional<int> nu;
        std::string mask = "0";
        std::string alpha = "ones";
        std::string beta = "ones";
        int rho = 1;
        int K = 0;
        double epsilon = 0.5;
    };
    auto add_bilinear = [](CLI::App* cmd, BilinearFlags& f, bool shifts) {
        cmd->add_option("--mu", f.mu, "M = 2^mu")->capture_default_str();
        cmd->add_option("--nu", f.nu, "N = 2^nu (default lambda - mu)");
        cmd->add_option("--mask", f.mask, "Bitmask or {positions} over the product bits")->capture_default_str();
        cmd->add_option("--alpha", f.alpha, "ones | random")->capture_default_str();
        cmd->add_option("--beta", f.beta, "ones | random")->capture_default_str();
        if (shifts) {
            cmd->add_option("--rho", f.rho, "L = 2^rho")->capture_default_str();
            cmd->add_option("--K", f.K, "Shift scale 2^K")->capture_default_str();
            cmd->add_option("--epsilon", f.epsilon, "Carry exponent epsilon")->capture_default_str();
        }
    };
    BilinearFlags bilinear_flags, quad_flags;
    auto* bilinear_cmd = app.add_subcommand("bilinear", "Type-II bilinear sum");
    add_bilinear(bilinear_cmd, bilinear_flags, false);
    auto* quad_cmd = app.add_subcommand("quadform", "Shifted quadratic form and its Cauchy-Schwarz chain");
    add_bilinear(quad_cmd, quad_flags, true);

    // carry-rate
    std::vector<int> carry_mu{4, 5};
    int carry_offset = 4;
    std::vector<int> carry_rho{1, 2};
    std::vector<int> carry_K;
    double carry_epsilon = 0.5;
    double carry_bracket = 8.0;
    auto* carry_cmd = app.add_subcommand("carry-rate", "Exhaustive digit-truncation failure rate");
    carry_cmd->add_option("--mu", carry_mu, "mu grid")->capture_default_str();
    carry_cmd->add_option("--nu-offset", carry_offset, "nu = mu + offset")->capture_default_str();
    carry_cmd->add_option("--rho", carry_rho, "rho grid")->capture_default_str();
    carry_cmd->add_option("--K", carry_K, "K grid (default {0, mu - rho})");
    carry_cmd->add_option("--epsilon", carry_epsilon, "epsilon")->capture_default_str();
    carry_cmd->add_option("--bracket", carry_bracket, "Largest accepted implied constant")->capture_default_str();

    // type1
    int type1_mu = 4;
    std::optional<int> type1_nu;
    std::string type1_mask = "0";
    std::string type1_test = "sum";
    std::optional<double> type1_threshold;
    double type1_bracket = 4.0;
    auto* type1_cmd = app.add_subcommand("type1", "Type-I sum or the frequency test");
    type1_cmd->add_option("--mu", type1_mu, "M = 2^mu")->capture_default_str();
    type1_cmd->add_option("--nu", type1_nu, "N = 2^nu (default lambda - mu)");
    type1_cmd->add_option("--mask", type1_mask, "Bitmask or {positions}")->capture_default_str();
    type1_cmd->add_option("--test", type1_test, "sum | frequency")
        ->check(CLI::IsMember({"sum", "frequency"}))
        ->capture_default_str();
    type1_cmd->add_option("--threshold", type1_threshold, "Frequency cutoff (default lambda^2 / N)");
    type1_cmd->add_option("--bracket", type1_bracket, "Largest accepted ratio")->capture_default_str();

    // split
    SplitConfig split_config;
    std::string split_mask = "0";
    double split_bracket = 4.0;
    auto* split_cmd = app.add_subcommand("split", "Spectral split with truncated product set");
    split_cmd->add_option("--mask", split_mask, "Bitmask or {positions}")->capture_default_str();
    split_cmd->add_option("--mu", split_config.mu, "mu")->capture_default_str();
    split_cmd->add_option("--H", split_config.H, "Modes kept per factor: 2^H")->capture_default_str();
    split_cmd->add_option("--max-s2", split_config.max_s2, "Cap on |S2|")->capture_default_str();
    split_cmd->add_option("--bracket", split_bracket, "Largest accepted error / 2^-H")->capture_default_str();

    // scan
    std::string scan_config_path;
    std::optional<int> grid_lo, grid_hi;
    std::string grid_masks;
    auto* grid_cmd = app.add_subcommand("scan", "Batch lemma grid from a JSON config");
    grid_cmd->add_option("--config", scan_config_path, "ScanConfig JSON file");
    grid_cmd->add_option("--lambda-min", grid_lo, "Override lambda_min");
    grid_cmd->add_option("--lambda-max", grid_hi, "Override lambda_max");
    grid_cmd->add_option("--masks", grid_masks, "Override the mask family");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kAllPass;
        }
        err << "mwlab: " << e.what() << "\n";
        return kUsage;
    }

    try {
        const auto limits = resolve_limits(g);
        if (g.lambda) require_table(*g.lambda, 1, limits, "--lambda");

        RunManifest m;
        m.seed = g.seed;
        if (g.wall_clock) m.started = utc_now();
        std::optional<std::string> binary_out;

        if (sieve_cmd->parsed()) {
            m.command = "sieve";
            const int lambda = require_lambda(g, m.command);
            const auto kind = parse_function_kind(sieve_kind);
            SieveOptions opts;
            opts.limits = limits;
            opts.threads = g.threads;
            const auto seq = sieve(kind, lambda, opts);
            m.config = {{"lambda", lambda}, {"kind", std::string(to_string(kind))}};
            double total = 0.0;
            std::uint64_t nonzero = 0;
            for (std::size_t n = 0; n < seq.size(); ++n) {
                total += seq[n];
                nonzero += seq[n] != 0.0;
            }
            m.summary = {{"entries", seq.size()}, {"nonzero", nonzero}, {"prefix_sum", json_number(total)}};
            if (!g.out.empty() && !ends_with(g.out, ".json") && !ends_with(g.out, ".csv")) {
                std::ofstream file(g.out, std::ios::binary);
                if (!file) throw ArgumentError("cannot open '" + g.out + "' for writing");
                write_sequence(file, seq);
                binary_out = g.out;
                m.config["dump"] = g.out;
            }
        } else if (spectrum_cmd->parsed()) {
            m.command = "spectrum";
            FwhtOptions fo;
            fo.threads = g.threads;
            std::optional<ArithmeticSequence> seq;
            if (!spectrum_in.empty()) {
                std::ifstream file(spectrum_in, std::ios::binary);
                if (!file) throw ArgumentError("cannot open '" + spectrum_in + "'");
                seq = read_sequence(file);
                m.config = {{"in", spectrum_in}};
            } else {
                const int lambda = require_lambda(g, m.command);
                SieveOptions opts;
                opts.limits = limits;
                opts.threads = g.threads;
                seq = sieve(parse_function_kind(spectrum_kind), lambda, opts);
                m.config = {{"kind", std::string(to_string(seq->kind()))}};
            }
            m.config["lambda"] = seq->lambda();
            m.config["normalized"] = spectrum_normalized;
            m.config["top"] = spectrum_top;
            const auto s = spectrum(*seq, spectrum_normalized, limits, fo);
            m.summary = {{"top", top_entries(s, spectrum_top)}};
            if (seq->integral()) m.reports.push_back(theorem_check(*seq, limits, fo));
        } else if (theorem_cmd->parsed()) {
            m.command = "theorem-scan";
            const int lo = scan_lo.value_or(g.lambda.value_or(8));
            const int hi = scan_hi.value_or(g.lambda.value_or(lo));
            if (hi > limits.max_lambda) require_table(hi, 1, limits, "theorem scan");
            const auto kind = parse_function_kind(scan_kind);
            FwhtOptions fo;
            fo.threads = g.threads;
            m.config = {{"kind", std::string(to_string(kind))}, {"lambda_min", lo}, {"lambda_max", hi},
                        {"step", scan_step}};
            for (int lambda = lo; lambda <= hi; lambda += scan_step) {
                auto one = theorem_scan(kind, lambda, lambda, limits, fo);
                m.reports.push_back(std::move(one.front()));
            }
        } else if (lemma_cmd->parsed()) {
            m.command = "lemma-check";
            std::string name = lemma_name;
            if (!name.starts_with('L') && !name.starts_with('l')) name = "L" + name;
            name[0] = 'L';
            const auto id = parse_lemma_id(name);
            if (id == LemmaId::THM1 || static_cast<int>(id) > static_cast<int>(LemmaId::L6)) {
                throw ArgumentError("lemma-check covers lemmas 1-6");
            }
            ScanConfig c;
            c.lambda_min = lemma_lo.value_or(g.lambda.value_or(lemma_defaults.lambda_min));
            c.lambda_max = lemma_hi.value_or(g.lambda.value_or(lemma_lo ? c.lambda_min : lemma_defaults.lambda_max));
            if (c.lambda_max > limits.max_lambda) require_table(c.lambda_max, 1, limits, "lemma check");
            c.masks = MaskFamily::parse(lemma_masks);
            c.lemmas = {id};
            c.lemma4_r = lemma_r;
            c.lemma4_residues = lemma_residues;
            c.lemma5_sigma = lemma_sigma;
            c.lemma5_t = lemma_t;
            c.lemma6_intervals = lemma_intervals;
            c.seed = g.seed;
            c.threads = g.threads;
            m.config = c.to_json();
            m.config.erase("threads");
            m.reports = run_scan(c, limits).reports;
        } else if (bilinear_cmd->parsed() || quad_cmd->parsed()) {
            const bool quad = quad_cmd->parsed();
            const auto& f = quad ? quad_flags : bilinear_flags;
            m.command = quad ? "quadform" : "bilinear";
            BilinearConfig c;
            c.mu = f.mu;
            c.nu = f.nu.value_or(g.lambda ? *g.lambda - f.mu : f.mu + 4);
            c.mask = parse_mask(f.mask, std::min(c.mu + c.nu + 2, WalshMask::kMaxLambda));
            c.rho = f.rho;
            c.K = f.K;
            c.epsilon = f.epsilon;
            // alpha and beta draw from independent streams of the same seed
            if (f.alpha != "ones") c.alpha = make_coefficients(parse_coefficient_kind(f.alpha), c.M(), 2 * g.seed);
            if (f.beta != "ones") c.beta = make_coefficients(parse_coefficient_kind(f.beta), c.N(), 2 * g.seed + 1);
            m.config = c.to_json();
            m.config["alpha"] = f.alpha;
            m.config["beta"] = f.beta;
            m.reports.push_back(quad ? quadform_report(c) : bilinear_report(c));
        } else if (carry_cmd->parsed()) {
            m.command = "carry-rate";
            m.config = {{"mu", carry_mu}, {"nu_offset", carry_offset}, {"rho", carry_rho},
                        {"K", carry_K}, {"epsilon", carry_epsilon}, {"bracket", carry_bracket}};
            for (int mu : carry_mu) {
                for (int rho : carry_rho) {
                    std::vector<int> ks = carry_K;
                    if (ks.empty()) {
                        ks = {0};
                        if (mu - rho > 0) ks.push_back(mu - rho);
                    }
                    for (int K : ks) {
                        BilinearConfig c;
                        c.mu = mu;
                        c.nu = mu + carry_offset;
                        c.mask = WalshMask::empty(c.product_bits());
                        c.rho = rho;
                        c.K = K;
                        c.epsilon = carry_epsilon;
                        m.reports.push_back(carry_report(c, carry_bracket));
                    }
                }
            }
        } else if (type1_cmd->parsed()) {
            m.command = "type1";
            const int nu = type1_nu.value_or(g.lambda ? *g.lambda - type1_mu : type1_mu + 4);
            m.config = {{"mu", type1_mu}, {"nu", nu}, {"mask", type1_mask}, {"test", type1_test}};
            if (type1_test == "sum") {
                m.reports.push_back(type1_report(parse_mask(type1_mask, type1_mu + nu + 2), type1_mu, nu));
            } else {
                m.config["threshold"] = type1_threshold ? json_number(*type1_threshold) : Json(nullptr);
                m.config["bracket"] = type1_bracket;
                m.reports.push_back(
                    frequency_report(parse_mask(type1_mask, type1_mu + nu), type1_mu, type1_threshold, type1_bracket));
            }
        } else if (split_cmd->parsed()) {
            m.command = "split";
            split_config.mask = parse_mask(split_mask, require_lambda(g, m.command));
            m.config = split_config.to_json();
            m.config["bracket"] = split_bracket;
            m.reports.push_back(split_report(split_config, split_bracket));
        } else if (grid_cmd->parsed()) {
            m.command = "scan";
            ScanConfig c;
            if (!scan_config_path.empty()) {
                std::ifstream file(scan_config_path);
                if (!file) throw ArgumentError("cannot open '" + scan_config_path + "'");
                try {
                    c = ScanConfig::from_json(Json::parse(file));
                } catch (const Json::exception& e) {
                    throw ArgumentError(std::string("bad scan config: ") + e.what());
                }
            }
            if (g.lambda) c.lambda_min = c.lambda_max = *g.lambda;
            if (grid_lo) c.lambda_min = *grid_lo;
            if (grid_hi) c.lambda_max = *grid_hi;
            if (!grid_masks.empty()) c.masks = MaskFamily::parse(grid_masks);
            if (app.get_option("--seed")->count() > 0 || scan_config_path.empty()) c.seed = g.seed;
            m.seed = c.seed;
            c.threads = g.threads;
            if (c.lambda_max > limits.max_lambda) require_table(c.lambda_max, 1, limits, "scan");
            m.config = c.to_json();
            m.config.erase("threads");
            m.reports = run_scan(c, limits).reports;
        }

        m.summary.update(summarize(m.reports));
        if (g.wall_clock) m.finished = utc_now();
        if (binary_out) {
            Globals stdout_only = g;
            stdout_only.out.clear();
            write_output(stdout_only, m, out);
        } else {
            write_output(g, m, out);
        }
        return m.all_pass() ? kAllPass : kCheckFailed;
    } catch (const ResourceError& e) {
        err << "mwlab: resource error: " << e.what() << "\n";
        return kResource;
    } catch (const ArgumentError& e) {
        err << "mwlab: " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace mwlab::cli
