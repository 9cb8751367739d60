// Command-line front-end: computes supports and densities of the free
// convolution with a semicircle law, classifies spiked eigenvalues of the
// deformed ensemble, and verifies the predictions by seeded simulation.
//
// Exit codes: 0 success, 2 parse/config error, 3 resolution error,
// 4 domain-precondition error (spike in the support, gap touching it, ...),
// 5 verification failed, 1 unexpected failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "freeconv/io_json.hpp"
#include "freeconv/version.hpp"

namespace {

using namespace freeconv;

constexpr int kExitParse = 2;
constexpr int kExitResolution = 3;
constexpr int kExitDomain = 4;
constexpr int kExitVerifyFailed = 5;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    out << text;
}

struct CommonArgs {
    std::string config;
    std::string out = "-";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> resolution;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "JSON configuration file")->required();
    cmd->add_option("--out", args.out, "output file ('-' for stdout)");
    cmd->add_option("--seed", args.seed, "override the base seed (stochastic commands)");
    cmd->add_option("--trials", args.trials, "override the trial count (stochastic commands)");
    cmd->add_option("--resolution", args.resolution, "component-scan grid points per unit length");
}

int cmd_support(const CommonArgs& args) {
    const std::string text = read_file(args.config);
    SupportConfig cfg = parse_support_config(text);
    if (args.resolution) cfg.resolution = *args.resolution;
    const FreeConvolution model(cfg.measure, cfg.sigma, cfg.resolution);
    write_output(args.out, support_report_json(model, config_hash_hex(text)));
    return 0;
}

int cmd_density(const CommonArgs& args, int grid_points_flag, double pad_flag) {
    const std::string text = read_file(args.config);
    DensityConfig cfg = parse_density_config(text);
    if (args.resolution) cfg.base.resolution = *args.resolution;
    if (grid_points_flag > 0) cfg.grid_points = grid_points_flag;
    if (pad_flag >= 0.0) cfg.pad = pad_flag;
    if (cfg.grid_points < 2) throw ParseError("density grid needs at least 2 points");
    if (cfg.pad < 0.0) throw ParseError("density pad must be >= 0");

    const FreeConvolution model(cfg.base.measure, cfg.base.sigma, cfg.base.resolution);
    const double lo = model.support().front().lo - cfg.pad;
    const double hi = model.support().back().hi + cfg.pad;
    std::ostringstream csv;
    csv.precision(12);
    csv << "x,density,cdf\n";
    for (int k = 0; k < cfg.grid_points; ++k) {
        const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cfg.grid_points - 1);
        csv << x << ',' << model.density(x) << ',' << model.cdf(x) << '\n';
    }
    write_output(args.out, csv.str());

    if (args.out != "-" && !args.out.empty()) {
        const std::string gp_path = args.out + ".gp";
        std::ostringstream gp;
        gp << "set datafile separator ','\n"
           << "set xlabel 'x'\n"
           << "set ylabel 'density'\n"
           << "set y2label 'cdf'\n"
           << "set y2tics\n"
           << "plot '" << std::filesystem::path(args.out).filename().string()
           << "' every ::1 using 1:2 with lines title 'density', \\\n"
           << "     '' every ::1 using 1:3 axes x1y2 with lines title 'cdf'\n";
        write_output(gp_path, gp.str());
    }
    return 0;
}

int cmd_classify(const CommonArgs& args) {
    const std::string text = read_file(args.config);
    ClassifyConfig cfg = parse_classify_config(text);
    if (args.resolution) cfg.resolution = *args.resolution;
    const FreeConvolution model(cfg.measure, cfg.sigma, cfg.resolution);

    std::vector<SpikePrediction> preds;
    if (cfg.n > 0) {
        const std::vector<double> bulk = cfg.measure.discretize_quantiles(cfg.n - cfg.spikes.total_multiplicity());
        preds = predict_spikes(model, cfg.spikes, cfg.n, bulk);
    } else {
        // limits only; ranks need a matrix size
        for (const SpikeEntry& e : cfg.spikes.entries()) {
            SpikePrediction p;
            p.theta = e.theta;
            p.multiplicity = e.multiplicity;
            p.cls = classify_spike(model, e.theta);
            switch (p.cls.tag) {
                case SpikeCase::outlier: p.limit = model.h_map(e.theta); break;
                case SpikeCase::edge_right:
                    p.limit = model.support()[static_cast<std::size_t>(p.cls.component)].hi;
                    break;
                case SpikeCase::edge_left:
                    p.limit = model.support()[static_cast<std::size_t>(p.cls.component)].lo;
                    break;
                case SpikeCase::bulk_quantile: p.limit = model.quantile(p.cls.alpha); break;
            }
            preds.push_back(std::move(p));
        }
    }
    write_output(args.out, classify_report_json(preds, cfg.sigma, cfg.n, config_hash_hex(text)));
    return 0;
}

int cmd_verify(const CommonArgs& args, const std::string& dump_eigs_dir) {
    const std::string text = read_file(args.config);
    VerifyConfig cfg = parse_verify_config(text);
    if (args.seed) cfg.seed = *args.seed;
    if (args.trials) cfg.trials = *args.trials;
    if (args.resolution) cfg.resolution = *args.resolution;
    if (!dump_eigs_dir.empty()) cfg.emit_eigenvalues = true;

    const VerifyReport rep = run_verification(cfg);

    if (!dump_eigs_dir.empty()) {
        std::filesystem::create_directories(dump_eigs_dir);
        for (const TrialResult& t : rep.trials) {
            std::ostringstream name;
            name << "trial_" << t.seed << ".csv";
            std::ofstream out(std::filesystem::path(dump_eigs_dir) / name.str());
            out.precision(17);
            for (double x : t.report.eigenvalues) out << x << '\n';
        }
    }

    VerifyReport lean = rep;
    if (!cfg.emit_eigenvalues)
        for (TrialResult& t : lean.trials) t.report.eigenvalues.clear();
    write_output(args.out, verify_report_json(lean, cfg, config_hash_hex(text)));
    return rep.pass ? 0 : kExitVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"free additive convolution with a semicircle law: supports, densities,\n"
                 "spiked-eigenvalue prediction and Monte-Carlo verification"};
    app.set_version_flag("--version", freeconv::kVersion);
    app.require_subcommand(1);

    CommonArgs support_args, density_args, classify_args, verify_args;
    int grid_points_flag = 0;
    double pad_flag = -1.0;
    std::string dump_eigs_dir;

    CLI::App* support = app.add_subcommand("support", "support, lifted components and masses");
    add_common(support, support_args);
    CLI::App* density = app.add_subcommand("density", "density/cdf grid as CSV (+ gnuplot script)");
    add_common(density, density_args);
    density->add_option("--grid-points", grid_points_flag, "number of grid points (>= 2)");
    density->add_option("--pad", pad_flag, "padding beyond the support");
    CLI::App* classify = app.add_subcommand("classify", "classify spikes and predict limits/ranks");
    add_common(classify, classify_args);
    CLI::App* verify = app.add_subcommand("verify", "seeded Monte-Carlo verification of the predictions");
    add_common(verify, verify_args);
    verify->add_option("--dump-eigs", dump_eigs_dir, "write per-trial eigenvalue CSVs to this directory");

    try {
        app.parse(argc, argv);
        if (support->parsed()) return cmd_support(support_args);
        if (density->parsed()) return cmd_density(density_args, grid_points_flag, pad_flag);
        if (classify->parsed()) return cmd_classify(classify_args);
        if (verify->parsed()) return cmd_verify(verify_args, dump_eigs_dir);
        return kExitParse;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitParse;
    } catch (const freeconv::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const freeconv::ResolutionError& e) {
        std::cerr << "error: " << e.what() << "\n(raise --resolution)\n";
        return kExitResolution;
    } catch (const freeconv::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const freeconv::RangeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const freeconv::SizeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
