#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lfpca/blockdetect.hpp"
#include "lfpca/covariance.hpp"
#include "lfpca/export.hpp"
#include "lfpca/ingest.hpp"
#include "lfpca/kernels.hpp"
#include "lfpca/lfpca.hpp"
#include "lfpca/sim.hpp"
#include "report_table.hpp"

namespace lfpca::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FitOptions {
    std::string input;
    std::string layout = "rows-are-curves";
    double pve = 0.99;
    std::optional<std::size_t> m;
    std::string detect = "contiguous-cut";
    std::optional<double> threshold;
    std::optional<double> quantile;
    std::string out_dir;
};

struct SimulateOptions {
    std::string design = "A";
    std::size_t n = 250;
    std::size_t reps = 20;
    std::uint64_t seed = 1;
    std::string method = "lfpca";
    std::optional<double> tau;
    double noise_sd = 0.1;
    std::size_t m = 10;
    std::size_t grid_points = 1001;
    std::string out_dir;
};

struct ReportOptions {
    std::vector<std::string> inputs;
    std::string gnuplot;
};

nlohmann::json provenance(const std::string& command, const std::vector<std::string>& args) {
    return {{"command", command}, {"arguments", args}, {"software", "lfpca"}, {"version", kVersion}};
}

void write_output(const fs::path& path, const std::string& text, const nlohmann::json& meta) {
    write_text_file(path, text);
    auto sidecar = meta;
    sidecar["file"] = path.filename().string();
    write_sidecar(path, sidecar);
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError(fmt::format("cannot create output directory '{}'", dir.string()));
}

int cmd_fit(const FitOptions& o, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (!(o.pve > 0.0 && o.pve <= 1.0)) throw UsageError(fmt::format("--pve {} outside (0, 1]", o.pve));
    if (o.m && *o.m < 1) throw UsageError("--m must be at least 1");
    if (o.threshold && !(*o.threshold >= 0.0 && *o.threshold < 1.0))
        throw UsageError(fmt::format("--threshold {} outside [0, 1)", *o.threshold));
    if (o.quantile && !(*o.quantile > 0.0 && *o.quantile < 1.0))
        throw UsageError(fmt::format("--quantile {} outside (0, 1)", *o.quantile));
    Layout layout;
    DetectionConfig cfg;
    try {
        layout = parse_layout(o.layout);
        cfg.method = parse_detection_method(o.detect);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    cfg.threshold = o.threshold;
    cfg.quantile = o.quantile;

    const auto curves = center(load_curves(o.input, layout));
    const auto detection = detect_blocks(empirical_covariance(curves), cfg);
    const auto denoised = denoise_kl(curves, o.pve);
    const auto cov = empirical_covariance(denoised.curves);
    const std::size_t retained = denoised.retained;
    const std::size_t m = o.m.value_or(retained);

    const auto sys = localized_fpca(cov, detection.partition, m, retained);
    const auto fpca = standard_fpca(cov, m);
    if (sys.clamped)
        err << fmt::format("lfpca: warning: --m {} exceeds the {} available localized components; using {}\n", m,
                           sys.components.size(), sys.components.size());
    if (fpca.clamped)
        err << fmt::format("lfpca: warning: --m {} exceeds the {} available standard components; using {}\n", m,
                           fpca.components.size(), fpca.components.size());

    const fs::path dir = o.out_dir;
    ensure_dir(dir);
    auto meta = provenance("fit", args);
    meta["input"] = o.input;
    meta["seed"] = nullptr;

    nlohmann::json sys_meta;
    auto det = cfg.to_json();
    if (cfg.report_threshold) det["threshold_used"] = detection.threshold;
    if (detection.quantile) det["quantile_used"] = *detection.quantile;
    sys_meta["detection"] = det;
    sys_meta["truncation_pve"] = o.pve;
    sys_meta["truncation_level"] = retained;
    sys_meta["j_max"] = retained;
    sys_meta["software_version"] = kVersion;
    sys_meta["denoising"] =
        "curves are denoised by truncating their own Karhunen-Loeve expansion at truncation_pve "
        "(in place of a smoothing step); blocks are detected on the covariance of the undenoised centered curves";

    write_output(dir / "eigensystem.json", eigensystem_to_json(sys, sys_meta).dump(2) + "\n", meta);
    std::ostringstream comps, fcomps;
    write_components_csv(comps, sys);
    write_components_csv(fcomps, fpca);
    write_output(dir / "components.csv", comps.str(), meta);
    write_output(dir / "fpca_components.csv", fcomps.str(), meta);

    const auto& s = sys.grid.points();
    std::string report;
    report += fmt::format("curves: {}  grid points: {}\n", curves.size(), curves.grid().size());
    report += fmt::format("detection: {}  threshold: {:.6g}", to_string(cfg.method), detection.threshold);
    if (detection.quantile) report += fmt::format("  (calibrated at quantile {:.10g})", *detection.quantile);
    report += "\n";
    report += fmt::format("truncation: L = {} at PVE {:g}; M = {} components retained{}\n", retained, o.pve,
                          sys.components.size(), o.m ? "" : " (M = L by default)");
    report += fmt::format("blocks detected: {}\n", sys.partition.size());
    for (std::size_t k = 0; k < sys.partition.size(); ++k) {
        const auto& b = sys.partition[k];
        report += fmt::format("  block {}: indices {}-{}  s in [{:.6g}, {:.6g}]  PVE {:.2f}%\n", k + 1, b.lo + 1,
                              b.hi + 1, s(static_cast<Eigen::Index>(b.lo)), s(static_cast<Eigen::Index>(b.hi)),
                              100.0 * sys.pve_per_block[k]);
    }
    report += "components:\n";
    for (std::size_t l = 0; l < sys.components.size(); ++l)
        report += fmt::format("  {}: eigenvalue {:.6g}  PVE {:.2f}%  block {}  rank {}\n", l + 1,
                              sys.components[l].eigenvalue, 100.0 * sys.pve_per_component[l],
                              sys.components[l].block_id + 1, sys.components[l].within_block_rank + 1);
    write_output(dir / "report.txt", report, meta);
    out << report;
    return kExitOk;
}

int cmd_simulate(const SimulateOptions& o, const std::vector<std::string>& args, std::ostream& out) {
    sim::StudyConfig cfg;
    if (o.method == "lfpca") {
        if (o.tau) throw UsageError("--tau only applies to --method fpca-tau");
        cfg.method = sim::Method::LFpca;
    } else if (o.method == "fpca-tau") {
        if (!o.tau) throw UsageError("--method fpca-tau requires --tau");
        if (!(*o.tau > 0.0)) throw UsageError("--tau must be positive");
        cfg.method = sim::Method::FpcaTau;
        cfg.tau = *o.tau;
    } else {
        throw UsageError(fmt::format("unknown method '{}'", o.method));
    }
    if (o.n < 2) throw UsageError("--n must be at least 2");
    if (o.reps < 1) throw UsageError("--reps must be at least 1");
    if (!(o.noise_sd >= 0.0)) throw UsageError("--noise-sd must be non-negative");
    if (o.m < 1) throw UsageError("--m must be at least 1");
    sim::DesignName name;
    try {
        name = sim::parse_design(o.design);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    cfg.m = o.m;
    cfg.grid_points = o.grid_points;

    const auto design = sim::SimDesign::make(name, o.noise_sd, o.seed);
    const auto records = sim::run_study(design, o.n, o.reps, cfg);

    const fs::path dir = o.out_dir;
    ensure_dir(dir);
    auto meta = provenance("simulate", args);
    meta["seed"] = o.seed;

    std::ostringstream csv;
    sim::write_metrics_csv(csv, records);
    auto summary = sim::summarize(records);
    summary["seed"] = o.seed;
    summary["noise_sd"] = o.noise_sd;
    write_output(dir / "metrics.csv", csv.str(), meta);
    write_output(dir / "summary.json", summary.dump(2) + "\n", meta);

    out << fmt::format("design {}  n {}  reps {}  method {}  failures {}\n", o.design, o.n, o.reps,
                       sim::method_label(cfg), summary["failures"].get<std::size_t>());
    for (const auto& b : summary["blocks"]) {
        auto med = [&](const char* key) {
            const auto& v = b[key]["median"];
            return v.is_null() ? std::string("NA") : fmt::format("{:.4f}", v.get<double>());
        };
        out << fmt::format("  block {}: median specificity {}  precision {}  pve_ratio {}\n", b["block"].get<int>(),
                           med("specificity"), med("precision"), med("pve_ratio"));
    }
    return kExitOk;
}

int cmd_report(const ReportOptions& o, std::ostream& out) {
    std::vector<MetricsRow> rows;
    for (const auto& path : o.inputs) {
        auto more = read_metrics_csv(path);
        rows.insert(rows.end(), more.begin(), more.end());
    }
    const auto groups = summarize_rows(rows);
    out << format_table(groups);
    if (!o.gnuplot.empty()) write_text_file(o.gnuplot, gnuplot_data(groups));
    return kExitOk;
}

void apply_thread_cap(std::ostream& err) {
    const char* env = std::getenv("LFPCA_THREADS");
    if (!env || !*env) return;
    int threads = 0;
    const std::string_view v(env);
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), threads);
    if (ec != std::errc() || ptr != v.data() + v.size() || threads < 1) {
        err << fmt::format("lfpca: warning: ignoring LFPCA_THREADS='{}' (expected a positive integer)\n", v);
        return;
    }
    kernels::set_max_threads(threads);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Localized functional principal component analysis", "lfpca"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "Estimate localized eigenfunctions from a curve CSV");
    fit_cmd->add_option("--input", fit.input, "CSV of curves on a shared grid")->required();
    fit_cmd->add_option("--layout", fit.layout, "rows-are-curves | columns-are-curves")->capture_default_str();
    fit_cmd->add_option("--pve", fit.pve, "Variance fraction kept when denoising")->capture_default_str();
    fit_cmd->add_option("--m", fit.m, "Number of components to keep (default: truncation level L)");
    fit_cmd->add_option("--detect", fit.detect, "contiguous-cut | components")->capture_default_str();
    auto* thr = fit_cmd->add_option("--threshold", fit.threshold, "Explicit correlation threshold");
    auto* qua = fit_cmd->add_option("--quantile", fit.quantile, "Null quantile for threshold calibration");
    thr->excludes(qua);
    fit_cmd->add_option("--out-dir", fit.out_dir, "Output directory")->required();

    SimulateOptions simo;
    auto* sim_cmd = app.add_subcommand("simulate", "Run the simulation study");
    sim_cmd->add_option("--design", simo.design, "A | B")->capture_default_str();
    sim_cmd->add_option("--n", simo.n, "Curves per replication")->capture_default_str();
    sim_cmd->add_option("--reps", simo.reps, "Replications")->capture_default_str();
    sim_cmd->add_option("--seed", simo.seed, "Master seed")->capture_default_str();
    sim_cmd->add_option("--method", simo.method, "lfpca | fpca-tau")->capture_default_str();
    sim_cmd->add_option("--tau", simo.tau, "Support threshold for fpca-tau");
    sim_cmd->add_option("--noise-sd", simo.noise_sd, "Measurement noise standard deviation")->capture_default_str();
    sim_cmd->add_option("--m", simo.m, "Components kept per fit")->capture_default_str();
    sim_cmd->add_option("--grid-points", simo.grid_points, "Grid size on [0, 1]")->capture_default_str();
    sim_cmd->add_option("--out-dir", simo.out_dir, "Output directory")->required();

    ReportOptions rep;
    auto* rep_cmd = app.add_subcommand("report", "Median/IQR tables from metrics CSVs");
    rep_cmd->add_option("inputs", rep.inputs, "Metrics CSV files")->required();
    rep_cmd->add_option("--gnuplot", rep.gnuplot, "Also write gnuplot data to this file");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "lfpca: usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    apply_thread_cap(err);
    try {
        if (fit_cmd->parsed()) return cmd_fit(fit, args, out, err);
        if (sim_cmd->parsed()) return cmd_simulate(simo, args, out);
        return cmd_report(rep, out);
    } catch (const UsageError& e) {
        err << "lfpca: usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "lfpca: error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "lfpca: error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace lfpca::cli
