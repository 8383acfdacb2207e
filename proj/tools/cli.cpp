#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tcx/error.hpp"
#include "tcx/io.hpp"
#include "tcx/synthetic.hpp"
#include "tcx/workbench.hpp"

namespace tcx::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct RunConfig {
    std::string records;
    std::string concordance;
    std::string scheme = "schmoch35";
    std::string level = "corporate";
    double share = 0.03;
    double threshold = 1.0;
    std::string window = "1981-2010";
    int width = 5;
    int step = 1;
    std::string out = "out";
    bool largest_component = false;
    std::string region_mode = "recompute";
    std::string rank_by = "weight";
    std::string year_source = "auto";
    char delimiter = ',';
    std::string region;
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    bool no_cache = false;
};

Window parse_window(const std::string& s) {
    Window w;
    try {
        const auto dash = s.find('-');
        if (dash == std::string::npos) {
            w.start = w.end = std::stoi(s);
        } else {
            w.start = std::stoi(s.substr(0, dash));
            w.end = std::stoi(s.substr(dash + 1));
        }
    } catch (const std::exception&) {
        throw ArgumentError("invalid window '" + s + "', expected START-END");
    }
    if (w.start > w.end) throw ArgumentError("inverted window '" + s + "'");
    return w;
}

Scheme scheme_of(const std::string& s) {
    if (auto v = parse_scheme(s)) return *v;
    throw ArgumentError("unknown scheme '" + s + "'");
}

Level level_of(const std::string& s) {
    if (auto v = parse_level(s)) return *v;
    throw ArgumentError("unknown level '" + s + "'");
}

PipelineConfig pipeline_config(const RunConfig& c) {
    PipelineConfig p;
    p.share = c.share;
    p.threshold = c.threshold;
    p.rank_by = c.rank_by == "count" ? RankBy::Count : RankBy::Weight;
    p.tci.largest_component = c.largest_component;
    return p;
}

Concordance load_scheme(const RunConfig& c, Scheme s) {
    if (s == Scheme::Ipc3) return Concordance::ipc3();
    if (c.concordance.empty()) throw ArgumentError("--concordance is required for scheme schmoch35");
    return Concordance::load_file(c.concordance, s, c.delimiter);
}

ParseResult load_records(const RunConfig& c) {
    if (c.records.empty()) throw ArgumentError("--records is required");
    RecordSchema schema;
    schema.delimiter = c.delimiter;
    if (c.year_source == "fiscal_year") schema.year_source = YearSource::FiscalYear;
    if (c.year_source == "filing_date") schema.year_source = YearSource::FilingDate;
    std::ifstream in(c.records, std::ios::binary);
    if (!in) throw DataError("cannot open '" + c.records + "'");
    return parse_records(in, schema);
}

std::string stem(const RunConfig& c) {
    std::string s = c.scheme + "_" + c.level + "_" + parse_window(c.window).label();
    if (!c.region.empty()) s += "_" + c.region;
    return s;
}

// Settings that influence outputs; paths enter through input digests.
json effective_config(const RunConfig& c) {
    json j;
    j["scheme"] = c.scheme;
    j["level"] = c.level;
    j["share"] = c.share;
    j["threshold"] = c.threshold;
    j["window"] = parse_window(c.window).label();
    j["width"] = c.width;
    j["step"] = c.step;
    j["largest_component"] = c.largest_component;
    j["region_mode"] = c.region_mode;
    j["rank_by"] = c.rank_by;
    j["year_source"] = c.year_source;
    j["delimiter"] = std::string(1, c.delimiter);
    j["region"] = c.region;
    return j;
}

double num(double v) { return io::round12(v); }

class Run {
public:
    Run(std::string command, const RunConfig& config, std::ostream& out)
        : command_(std::move(command)), config_(config), out_(out) {}

    void input(const std::string& role, const std::string& path) {
        if (!path.empty()) inputs_[role] = {{"path", path}, {"digest", io::file_digest(path)}};
    }
    json& stats() { return stats_; }

    void emit(const std::string& name, const std::string& contents) {
        const auto path = (fs::path(config_.out) / name).string();
        io::write_file(path, contents);
        outputs_.push_back({{"file", name}, {"digest", io::fnv1a_hex(contents)}});
        out_ << "wrote " << path << "\n";
    }

    void finish(const std::string& name, json extra = json::object()) {
        json m;
        m["tool"] = "tcx";
        m["version"] = TCX_VERSION;
        m["command"] = command_;
        const auto cfg = effective_config(config_);
        m["config_hash"] = io::fnv1a_hex(cfg.dump());
        m["config"] = cfg;
        for (auto& [k, v] : extra.items()) m["config"][k] = v;
        m["inputs"] = inputs_;
        m["stats"] = stats_;
        m["outputs"] = outputs_;
        emit(name, m.dump(2) + "\n");
    }

private:
    std::string command_;
    const RunConfig& config_;
    std::ostream& out_;
    json inputs_ = json::object();
    json stats_ = json::object();
    json outputs_ = json::array();
};

std::string concordance_path(const RunConfig& c, Scheme s) { return s == Scheme::Ipc3 ? "" : c.concordance; }

WeightMatrix cmd_ingest(const RunConfig& c, std::ostream& out) {
    const Scheme scheme = scheme_of(c.scheme);
    const Level level = level_of(c.level);
    const Window window = parse_window(c.window);
    const auto conc = load_scheme(c, scheme);
    auto parsed = load_records(c);

    const std::size_t parsed_count = parsed.records.size();
    auto classified = classify_records(std::move(parsed.records), conc);
    auto rejects = parsed.rejects;
    rejects.insert(rejects.end(), classified.rejects.begin(), classified.rejects.end());
    std::stable_sort(rejects.begin(), rejects.end(),
                     [](const Reject& a, const Reject& b) { return a.row_number < b.row_number; });

    const auto in_window = window_records(classified.mapped, window);
    const auto built = build_weights(in_window, conc, level, window, pipeline_config(c), c.region);

    Run run("ingest", c, out);
    run.input("records", c.records);
    run.input("concordance", concordance_path(c, scheme));
    auto& s = run.stats();
    s["rows_read"] = parsed.rows_read;
    s["records_parsed"] = parsed_count;
    s["rejected_rows"] = parsed.rejects.size();
    s["unmapped"] = classified.rejects.size();
    s["out_of_window"] = classified.mapped.size() - in_window.size();
    s["accepted"] = in_window.size();
    s["total_weight"] = num(built.allocated_weight);
    s["actors_before"] = built.filter.actors_before;
    s["actors_retained"] = built.filter.actors_retained;
    s["cutoff_value"] = num(built.filter.cutoff_value);
    s["retained_weight_fraction"] = num(built.filter.retained_weight_fraction);
    s["dropped_categories"] = built.filter.dropped_categories;
    s["matrix_actors"] = built.weights.actors.size();
    s["matrix_categories"] = built.weights.categories.size();
    s["matrix_weight"] = num(built.weights.total_weight());
    s["excluded_weight"] = num(built.weights.excluded_weight);
    s["excluded_records"] = built.weights.excluded_records;

    const auto name = stem(c);
    run.emit("weights_" + name + ".csv", io::weight_matrix_csv(built.weights));
    run.emit("rejects_" + name + ".csv", io::rejects_csv(rejects));
    run.finish("manifest_ingest_" + name + ".json");
    return built.weights;
}

json diagnostics_json(const ComplexityResult& r) {
    const auto& d = r.diagnostics;
    auto v = [](double x) { return std::isnan(x) ? json(nullptr) : json(io::round12(x)); };
    json j;
    j["eigenvalue1"] = v(d.eigenvalue1);
    j["eigenvalue2"] = v(d.eigenvalue2);
    j["eigenvalue3"] = v(d.eigenvalue3);
    j["spectral_gap"] = v(d.spectral_gap);
    j["residual_norm"] = v(d.residual_norm);
    j["iterations"] = d.iterations;
    j["component_count"] = d.component_count;
    j["method"] = d.method;
    j["sign_rule"] = d.sign_rule;
    j["categories"] = r.categories.size();
    j["actors"] = r.actors.size();
    j["absent_categories"] = r.absent_categories;
    j["absent_actors"] = r.absent_actors.size();
    return j;
}

void cmd_compute(const RunConfig& c, const std::string& weights_arg, std::ostream& out) {
    const auto name = stem(c);
    std::string weights_path = weights_arg;
    if (weights_path.empty()) {
        weights_path = (fs::path(c.out) / ("weights_" + name + ".csv")).string();
        if (!fs::exists(weights_path)) cmd_ingest(c, out);
    }
    const auto w = io::parse_weight_matrix_csv(io::read_file(weights_path));

    SpecializationMatrix network;
    const auto result = compute_from_weights(w, pipeline_config(c), &network);

    Run run("compute", c, out);
    run.input("weights", weights_path);
    run.stats() = diagnostics_json(result);
    run.emit("network_" + name + ".csv", io::specialization_csv(network));
    run.emit("tci_" + name + ".csv", io::result_csv(result));
    run.emit("tci_" + name + ".json", io::result_json(result, w.meta));
    run.emit("diagnostics_" + name + ".json", diagnostics_json(result).dump(2) + "\n");
    run.finish("manifest_compute_" + name + ".json");
}

class DirectoryCache : public ResultCache {
public:
    explicit DirectoryCache(fs::path dir) : dir_(std::move(dir)) {}

    std::optional<ComplexityResult> load(const std::string& key) override {
        const auto path = dir_ / (key + ".json");
        if (!fs::exists(path)) return std::nullopt;
        try {
            return io::parse_result_cache_json(io::read_file(path.string()));
        } catch (const DataError&) {
            return std::nullopt;
        }
    }
    void store(const std::string& key, const ComplexityResult& result) override {
        io::write_file((dir_ / (key + ".json")).string(), io::result_cache_json(result));
    }

private:
    fs::path dir_;
};

struct AnalyzeArgs {
    std::string analysis;
    std::string regions;
    std::string fine = "ipc3";
    std::string coarse = "schmoch35";
};

void emit_table(Run& run, const std::string& name, const AnalysisTable& table) {
    run.emit(name + ".csv", table.to_csv());
    run.emit(name + ".json", table.to_json());
}

void cmd_analyze(const RunConfig& c, const AnalyzeArgs& a, std::ostream& out) {
    const Window window = parse_window(c.window);
    const auto config = pipeline_config(c);
    const auto parsed = load_records(c);
    const auto& records = parsed.records;

    Run run("analyze " + a.analysis, c, out);
    run.input("records", c.records);
    json extra = json::object();

    if (a.analysis == "panel") {
        const Scheme scheme = scheme_of(c.scheme);
        const Level level = level_of(c.level);
        const auto conc = load_scheme(c, scheme);
        run.input("concordance", concordance_path(c, scheme));
        const auto pipeline = run_pipeline(records, conc, level, window, config);
        std::map<std::string, std::string> sectors;
        if (scheme == Scheme::Ipc3 && !c.concordance.empty()) {
            const auto coarse = load_scheme(c, Scheme::Schmoch35);
            run.input("coarse_concordance", c.concordance);
            const auto bridge = derive_bridge(window_records(records, window), conc, coarse);
            sectors = sector_map(conc, pipeline.result.categories, &bridge, &coarse);
        } else {
            sectors = sector_map(conc, pipeline.result.categories);
        }
        const auto table = correlation_panel(pipeline.result, sectors, key_for(window, scheme, level));
        emit_table(run, "panel_" + stem(c), table);
        run.finish("manifest_panel_" + stem(c) + ".json");
    } else if (a.analysis == "consistency") {
        const Scheme fs_ = scheme_of(a.fine);
        const Scheme cs_ = scheme_of(a.coarse);
        const auto fine = load_scheme(c, fs_);
        const auto coarse = load_scheme(c, cs_);
        run.input("concordance", fs_ == Scheme::Schmoch35 || cs_ == Scheme::Schmoch35 ? c.concordance : "");
        const auto rep = consistency_analysis(records, fine, coarse, window, config);
        const std::string name = "consistency_" + a.fine + "-" + a.coarse + "_both_" + window.label();
        run.stats()["residuals_corporate"] = rep.corporate.residuals.size();
        run.stats()["residuals_regional"] = rep.regional.residuals.size();
        extra["fine"] = a.fine;
        extra["coarse"] = a.coarse;
        emit_table(run, name, rep.table);
        run.finish("manifest_" + name + ".json", extra);
    } else if (a.analysis == "rolling") {
        const Scheme scheme = scheme_of(c.scheme);
        const Level level = level_of(c.level);
        const auto conc = load_scheme(c, scheme);
        run.input("concordance", concordance_path(c, scheme));

        RollingOptions opts;
        opts.width = c.width;
        opts.step = c.step;
        opts.jobs = c.jobs;
        DirectoryCache cache(fs::path(c.out) / "cache");
        if (!c.no_cache) opts.cache = &cache;
        opts.cache_namespace = std::string(TCX_VERSION) + "|" + io::file_digest(c.records) + "|" +
                               (c.concordance.empty() ? "" : io::file_digest(c.concordance)) + "|" +
                               effective_config(c).dump();

        const auto table = rolling_rankings(records, conc, level, window, config, opts);
        const std::string name = "rolling_" + stem(c) + "_w" + std::to_string(c.width) + "s" +
                                 std::to_string(c.step);
        emit_table(run, name, table);
        run.finish("manifest_" + name + ".json");
    } else if (a.analysis == "region-pair") {
        const auto comma = a.regions.find(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 == a.regions.size()) {
            throw ArgumentError("--regions expects A,B");
        }
        const std::pair<std::string, std::string> pair{a.regions.substr(0, comma), a.regions.substr(comma + 1)};
        const Scheme scheme = scheme_of(c.scheme);
        const auto conc = load_scheme(c, scheme);
        run.input("concordance", concordance_path(c, scheme));
        const auto mode = c.region_mode == "global-mask" ? RegionMode::GlobalMask : RegionMode::Recompute;
        const auto table = region_pair_compare(records, conc, pair, window, config, mode);
        const std::string name = "region-pair_" + c.scheme + "_corporate_" + window.label() + "_" + pair.first +
                                 "-" + pair.second;
        extra["regions"] = a.regions;
        emit_table(run, name, table);
        run.finish("manifest_" + name + ".json", extra);
    } else {
        throw ArgumentError("unknown analysis '" + a.analysis + "'");
    }
}

void cmd_inspect(const std::string& path, std::ostream& out) {
    if (fs::is_directory(path)) {
        std::vector<fs::path> manifests;
        for (const auto& e : fs::directory_iterator(path)) {
            const auto f = e.path().filename().string();
            if (f.starts_with("manifest_") && f.ends_with(".json")) manifests.push_back(e.path());
        }
        std::sort(manifests.begin(), manifests.end());
        for (const auto& m : manifests) {
            const auto doc = json::parse(io::read_file(m.string()));
            out << m.filename().string() << ": " << doc.value("command", "?") << ", config "
                << doc.value("config_hash", "?") << ", " << doc["outputs"].size() << " outputs\n";
        }
        return;
    }
    const auto text = io::read_file(path);
    if (path.ends_with(".json")) {
        try {
            out << json::parse(text).dump(2) << "\n";
            return;
        } catch (const json::exception& e) {
            throw DataError("'" + path + "' is not valid JSON: " + e.what());
        }
    }
    out << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Technological complexity from patent records", "tcx"};
    app.set_version_flag("--version", std::string(TCX_VERSION));
    app.set_config("--config", "", "Key/value config file; flags override it");
    app.require_subcommand(1);
    app.fallthrough();

    auto positive = CLI::Validator(
        [](std::string& s) { return std::stod(s) > 0.0 ? std::string() : std::string("must be > 0"); },
        "POSITIVE");
    auto unit_share = CLI::Validator(
        [](std::string& s) {
            const double v = std::stod(s);
            return v > 0.0 && v <= 1.0 ? std::string() : std::string("must be in (0, 1]");
        },
        "(0,1]");

    app.add_option("--records", c.records, "Patent record table")->check(CLI::ExistingFile);
    app.add_option("--concordance", c.concordance, "IPC to Schmoch field table")->check(CLI::ExistingFile);
    app.add_option("--scheme", c.scheme, "Classification")->check(CLI::IsMember({"schmoch35", "ipc3"}));
    app.add_option("--level", c.level, "Aggregation level")->check(CLI::IsMember({"corporate", "regional"}));
    app.add_option("--share", c.share, "Top share of corporations kept")->check(unit_share);
    app.add_option("--threshold", c.threshold, "RTA threshold")->check(positive);
    app.add_option("--window", c.window, "Fiscal years START-END");
    app.add_option("--width", c.width, "Rolling window width")->check(CLI::PositiveNumber);
    app.add_option("--step", c.step, "Rolling window step")->check(CLI::PositiveNumber);
    app.add_option("--out", c.out, "Output directory");
    app.add_flag("--largest-component", c.largest_component, "Analyse the largest component if disconnected");
    app.add_option("--region-mode", c.region_mode, "Region restriction")
        ->check(CLI::IsMember({"recompute", "global-mask"}));
    app.add_option("--rank-by", c.rank_by, "Filter ranking")->check(CLI::IsMember({"weight", "count"}));
    app.add_option("--year-source", c.year_source, "Year column")
        ->check(CLI::IsMember({"auto", "fiscal_year", "filing_date"}));
    app.add_option("--delimiter", c.delimiter, "Field delimiter of input tables");
    app.add_option("--region", c.region, "Keep only corporations with this home region");
    app.add_option("--jobs", c.jobs, "Parallel jobs")->check(CLI::PositiveNumber);
    app.add_flag("--no-cache", c.no_cache, "Do not read or write the result cache");

    auto* ingest = app.add_subcommand("ingest", "Build the weight matrix and rejects report");

    std::string weights;
    auto* compute = app.add_subcommand("compute", "Compute TCI from a weight matrix");
    compute->add_option("--weights", weights, "Weight matrix file (default: ingest output)")
        ->check(CLI::ExistingFile);

    AnalyzeArgs a;
    auto* analyze = app.add_subcommand("analyze", "Run an analysis");
    analyze->add_option("analysis", a.analysis, "panel | consistency | rolling | region-pair")
        ->required()
        ->check(CLI::IsMember({"panel", "consistency", "rolling", "region-pair"}));
    analyze->add_option("--regions", a.regions, "Region pair A,B");
    analyze->add_option("--fine", a.fine, "Fine scheme")->check(CLI::IsMember({"schmoch35", "ipc3"}));
    analyze->add_option("--coarse", a.coarse, "Coarse scheme")->check(CLI::IsMember({"schmoch35", "ipc3"}));

    std::string inspect_path;
    auto* inspect = app.add_subcommand("inspect", "Print a manifest, diagnostics file or output directory");
    inspect->add_option("path", inspect_path)->required()->check(CLI::ExistingPath);

    synthetic::CorpusSpec spec;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Write a synthetic record table");
    synth->add_option("--count", spec.records, "Number of records");
    synth->add_option("--actors", spec.actors);
    synth->add_option("--categories", spec.categories);
    synth->add_option("--regions", spec.regions);
    synth->add_option("--seed", spec.seed);
    synth->add_option("--first-year", spec.first_year);
    synth->add_option("--last-year", spec.last_year);
    synth->add_option("--coassign", spec.coassign_probability);
    synth->add_option("--late-categories", spec.late_categories);
    synth->add_option("--late-start", spec.late_start_year);
    synth->add_option("--output", synth_out)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << (e.get_name() == "CallForVersion" ? std::string(TCX_VERSION) + "\n" : app.help());
            return kOk;
        }
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (ingest->parsed()) {
            cmd_ingest(c, out);
        } else if (compute->parsed()) {
            cmd_compute(c, weights, out);
        } else if (analyze->parsed()) {
            cmd_analyze(c, a, out);
        } else if (inspect->parsed()) {
            cmd_inspect(inspect_path, out);
        } else if (synth->parsed()) {
            std::ofstream f(synth_out, std::ios::binary | std::ios::trunc);
            if (!f) throw DataError("cannot write '" + synth_out + "'");
            synthetic::write_corpus(f, spec);
            out << "wrote " << synth_out << "\n";
        }
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ComputeError& e) {
        err << "error: " << e.what() << "\n";
        return kCompute;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kData;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kData;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kData;
    }
    return kOk;
}

}  // namespace tcx::cli
