#include "cli.hpp"

#include "protpat/distance.hpp"
#include "protpat/error.hpp"
#include "protpat/evaluation.hpp"
#include "protpat/generator.hpp"
#include "protpat/ingest.hpp"
#include "protpat/network.hpp"
#include "protpat/patterns.hpp"
#include "protpat/synth.hpp"
#include "protpat/zipf.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace protpat::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(std::string_view data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

namespace {

std::string read_file(const fs::path& path)
{
    auto in = csv::open_input(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

struct CommonOptions {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out = ".";
};

/// Collects inputs, parameters and emitted files, then writes manifest.json.
class Run {
public:
    Run(std::string command, const CommonOptions& common) : command_(std::move(command)), common_(common)
    {
        std::error_code ec;
        fs::create_directories(common_.out, ec);
        if (ec) throw IoError("cannot create output directory " + common_.out + ": " + ec.message());
    }

    std::string input(const std::string& path)
    {
        auto content = read_file(path);
        inputs_.push_back({{"path", path}, {"sha256", sha256_hex(content)}});
        return content;
    }

    template <typename T>
    void parameter(const std::string& name, const T& value)
    {
        parameters_[name] = value;
    }

    void emit(const std::string& name, const std::string& content)
    {
        auto out = csv::open_output(fs::path(common_.out) / name);
        out << content;
        out.close();
        if (!out) throw IoError("cannot write " + (fs::path(common_.out) / name).string());
        artifacts_[name] = sha256_hex(content);
    }

    void finish()
    {
        json manifest;
        manifest["command"] = command_;
        manifest["inputs"] = inputs_;
        manifest["seed"] = common_.seed;
        manifest["parameters"] = parameters_;
        manifest["output_dir"] = common_.out;
        manifest["artifacts"] = artifacts_;
        emit_raw("manifest.json", manifest.dump(2) + "\n");
    }

private:
    void emit_raw(const std::string& name, const std::string& content)
    {
        auto out = csv::open_output(fs::path(common_.out) / name);
        out << content;
        if (!out) throw IoError("cannot write manifest");
    }

    std::string command_;
    CommonOptions common_;
    json inputs_ = json::array();
    json parameters_ = json::object();
    std::map<std::string, std::string> artifacts_;
};

struct ModelFile {
    double s = 4.09;
    double p_one_plus = 0.5;
    double p_circuits = 0.0;
    std::optional<double> p_one_plus_observed;

    std::string dump() const
    {
        json j;
        j["s"] = s;
        j["p_one_plus"] = p_one_plus;
        j["p_circuits"] = p_circuits;
        j["p_one_plus_observed"] = p_one_plus_observed ? json(*p_one_plus_observed) : json(nullptr);
        return j.dump(2) + "\n";
    }

    static ModelFile parse(const std::string& text)
    {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw ParseError(std::string("model file: ") + e.what());
        }
        ModelFile m;
        try {
            m.s = j.at("s").get<double>();
            m.p_one_plus = j.at("p_one_plus").get<double>();
            m.p_circuits = j.at("p_circuits").get<double>();
            if (j.contains("p_one_plus_observed") && !j["p_one_plus_observed"].is_null())
                m.p_one_plus_observed = j["p_one_plus_observed"].get<double>();
        } catch (const json::exception& e) {
            throw ParseError(std::string("model file: ") + e.what());
        }
        return m;
    }

    GeneratorConfig config(std::uint64_t seed) const
    {
        GeneratorConfig c;
        c.size_model = ZipfModel(s);
        c.p_one_plus = p_one_plus;
        c.p_circuits = p_circuits;
        c.seed = seed;
        return c;
    }
};

Network load_network(Run& run, const std::string& path)
{
    std::istringstream in(run.input(path));
    return read_network(in);
}

std::vector<PatternRecord> load_patterns(Run& run, const std::string& path, const Network& net)
{
    std::istringstream in(run.input(path));
    auto records = read_pattern_records(in, net);
    if (records.empty()) throw DegenerateDataError("pattern file " + path + " is empty");
    return records;
}

ModelFile load_model(Run& run, const std::string& path) { return ModelFile::parse(run.input(path)); }

std::string format_optional(const std::optional<double>& v, int digits)
{
    return v ? fixed(*v, digits) : std::string("undefined");
}

// ---- subcommands ----

struct IngestOptions {
    std::string outages, aliases, exclusions;
};

int cmd_ingest(const IngestOptions& o, const CommonOptions& common, std::ostream& out)
{
    Run run("ingest", common);
    ParseOptions parse;
    if (!o.aliases.empty()) {
        std::istringstream in(run.input(o.aliases));
        parse.aliases = read_alias_map(in);
    }
    std::vector<BusPair> exclusions;
    if (!o.exclusions.empty()) {
        std::istringstream in(run.input(o.exclusions));
        exclusions = read_exclusions(in, parse.aliases);
    }
    std::istringstream in(run.input(o.outages));
    const auto parsed = parse_outage_csv(in, parse);
    if (parsed.records.empty()) throw DegenerateDataError("no automatic outages");

    const auto net = build_network_from_outages(parsed.records, exclusions);
    const auto groups = group_into_generations(parsed.records);

    std::ostringstream network_csv, generations_csv;
    write_network(network_csv, net);
    write_generations(generations_csv, groups);
    run.emit("network.csv", network_csv.str());
    run.emit("generations.csv", generations_csv.str());
    run.finish();

    out << "rows = " << parsed.stats.rows << "\n"
        << "automatic_records = " << parsed.records.size() << "\n"
        << "non_automatic_dropped = " << parsed.stats.non_automatic_dropped << "\n"
        << "self_loops_dropped = " << parsed.stats.self_loop_dropped << "\n"
        << "buses = " << net.bus_count() << "\n"
        << "lines = " << net.line_count() << "\n"
        << "lines_outside_main_component = " << net.dropped_lines() << "\n"
        << "generations = " << groups.size() << "\n";
    return exit_ok;
}

struct ExtractOptions {
    std::string network, generations;
};

int cmd_extract(const ExtractOptions& o, const CommonOptions& common, std::ostream& out)
{
    Run run("extract", common);
    const auto net = load_network(run, o.network);
    std::istringstream in(run.input(o.generations));
    const auto groups = read_generations(in);
    const auto records = extract_patterns(groups, net);
    if (records.empty()) throw DegenerateDataError("no patterns inside the network");

    std::ostringstream patterns_txt, distribution_csv;
    std::vector<Pattern> patterns;
    for (const auto& r : records) {
        patterns_txt << format_pattern(net, r.pattern, r.extra_circuits) << '\n';
        patterns.push_back(r.pattern);
    }
    write_distribution(distribution_csv, empirical_distribution(std::span<const Pattern>(patterns)));
    run.emit("patterns.txt", patterns_txt.str());
    run.emit("distribution.csv", distribution_csv.str());
    run.finish();

    out << "generations = " << groups.size() << "\n" << "patterns = " << records.size() << "\n";
    return exit_ok;
}

struct FitOptions {
    std::string network, patterns, generations;
};

int cmd_fit(const FitOptions& o, const CommonOptions& common, std::ostream& out)
{
    Run run("fit", common);
    const auto net = load_network(run, o.network);
    const auto records = load_patterns(run, o.patterns, net);
    std::vector<int> sizes;
    std::vector<Pattern> patterns;
    for (const auto& r : records) {
        sizes.push_back(static_cast<int>(r.pattern.size()));
        patterns.push_back(r.pattern);
    }
    const auto fit = fit_mle(sizes);
    const auto observed = p_one_plus_observed(std::span<const Pattern>(patterns));
    std::optional<double> circuits;
    if (!o.generations.empty()) {
        std::istringstream in(run.input(o.generations));
        circuits = estimate_p_circuits(read_generations(in), net);
    }

    std::string report = format_fit_report(fit);
    report += "p_one_plus_observed = " + format_optional(observed, 4) + "\n";
    report += "p_circuits = " + format_optional(circuits, 4) + "\n";

    std::ostringstream histogram;
    histogram << "size,count,empirical_probability,fitted_probability\n";
    const auto h = size_histogram(std::span<const int>(sizes));
    for (const auto& [k, n] : h.counts)
        histogram << k << ',' << n << ',' << fixed(h.frequency(k), 8) << ',' << fixed(fit.model.pmf(k), 8) << '\n';

    ModelFile model;
    model.s = fit.model.s();
    model.p_one_plus_observed = observed;
    model.p_one_plus = observed.value_or(0.5);
    model.p_circuits = circuits.value_or(0.0);

    run.emit("fit.txt", report);
    run.emit("histogram.csv", histogram.str());
    run.emit("model.json", model.dump());
    run.finish();
    out << report;
    return exit_ok;
}

struct CalibrateOptions {
    std::string network, model;
    std::optional<double> target;
    std::size_t ensemble = 1'000'000;
    double tolerance = 0.005;
    int max_iterations = 20;
};

int cmd_calibrate(const CalibrateOptions& o, const CommonOptions& common, std::ostream& out)
{
    Run run("calibrate", common);
    const auto net = load_network(run, o.network);
    auto model = load_model(run, o.model);
    const auto target = o.target ? o.target : model.p_one_plus_observed;
    if (!target) throw DegenerateDataError("no calibration target: the model has no p_one_plus_observed and --target is unset");
    run.parameter("target", *target);
    run.parameter("ensemble", o.ensemble);
    run.parameter("tolerance", o.tolerance);
    run.parameter("max_iterations", o.max_iterations);

    const auto result = calibrate_p_one_plus(net, model.config(common.seed), *target,
                                             {o.ensemble, o.tolerance, o.max_iterations, common.threads});

    std::string report = "target = " + fixed(*target, 6) + "\n";
    report += "p_one_plus = " + fixed(result.p_one_plus, 6) + "\n";
    report += "generated = " + fixed(result.generated, 6) + "\n";
    report += std::string("converged = ") + (result.converged ? "true" : "false") + "\n";
    std::ostringstream trace;
    trace << "iteration,lo,hi,p_one_plus,generated\n";
    for (const auto& step : result.trace)
        trace << step.iteration << ',' << fixed(step.lo, 8) << ',' << fixed(step.hi, 8) << ',' << fixed(step.p_one_plus, 8)
              << ',' << fixed(step.generated, 8) << '\n';

    model.p_one_plus = result.p_one_plus;
    run.emit("calibration.txt", report);
    run.emit("calibration_trace.csv", trace.str());
    run.emit("model.json", model.dump());
    run.finish();
    out << report;
    if (!result.converged) throw CalibrationError("calibration did not converge within the iteration cap");
    return exit_ok;
}

struct GenerateOptions {
    std::string network, model;
    std::size_t count = 1000;
};

int cmd_generate(const GenerateOptions& o, const CommonOptions& common, std::ostream& out)
{
    Run run("generate", common);
    const auto net = load_network(run, o.network);
    const auto model = load_model(run, o.model);
    run.parameter("count", o.count);
    const auto patterns = generate_ensemble(net, model.config(common.seed), o.count, common.threads);
    std::ostringstream text;
    write_generated_patterns(text, net, patterns);
    run.emit("generated_patterns.txt", text.str());
    run.finish();
    const auto saturated = std::count_if(patterns.begin(), patterns.end(), [](const auto& g) { return g.saturated(); });
    out << "patterns = " << patterns.size() << "\n" << "saturated = " << saturated << "\n";
    return exit_ok;
}

struct EvaluateOptions {
    std::string network, model, patterns;
    std::size_t repetitions = 100;
    std::size_t permutations = 10000;
};

int cmd_evaluate(const EvaluateOptions& o, const CommonOptions& common, std::ostream& out)
{
    Run run("evaluate", common);
    const auto net = load_network(run, o.network);
    const auto model = load_model(run, o.model);
    const auto records = load_patterns(run, o.patterns, net);
    run.parameter("repetitions", o.repetitions);
    run.parameter("permutations", o.permutations);

    std::vector<Pattern> observed;
    std::vector<int> sizes;
    for (const auto& r : records) {
        observed.push_back(r.pattern);
        sizes.push_back(static_cast<int>(r.pattern.size()));
    }
    const auto report = evaluate_model(std::span<const Pattern>(observed), net, model.config(common.seed),
                                       {o.repetitions, o.permutations, common.threads});

    std::ostringstream rows, loglog;
    write_evaluation_csv(rows, report);
    loglog << "size,empirical_probability,fitted_probability\n";
    const auto h = size_histogram(std::span<const int>(sizes));
    const ZipfModel zipf(model.s);
    for (const auto& [k, n] : h.counts)
        loglog << k << ',' << fixed(h.frequency(k), 8) << ',' << fixed(zipf.pmf(k), 8) << '\n';

    const auto text = format_evaluation_report(report);
    run.emit("evaluation.txt", text);
    run.emit("evaluation.csv", rows.str());
    run.emit("loglog.csv", loglog.str());
    run.finish();
    out << text;
    return exit_ok;
}

struct SynthOptions {
    std::string kind = "grid-mesh";
    int lines = 480;
    double multi_circuit_fraction = 0.1;
    std::size_t history = 0;
    double s = 4.1;
    double p_one_plus = 0.3;
    double p_circuits = 0.07;
};

int cmd_synth(const SynthOptions& o, const CommonOptions& common, std::ostream& out)
{
    const auto kind = parse_synth_kind(o.kind);
    Run run("synth", common);
    run.parameter("kind", o.kind);
    run.parameter("lines", o.lines);
    run.parameter("multi_circuit_fraction", o.multi_circuit_fraction);
    const auto net = make_synthetic_network(kind, o.lines, o.multi_circuit_fraction, common.seed);
    std::ostringstream network_csv;
    write_network(network_csv, net);
    run.emit("network.csv", network_csv.str());

    if (o.history > 0) {
        run.parameter("history", o.history);
        run.parameter("s", o.s);
        run.parameter("p_one_plus", o.p_one_plus);
        run.parameter("p_circuits", o.p_circuits);
        GeneratorConfig config;
        config.size_model = ZipfModel(o.s);
        config.p_one_plus = o.p_one_plus;
        config.p_circuits = o.p_circuits;
        config.seed = derive_seed(common.seed, 1);
        const auto records = synthesize_history(net, config, o.history, Minute{2000, 1, 1, 0, 0}, common.threads);
        std::ostringstream outages;
        write_outage_csv(outages, records);
        run.emit("outages.csv", outages.str());
        out << "outage_records = " << records.size() << "\n";
    }
    run.finish();
    std::size_t doubled = 0;
    for (LineId id = 0; id < net.line_count(); ++id) doubled += net.multiplicity(id) >= 2;
    out << "buses = " << net.bus_count() << "\n"
        << "lines = " << net.line_count() << "\n"
        << "multi_circuit_lines = " << doubled << "\n";
    return exit_ok;
}

void add_common(CLI::App* sub, CommonOptions& common)
{
    sub->add_option("--seed", common.seed, "Random seed")->capture_default_str();
    sub->add_option("--threads", common.threads, "Worker threads (outputs do not depend on it)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--out", common.out, "Output directory")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Fast-protection outage pattern analysis"};
    app.name("protpat");
    app.require_subcommand(1);

    CommonOptions common;
    std::function<int()> action;

    IngestOptions ingest;
    auto* s_ingest = app.add_subcommand("ingest", "Outage CSV -> network.csv + generations.csv");
    s_ingest->add_option("--outages", ingest.outages, "Outage CSV")->required();
    s_ingest->add_option("--aliases", ingest.aliases, "Alias CSV raw_name,canonical_name");
    s_ingest->add_option("--exclusions", ingest.exclusions, "Lines to drop, CSV from_bus,to_bus");
    add_common(s_ingest, common);
    s_ingest->callback([&] { action = [&] { return cmd_ingest(ingest, common, out); }; });

    ExtractOptions extract;
    auto* s_extract = app.add_subcommand("extract", "Generations -> patterns.txt + distribution.csv");
    s_extract->add_option("--network", extract.network)->required();
    s_extract->add_option("--generations", extract.generations)->required();
    add_common(s_extract, common);
    s_extract->callback([&] { action = [&] { return cmd_extract(extract, common, out); }; });

    FitOptions fit;
    auto* s_fit = app.add_subcommand("fit", "Patterns -> fit.txt, histogram.csv, model.json");
    s_fit->add_option("--network", fit.network)->required();
    s_fit->add_option("--patterns", fit.patterns)->required();
    s_fit->add_option("--generations", fit.generations, "Needed for p_circuits");
    add_common(s_fit, common);
    s_fit->callback([&] { action = [&] { return cmd_fit(fit, common, out); }; });

    CalibrateOptions calibrate;
    auto* s_calibrate = app.add_subcommand("calibrate", "Tune p_one_plus -> calibration.txt, model.json");
    s_calibrate->add_option("--network", calibrate.network)->required();
    s_calibrate->add_option("--model", calibrate.model)->required();
    s_calibrate->add_option("--target", calibrate.target, "Default: the model's p_one_plus_observed");
    s_calibrate->add_option("--ensemble", calibrate.ensemble)->check(CLI::PositiveNumber)->capture_default_str();
    s_calibrate->add_option("--tolerance", calibrate.tolerance)->check(CLI::PositiveNumber)->capture_default_str();
    s_calibrate->add_option("--max-iterations", calibrate.max_iterations)->check(CLI::NonNegativeNumber)->capture_default_str();
    add_common(s_calibrate, common);
    s_calibrate->callback([&] { action = [&] { return cmd_calibrate(calibrate, common, out); }; });

    GenerateOptions generate;
    auto* s_generate = app.add_subcommand("generate", "Model -> generated_patterns.txt");
    s_generate->add_option("--network", generate.network)->required();
    s_generate->add_option("--model", generate.model)->required();
    s_generate->add_option("--count", generate.count)->check(CLI::PositiveNumber)->capture_default_str();
    add_common(s_generate, common);
    s_generate->callback([&] { action = [&] { return cmd_generate(generate, common, out); }; });

    EvaluateOptions evaluate;
    auto* s_evaluate = app.add_subcommand("evaluate", "Model vs observed -> evaluation.txt/.csv, loglog.csv");
    s_evaluate->add_option("--network", evaluate.network)->required();
    s_evaluate->add_option("--model", evaluate.model)->required();
    s_evaluate->add_option("--patterns", evaluate.patterns, "Observed pattern file")->required();
    s_evaluate->add_option("--repetitions", evaluate.repetitions)->check(CLI::PositiveNumber)->capture_default_str();
    s_evaluate->add_option("--permutations", evaluate.permutations)->check(CLI::PositiveNumber)->capture_default_str();
    add_common(s_evaluate, common);
    s_evaluate->callback([&] { action = [&] { return cmd_evaluate(evaluate, common, out); }; });

    SynthOptions synth;
    auto* s_synth = app.add_subcommand("synth", "Synthetic network.csv (+ outages.csv)");
    s_synth->add_option("--kind", synth.kind, "grid-mesh, random-tree or ba-like")->capture_default_str();
    s_synth->add_option("--lines", synth.lines)->check(CLI::PositiveNumber)->capture_default_str();
    s_synth->add_option("--multi-circuit-fraction", synth.multi_circuit_fraction)
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    s_synth->add_option("--history", synth.history, "Patterns in the synthetic outage history (0: none)")
        ->capture_default_str();
    s_synth->add_option("--s", synth.s)->capture_default_str();
    s_synth->add_option("--p-one-plus", synth.p_one_plus)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    s_synth->add_option("--p-circuits", synth.p_circuits)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    add_common(s_synth, common);
    s_synth->callback([&] { action = [&] { return cmd_synth(synth, common, out); }; });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        return action();
    } catch (const CalibrationError& e) {
        err << "calibration failed: " << e.what();
        if (e.at_zero() && e.at_one())
            err << " (generated at p=0: " << fixed(*e.at_zero(), 4) << ", at p=1: " << fixed(*e.at_one(), 4) << ")";
        err << "\n";
        return exit_calibration;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const DegenerateDataError& e) {
        err << "error: " << e.what() << "\n";
        return exit_degenerate;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

}  // namespace protpat::cli
