#include "latentprobe/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "latentprobe/attribute.hpp"
#include "latentprobe/factory.hpp"
#include "latentprobe/image_io.hpp"
#include "latentprobe/latent.hpp"
#include "latentprobe/latent_io.hpp"
#include "latentprobe/probe.hpp"
#include "latentprobe/search_io.hpp"

namespace latentprobe::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kModule = "cli";

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool json = false;
    std::string out;
    std::string format = "binary";
};

// ---------------------------------------------------------------------------
// Manifest

struct TargetSpec {
    std::vector<Embedding> embeddings;
    std::vector<LatentVector> latents;
    std::vector<ImageTensor> images;
    std::optional<std::uint64_t> planted_seed;
    TargetReduction reduction = TargetReduction::mean;
};

struct Manifest {
    fs::path path;
    json backend;
    SearchConfig search;
    std::optional<TargetSpec> target;
    std::string output;
};

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(kModule, "cannot open config file " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(kModule, "config file " + path.string() + ": " + e.what());
    }
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
    const fs::path candidate(p);
    return candidate.is_absolute() ? candidate : base_dir / candidate;
}

std::vector<std::string> string_list(const json& j, const char* key) {
    if (!j.contains(key)) return {};
    try {
        return j.at(key).get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw ConfigError(kModule, std::string("target field \"") + key + "\": " + e.what());
    }
}

// Every referenced file is read and parsed here, before any backend exists.
TargetSpec load_target(const json& j, const fs::path& dir) {
    if (!j.is_object()) {
        throw ConfigError(kModule, "\"target\" must be an object");
    }
    TargetSpec t;
    for (const auto& f : string_list(j, "embedding_files")) {
        auto e = read_embeddings(resolve(dir, f));
        std::move(e.begin(), e.end(), std::back_inserter(t.embeddings));
    }
    for (const auto& f : string_list(j, "latent_files")) {
        auto l = read_latents(resolve(dir, f));
        std::move(l.begin(), l.end(), std::back_inserter(t.latents));
    }
    for (const auto& f : string_list(j, "image_files")) {
        t.images.push_back(read_pnm(resolve(dir, f)));
    }
    if (j.contains("planted_seed")) {
        t.planted_seed = j.at("planted_seed").get<std::uint64_t>();
    }
    const auto reduction = j.value("reduction", std::string("mean"));
    if (reduction == "min") {
        t.reduction = TargetReduction::min;
    } else if (reduction != "mean") {
        throw ConfigError(kModule, "unknown target reduction \"" + reduction + "\"");
    }
    if (t.embeddings.empty() && t.latents.empty() && t.images.empty() && !t.planted_seed) {
        throw ConfigError(kModule, "target names no embeddings, latents, images or planted_seed");
    }
    return t;
}

Manifest load_manifest(const std::string& config_path, bool need_target) {
    if (config_path.empty()) {
        throw ConfigError(kModule, "--config is required");
    }
    Manifest m;
    m.path = config_path;
    const json j = read_json_file(m.path);
    const fs::path dir = m.path.parent_path();
    if (j.contains("type")) {
        m.backend = j;  // a bare backend spec
    } else if (j.contains("backend")) {
        m.backend = j.at("backend");
    } else {
        throw ConfigError(kModule, "config file " + m.path.string() + " has no \"backend\"");
    }
    if (j.contains("search")) {
        m.search = search_config_from_json(j.at("search"));
    }
    if (j.contains("target")) {
        m.target = load_target(j.at("target"), dir);
    } else if (need_target) {
        throw ConfigError(kModule, "config file " + m.path.string() + " has no \"target\"");
    }
    m.output = j.value("output", std::string());
    if (!m.output.empty()) {
        m.output = resolve(dir, m.output).string();
    }
    // bridge commands may be relative to the manifest too
    if (m.backend.contains("command") && m.backend.at("command").is_array() && !m.backend.at("command").empty()) {
        auto& exe = m.backend["command"][0];
        const std::string first = exe.get<std::string>();
        if (first.find('/') != std::string::npos && !fs::path(first).is_absolute()) {
            exe = resolve(dir, first).string();
        }
    }
    return m;
}

TargetIdentity build_target(const TargetSpec& spec, Backend& backend) {
    std::vector<Embedding> embeddings = spec.embeddings;
    std::vector<LatentVector> latents = spec.latents;
    if (spec.planted_seed) {
        SeededRng rng(*spec.planted_seed);
        auto planted = sample_box(SamplingBox::unit(backend.info().latent_dim), 1, rng);
        latents.push_back(std::move(planted.front()));
    }
    if (!latents.empty()) {
        auto generated = backend.generate_embed(latents);
        std::move(generated.begin(), generated.end(), std::back_inserter(embeddings));
    }
    for (const auto& image : spec.images) {
        embeddings.push_back(backend.embed(image));
    }
    return TargetIdentity(std::move(embeddings), spec.reduction);
}

LatentFormat parse_format(const std::string& format) {
    if (format == "binary") return LatentFormat::binary;
    if (format == "json") return LatentFormat::json;
    throw ConfigError(kModule, "unknown --format \"" + format + "\"");
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError(kModule, "cannot write " + path.string());
    }
    out << text;
}

fs::path prepare_out_dir(const GlobalOptions& g, const std::string& fallback) {
    fs::path dir = !g.out.empty() ? fs::path(g.out) : fs::path(fallback.empty() ? "latentprobe_out" : fallback);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ConfigError(kModule, "cannot create output directory " + dir.string() + ": " + ec.message());
    }
    return dir;
}

bool try_render(Backend& backend, const LatentVector& z, const fs::path& path) {
    const auto& shape = backend.info().image_shape;
    if (shape[0] != 1 && shape[0] != 3) {
        spdlog::info("skipping image export: {}-channel output", shape[0]);
        return false;
    }
    write_pnm(path, backend.generate(z));
    return true;
}

std::string format_number(double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

// ---------------------------------------------------------------------------
// search

int cmd_search(const GlobalOptions& g, std::ostream& out) {
    Manifest m = load_manifest(g.config, true);
    if (g.seed) {
        m.search.seed = *g.seed;
    }
    const auto format = parse_format(g.format);
    auto backend = make_backend(m.backend);
    const TargetIdentity target = build_target(*m.target, *backend);
    const fs::path dir = prepare_out_dir(g, m.output);

    SearchResult result;
    try {
        result = search(target, *backend, m.search);
    } catch (const SearchAborted& e) {
        write_text(dir / "trace.json", to_json(e.trace()).dump(2) + "\n");
        throw;
    }
    verify_search_result(result, target, *backend, m.search.threshold);

    write_text(dir / "result.json", to_json(result).dump(2) + "\n");
    write_text(dir / "trace.json", to_json(result.trace).dump(2) + "\n");
    const std::vector<LatentVector> best{result.best_latent};
    write_latents(dir / "best.lvec", best, format);
    try_render(*backend, result.best_latent, dir / "best.pnm");

    if (g.json) {
        out << to_json(result).dump(2) << "\n";
    } else {
        std::size_t evaluated = 0;
        for (const auto& r : result.trace) evaluated += r.candidates_evaluated;
        out << "best_score     " << format_number(result.best_score) << "\n"
            << "terminated_by  " << to_string(result.terminated_by) << "\n"
            << "rounds         " << result.trace.size() << "\n"
            << "evaluations    " << evaluated << "\n"
            << "output         " << dir.string() << "\n";
    }
    return result.terminated_by == Termination::threshold ? 0 : 2;
}

// ---------------------------------------------------------------------------
// arith

struct ArithOptions {
    std::string base;
    std::vector<std::string> recipes;
    std::string direction = "add";
    bool chain = false;
    bool render = false;
};

int cmd_arith(const GlobalOptions& g, const ArithOptions& a, std::ostream& out) {
    const auto format = parse_format(g.format);
    const auto bases = read_latents(a.base);
    if (bases.size() != 1) {
        throw ConfigError(kModule, a.base + " holds " + std::to_string(bases.size()) +
                                       " latents; arith expects exactly one");
    }
    std::vector<AttributeRecipe> recipes;
    for (const auto& path : a.recipes) {
        recipes.push_back(load_recipe(path));
    }
    std::vector<EditDirection> directions;
    if (a.direction == "both") {
        directions = {EditDirection::add, EditDirection::remove};
    } else {
        directions = {direction_from_string(a.direction)};
    }
    std::vector<RecipeEdit> edits;
    for (const auto& r : recipes) {
        edits.push_back(RecipeEdit{&r, directions});
    }
    std::unique_ptr<Backend> backend;
    if (a.render) {
        backend = make_backend(load_manifest(g.config, false).backend);
    }
    const auto variants = generate_variants(bases.front(), edits, a.chain);
    const fs::path dir = prepare_out_dir(g, "");
    json listing = json::array();
    std::set<std::string> stems;
    for (std::size_t i = 0; i < variants.size(); ++i) {
        const auto& v = variants[i];
        std::string stem = v.name + "_" + std::string(to_string(v.direction));
        if (a.chain) {
            stem = "chain" + std::to_string(i) + "_" + stem;
        }
        if (!stems.insert(stem).second) {
            throw ConfigError(kModule, "duplicate recipe name \"" + v.name + "\"");
        }
        const fs::path file = dir / (stem + ".lvec");
        const std::vector<LatentVector> one{v.latent};
        write_latents(file, one, format);
        json entry{{"name", v.name}, {"direction", std::string(to_string(v.direction))}, {"file", file.string()}};
        if (backend && try_render(*backend, v.latent, dir / (stem + ".pnm"))) {
            entry["image"] = (dir / (stem + ".pnm")).string();
        }
        listing.push_back(entry);
        if (!g.json) {
            out << stem << "  " << file.string() << "\n";
        }
    }
    if (g.json) {
        out << listing.dump(2) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// props

struct PropsOptions {
    std::size_t trials = 1000;
    double amplitude = 0.5;
    double margin = 0.6;
    std::vector<double> scales{0.5, 2.0, 10.0};
    double tolerance = 0.4;
    std::size_t samples = 10;
    bool strict = false;
};

int cmd_props(const GlobalOptions& g, const PropsOptions& p, std::ostream& out) {
    const Manifest m = load_manifest(g.config, false);
    auto backend = make_backend(m.backend);
    const std::uint64_t seed = g.seed.value_or(0);
    const std::size_t dim = backend->info().latent_dim;

    struct Row {
        std::string name;
        double max_distance = 0.0;
    };
    std::vector<Row> rows;
    rows.push_back({"noise(a=" + format_number(p.amplitude) + ")", 0.0});
    rows.push_back({"sign", 0.0});
    for (double c : p.scales) {
        rows.push_back({"scale(c=" + format_number(c) + ")", 0.0});
    }
    for (std::size_t s = 0; s < p.samples; ++s) {
        const LatentVector z = margin_latent(dim, p.margin, seed + s);
        ProbeParams params;
        params.amplitude = p.amplitude;
        params.trials = p.trials;
        params.seed = seed + 1000003 * (s + 1);
        rows[0].max_distance = std::max(rows[0].max_distance, property_probe(*backend, z, ProbeKind::noise, params));
        rows[1].max_distance = std::max(rows[1].max_distance, property_probe(*backend, z, ProbeKind::sign, params));
        for (std::size_t k = 0; k < p.scales.size(); ++k) {
            params.factor = p.scales[k];
            rows[2 + k].max_distance =
                std::max(rows[2 + k].max_distance, property_probe(*backend, z, ProbeKind::scale, params));
        }
    }
    bool all_pass = true;
    json report = json::array();
    if (!g.json) {
        out << std::left << std::setw(18) << "probe" << std::setw(18) << "max_distance" << "result\n";
    }
    for (const auto& r : rows) {
        const bool pass = r.max_distance <= p.tolerance;
        all_pass = all_pass && pass;
        report.push_back({{"probe", r.name}, {"max_distance", r.max_distance}, {"pass", pass}});
        if (!g.json) {
            out << std::left << std::setw(18) << r.name << std::setw(18) << format_number(r.max_distance)
                << (pass ? "pass" : "FAIL") << "\n";
        }
    }
    if (g.json) {
        out << json{{"tolerance", p.tolerance}, {"margin", p.margin}, {"probes", report}}.dump(2) << "\n";
    }
    return (p.strict && !all_pass) ? 2 : 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
    std::vector<std::string> files;
    std::string pair_scores;
};

int cmd_eval(const GlobalOptions& g, const EvalOptions& e, std::ostream& out) {
    std::size_t count = 0;
    std::vector<double> scores;
    if (!e.pair_scores.empty()) {
        const json j = read_json_file(e.pair_scores);
        count = j.at("count").get<std::size_t>();
        scores = j.at("scores").get<std::vector<double>>();
    } else {
        std::vector<Embedding> embeddings;
        for (const auto& f : e.files) {
            auto loaded = read_embeddings(f);
            std::move(loaded.begin(), loaded.end(), std::back_inserter(embeddings));
        }
        count = embeddings.size();
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t j = i + 1; j < count; ++j) {
                scores.push_back(distance(embeddings[i], embeddings[j]));
            }
        }
    }
    if (count < 2) {
        throw ConfigError(kModule, "eval needs at least two embeddings");
    }
    if (scores.size() != count * (count - 1) / 2) {
        throw ConfigError(kModule, std::to_string(count) + " items need " + std::to_string(count * (count - 1) / 2) +
                                       " pair scores, got " + std::to_string(scores.size()));
    }
    out << format_pair_table(count, scores, g.json);
    return 0;
}

// ---------------------------------------------------------------------------
// demo

int cmd_demo(const GlobalOptions& g, std::ostream& out) {
    const std::uint64_t base_seed = g.seed.value_or(0);
    bool all_pass = true;
    auto line = [&](bool pass, const std::string& text) {
        all_pass = all_pass && pass;
        out << (pass ? "PASS  " : "FAIL  ") << text << "\n";
    };

    SyntheticParams params;
    params.latent_dim = 8;
    SyntheticBackend backend(params);
    SeededRng planted_rng(base_seed + 7);
    const LatentVector planted = sample_box(SamplingBox::unit(8), 1, planted_rng).front();
    const std::vector<LatentVector> planted_batch{planted};
    const TargetIdentity target(backend.generate_embed(planted_batch));

    // exhaustive check over all sign patterns
    std::size_t zero_hits = 0;
    const auto planted_signs = sign(planted);
    bool unique = true;
    for (std::uint32_t mask = 0; mask < 256; ++mask) {
        std::vector<double> s(8);
        for (std::size_t i = 0; i < 8; ++i) s[i] = (mask >> i) & 1U ? 1.0 : -1.0;
        const double d = identity_score(Embedding(backend.model().identity_of_signs(s)), target);
        if (d == 0.0) {
            ++zero_hits;
            unique = unique && LatentVector(s) == planted_signs;
        }
    }
    line(zero_hits == 1 && unique, "planted sign pattern is the unique zero of 256 at D=8");

    SearchConfig config;
    config.latent_dim = 8;
    config.candidates = 64;
    std::size_t reached = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        config.seed = base_seed + s;
        const auto result = search(target, backend, config);
        if (result.best_score == 0.0 && result.terminated_by == Termination::threshold) ++reached;
    }
    line(reached >= 18, "search reaches score 0 in " + std::to_string(reached) + "/20 seeded runs (need >= 18)");

    double worst = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto z = margin_latent(8, 0.6, base_seed + 100 + s);
        ProbeParams p;
        p.seed = s;
        worst = std::max(worst, property_probe(backend, z, ProbeKind::noise, p));
        worst = std::max(worst, property_probe(backend, z, ProbeKind::sign, p));
        for (double c : {0.5, 2.0, 10.0}) {
            p.factor = c;
            worst = std::max(worst, property_probe(backend, z, ProbeKind::scale, p));
        }
    }
    line(worst == 0.0, "noise/sign/scale probes report exactly 0");

    const auto base = margin_latent(8, 0.6, base_seed + 200);
    AttributeRecipe recipe{"demo", {filled(8, 0.25)}, {filled(8, 0.05)}};
    const auto edited = apply_attribute(base, recipe);
    const std::vector<LatentVector> pair{base, edited};
    const auto embedded = backend.generate_embed(pair);
    line(distance(embedded[0], embedded[1]) == 0.0, "margin-respecting attribute edit keeps identity distance 0");

    if (!g.out.empty()) {
        const fs::path dir = prepare_out_dir(g, "");
        config.seed = base_seed;
        const auto result = search(target, backend, config);
        write_text(dir / "result.json", to_json(result).dump(2) + "\n");
        out << "wrote " << (dir / "result.json").string() << "\n";
    }
    return all_pass ? 0 : 2;
}

void setup_logging() {
    static bool done = false;
    if (done) return;
    done = true;
    auto logger = spdlog::stderr_color_mt("latentprobe");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* level = std::getenv("LATENTPROBE_LOG"); level != nullptr && *level != '\0') {
        spdlog::set_level(spdlog::level::from_str(level));
    }
}

}  // namespace

std::string format_pair_table(std::size_t count, const std::vector<double>& scores, bool as_json) {
    std::ostringstream s;
    if (as_json) {
        json rows = json::array();
        std::size_t k = 0;
        for (std::size_t i = 1; i <= count; ++i) {
            for (std::size_t j = i + 1; j <= count; ++j) {
                rows.push_back({{"pair", {i, j}}, {"score", scores[k++]}});
            }
        }
        s << rows.dump(2) << "\n";
        return s.str();
    }
    s << "pair\tscore\n";
    std::size_t k = 0;
    for (std::size_t i = 1; i <= count; ++i) {
        for (std::size_t j = i + 1; j <= count; ++j) {
            s << "(" << i << "," << j << ")\t" << std::fixed << std::setprecision(8) << scores[k++] << "\n";
        }
    }
    return s.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    setup_logging();
    CLI::App app{"latentprobe: latent-space identity search and attribute editing"};
    app.require_subcommand(1);

    GlobalOptions g;
    auto add_globals = [&](CLI::App* sub) {
        sub->add_option("--config", g.config, "Manifest or backend spec (JSON)");
        sub->add_option("--seed", g.seed, "Override the manifest seed");
        sub->add_flag("--json", g.json, "Machine-readable output");
        sub->add_option("--out", g.out, "Output directory");
        sub->add_option("--format", g.format, "Latent file format: binary|json")
            ->check(CLI::IsMember({"binary", "json"}));
    };

    auto* search_cmd = app.add_subcommand("search", "Search a latent matching the target identity");
    add_globals(search_cmd);

    ArithOptions arith;
    auto* arith_cmd = app.add_subcommand("arith", "Apply attribute vector arithmetic to a latent");
    add_globals(arith_cmd);
    arith_cmd->add_option("--base", arith.base, "Latent file holding one latent")->required();
    arith_cmd->add_option("--recipe", arith.recipes, "Attribute recipe JSON (repeatable)")->required();
    arith_cmd->add_option("--direction", arith.direction, "add|remove|both")
        ->check(CLI::IsMember({"add", "remove", "both"}));
    arith_cmd->add_flag("--chain", arith.chain, "Apply edits cumulatively");
    arith_cmd->add_flag("--render", arith.render, "Also write .pnm images (needs --config)");

    PropsOptions props;
    auto* props_cmd = app.add_subcommand("props", "Probe noise/sign/scale invariances of a backend");
    add_globals(props_cmd);
    props_cmd->add_option("--trials", props.trials, "Noise trials per latent");
    props_cmd->add_option("--amplitude", props.amplitude, "Noise amplitude");
    props_cmd->add_option("--margin", props.margin, "Minimum |z_i| of probed latents");
    props_cmd->add_option("--scales", props.scales, "Scale factors")->delimiter(',');
    props_cmd->add_option("--tolerance", props.tolerance, "Pass threshold on max distance");
    props_cmd->add_option("--samples", props.samples, "Number of probed latents");
    props_cmd->add_flag("--strict", props.strict, "Exit 2 if any probe fails");

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "All-pairs squared-L2 distance table");
    add_globals(eval_cmd);
    eval_cmd->add_option("files", eval.files, "Embedding files");
    eval_cmd->add_option("--pair-scores", eval.pair_scores, "JSON {count, scores} of precomputed pair scores");

    auto* demo_cmd = app.add_subcommand("demo", "Synthetic end-to-end run with a pass/fail summary");
    add_globals(demo_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*search_cmd) return cmd_search(g, out);
        if (*arith_cmd) return cmd_arith(g, arith, out);
        if (*props_cmd) return cmd_props(g, props, out);
        if (*eval_cmd) return cmd_eval(g, eval, out);
        if (*demo_cmd) return cmd_demo(g, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "error: [cli] " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace latentprobe::cli
