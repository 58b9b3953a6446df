// gpr: command-line front end for the attribute-aware synthetic re-ID
// pipeline. Subcommands cover the individual stages (generate, analyze,
// select, train, eval, report); `pipeline` chains them all through files in
// one output directory so every intermediate is auditable and re-runnable.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpr/gpr.hpp"

using nlohmann::json;

namespace {

std::uint64_t env_seed_override(std::uint64_t seed) {
    const char* env = std::getenv("GPR_SEED");
    if (!env || !*env) return seed;
    return std::strtoull(env, nullptr, 10);
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(csv.substr(start));
            break;
        }
        out.push_back(csv.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

std::vector<int> split_int_list(const std::string& csv) {
    std::vector<int> out;
    for (const auto& item : split_list(csv)) out.push_back(std::stoi(item));
    return out;
}

// ---------------------------------------------------------------- generate

struct GenerateOpts {
    int ids = 1;
    std::uint64_t seed = 0;
    std::string out;
    int width = 32, height = 64;
    std::string backgrounds, weathers, illuminations, viewpoints;
};

void run_generate(const GenerateOpts& o) {
    gpr::GeneratorConfig cfg;
    cfg.num_identities = o.ids;
    cfg.master_seed = env_seed_override(o.seed);
    cfg.image_width = o.width;
    cfg.image_height = o.height;
    if (!o.backgrounds.empty()) cfg.backgrounds = split_list(o.backgrounds);
    if (!o.weathers.empty()) cfg.weathers = split_list(o.weathers);
    if (!o.illuminations.empty()) cfg.illumination_bands = split_list(o.illuminations);
    if (!o.viewpoints.empty()) cfg.viewpoints = split_int_list(o.viewpoints);
    auto manifest = gpr::generate_manifest(cfg);
    gpr::persist_manifest(manifest, o.out);
    std::cout << "wrote " << manifest.records.size() << " records to " << o.out << "\n";
}

// ----------------------------------------------------------------- analyze

struct AnalyzeOpts {
    std::string source, target, out;
    std::string weights_path, save_weights;
    std::uint64_t extractor_seed = 1;
    int input_height = 64, input_width = 32;
    std::size_t sample_cap = 256;
    std::uint64_t seed = 1;
    int workers = 1;
};

void run_analyze(const AnalyzeOpts& o) {
    auto source = gpr::load_manifest(o.source);
    auto target = gpr::load_manifest(o.target);

    std::optional<gpr::Extractor> extractor;
    if (!o.weights_path.empty()) {
        extractor.emplace(gpr::load_weights(o.weights_path));
    } else {
        gpr::ExtractorConfig cfg;
        cfg.weight_seed = env_seed_override(o.extractor_seed);
        cfg.input_height = o.input_height;
        cfg.input_width = o.input_width;
        extractor.emplace(cfg);
    }
    if (!o.save_weights.empty()) gpr::persist_weights(*extractor, o.save_weights);

    auto weights = gpr::StyleWeights::uniform(extractor->config().taps.size());
    auto table = gpr::attribute_loss_table(*extractor, source, target, weights, o.sample_cap,
                                           env_seed_override(o.seed), o.workers);
    gpr::write_loss_table_csv(table, o.out);
    std::cout << "wrote loss table to " << o.out << "\n";
}

// ------------------------------------------------------------------ select

struct SelectOpts {
    std::string table, out;
    gpr::KConfig k;
};

json selection_to_json(const gpr::AttributeSelection& sel) {
    json j;
    j["backgrounds"] = sel.values(gpr::Dimension::background);
    j["weathers"] = sel.values(gpr::Dimension::weather);
    j["illumination_bands"] = sel.values(gpr::Dimension::illumination);
    std::vector<int> vps;
    for (const auto& v : sel.values(gpr::Dimension::viewpoint)) vps.push_back(std::stoi(v));
    j["viewpoints"] = vps;
    j["k"] = {{"backgrounds", sel.k.backgrounds},
              {"weathers", sel.k.weathers},
              {"illumination_bands", sel.k.illumination_bands},
              {"viewpoints", sel.k.viewpoints}};
    return j;
}

gpr::SliceFilter selection_file_to_filter(const std::string& path) {
    std::ifstream in(path);
    if (!in) gpr::raise(gpr::ErrorKind::io_error, "cannot open for reading: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        gpr::raise(gpr::ErrorKind::format_error, path + ": " + e.what());
    }
    gpr::SliceFilter filter;
    try {
        filter.backgrounds = j.at("backgrounds").get<std::vector<std::string>>();
        filter.weathers = j.at("weathers").get<std::vector<std::string>>();
        filter.illumination_bands = j.at("illumination_bands").get<std::vector<std::string>>();
        filter.viewpoints = j.at("viewpoints").get<std::vector<int>>();
    } catch (const json::exception& e) {
        gpr::raise(gpr::ErrorKind::format_error, path + ": " + e.what());
    }
    return filter;
}

void run_select(const SelectOpts& o) {
    auto table = gpr::read_loss_table_csv(o.table);
    auto selection = gpr::select_attributes(table, o.k);
    std::ofstream out(o.out, std::ios::binary);
    if (!out) gpr::raise(gpr::ErrorKind::io_error, "cannot open for writing: " + o.out);
    out << selection_to_json(selection).dump(2) << "\n";
    std::cout << "wrote selection to " << o.out << "\n";
}

// ------------------------------------------------------------------- train

struct TrainOpts {
    std::string manifest, selection, out, log;
    int epochs = 4;
    int batch_p = 4, batch_k = 4;
    double margin = 0.3, lr = 0.05, momentum = 0.9, weight_decay = 0.0005;
    double erase_prob = 0.5;
    int input_height = 128, input_width = 64;
    int embedding_dim = 64;
    std::uint64_t seed = 1;
    int max_per_id = 0; // 0 = no cap
};

void run_train(const TrainOpts& o) {
    auto manifest = gpr::load_manifest(o.manifest);
    if (!o.selection.empty())
        manifest = gpr::slice_manifest(manifest, selection_file_to_filter(o.selection));
    std::uint64_t seed = env_seed_override(o.seed);
    if (o.max_per_id > 0)
        manifest = gpr::limit_records_per_identity(manifest, o.max_per_id, gpr::seed_mix(seed, 0x6361ULL));

    gpr::ModelConfig mc;
    mc.input_height = o.input_height;
    mc.input_width = o.input_width;
    mc.embedding_dim = o.embedding_dim;
    mc.num_identities = static_cast<int>(manifest.identities_in_order().size());
    mc.init_seed = gpr::seed_mix(seed, 0x696eULL);
    gpr::EmbeddingModel model(mc);

    gpr::TrainConfig tc;
    tc.epochs = o.epochs;
    tc.batch_p = o.batch_p;
    tc.batch_k = o.batch_k;
    tc.margin = o.margin;
    tc.learning_rate = o.lr;
    tc.momentum = o.momentum;
    tc.weight_decay = o.weight_decay;
    tc.erasing.probability = o.erase_prob;
    tc.seed = seed;
    auto log = gpr::train(model, manifest, tc);

    gpr::save_model(model, o.out);
    if (!o.log.empty()) gpr::write_train_log_csv(log, o.log);
    std::cout << "trained " << o.epochs << " epochs on " << manifest.records.size()
              << " records; model saved to " << o.out << "\n";
}

// -------------------------------------------------------------------- eval

struct EvalOpts {
    std::string model, manifest, out;
    int queries_per_id = 2;
    int max_per_id = 0;
    std::uint64_t seed = 1;
    int workers = 1;
};

void run_eval(const EvalOpts& o) {
    auto model = gpr::load_model(o.model);
    auto manifest = gpr::load_manifest(o.manifest);
    std::uint64_t seed = env_seed_override(o.seed);
    if (o.max_per_id > 0)
        manifest = gpr::limit_records_per_identity(manifest, o.max_per_id, gpr::seed_mix(seed, 0x6576ULL));
    auto set = gpr::embed_manifest(model, manifest, o.workers);
    auto queries = gpr::pick_queries(set, o.queries_per_id, seed);
    auto report = gpr::evaluate(queries, set, {1, 5});
    gpr::write_eval_report_csv(report, o.out);
    std::cout << "mAP " << gpr::format_double(report.mean_ap) << ", cmc@1 "
              << gpr::format_double(report.cmc_at(1)) << " over " << report.queries_evaluated
              << " queries; wrote " << o.out << "\n";
}

// ------------------------------------------------------------------ report

struct ReportOpts {
    std::string table, eval, out_dir;
    gpr::KConfig k;
    std::vector<std::string> meta;
};

gpr::EvalReport read_eval_report_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) gpr::raise(gpr::ErrorKind::io_error, "cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line)) gpr::raise(gpr::ErrorKind::format_error, path + ": missing header");
    gpr::EvalReport report;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = gpr::split_csv_line(line);
        if (fields.size() != 2)
            gpr::raise(gpr::ErrorKind::format_error, path + ": expected 2 fields: " + line);
        if (fields[0] == "mAP") report.mean_ap = gpr::parse_double(fields[1], path);
        else if (fields[0] == "queries_evaluated") report.queries_evaluated = std::stoi(fields[1]);
        else if (fields[0] == "queries_skipped") report.queries_skipped = std::stoi(fields[1]);
        else if (fields[0].rfind("cmc@", 0) == 0)
            report.cmc.emplace_back(std::stoi(fields[0].substr(4)),
                                    gpr::parse_double(fields[1], path));
    }
    return report;
}

void run_report(const ReportOpts& o) {
    auto table = gpr::read_loss_table_csv(o.table);
    std::optional<gpr::EvalReport> eval;
    if (!o.eval.empty()) eval = read_eval_report_csv(o.eval);

    gpr::RunMetadata meta;
    meta.add("gpr_version", gpr::kVersion);
    for (const auto& kv : o.meta) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            gpr::raise(gpr::ErrorKind::bad_config, "--meta expects key=value, got: " + kv);
        meta.add(kv.substr(0, eq), kv.substr(eq + 1));
    }
    gpr::emit_report(table, eval, o.k, meta, o.out_dir);
    std::cout << "wrote report bundle to " << o.out_dir << "\n";
}

// ---------------------------------------------------------------- pipeline

struct PipelineOpts {
    std::string config;
    std::string out_dir; // overrides config
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 0; // 0 = from config
};

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (j.contains(key)) return j.at(key).get<T>();
    return fallback;
}

GenerateOpts manifest_stage_opts(const json& j, std::uint64_t fallback_seed, const std::string& out) {
    GenerateOpts g;
    g.ids = get_or(j, "ids", 4);
    g.seed = get_or(j, "seed", fallback_seed);
    g.width = get_or(j, "width", 32);
    g.height = get_or(j, "height", 64);
    g.out = out;
    if (j.contains("backgrounds")) {
        auto v = j.at("backgrounds").get<std::vector<std::string>>();
        g.backgrounds = v.empty() ? "" : v[0];
        for (std::size_t i = 1; i < v.size(); ++i) g.backgrounds += "," + v[i];
    }
    if (j.contains("weathers")) {
        auto v = j.at("weathers").get<std::vector<std::string>>();
        g.weathers = v.empty() ? "" : v[0];
        for (std::size_t i = 1; i < v.size(); ++i) g.weathers += "," + v[i];
    }
    if (j.contains("illumination_bands")) {
        auto v = j.at("illumination_bands").get<std::vector<std::string>>();
        g.illuminations = v.empty() ? "" : v[0];
        for (std::size_t i = 1; i < v.size(); ++i) g.illuminations += "," + v[i];
    }
    if (j.contains("viewpoints")) {
        auto v = j.at("viewpoints").get<std::vector<int>>();
        g.viewpoints = v.empty() ? "" : std::to_string(v[0]);
        for (std::size_t i = 1; i < v.size(); ++i) g.viewpoints += "," + std::to_string(v[i]);
    }
    return g;
}

void run_pipeline(const PipelineOpts& o) {
    std::ifstream in(o.config);
    if (!in) gpr::raise(gpr::ErrorKind::io_error, "cannot open for reading: " + o.config);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        gpr::raise(gpr::ErrorKind::format_error, o.config + ": " + e.what());
    }

    std::string out_dir = !o.out_dir.empty() ? o.out_dir : get_or<std::string>(cfg, "out_dir", "gpr-out");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) gpr::raise(gpr::ErrorKind::io_error, "cannot create directory: " + out_dir);

    std::uint64_t base_seed = get_or<std::uint64_t>(cfg, "seed", 1);
    if (o.seed_given) base_seed = o.seed;
    base_seed = env_seed_override(base_seed);
    int workers = o.workers > 0 ? o.workers : get_or(cfg, "workers", 1);

    json jsource = cfg.contains("source") ? cfg.at("source") : json::object();
    json jtarget = cfg.contains("target") ? cfg.at("target") : json::object();
    json jext = cfg.contains("extractor") ? cfg.at("extractor") : json::object();
    json janalyze = cfg.contains("analyze") ? cfg.at("analyze") : json::object();
    json jselect = cfg.contains("select") ? cfg.at("select") : json::object();
    json jtrain = cfg.contains("train") ? cfg.at("train") : json::object();
    json jeval = cfg.contains("eval") ? cfg.at("eval") : json::object();

    // 1. generate source and target manifests
    const std::string source_path = out_dir + "/source_manifest.txt";
    const std::string target_path = out_dir + "/target_manifest.txt";
    run_generate(manifest_stage_opts(jsource, gpr::seed_mix(base_seed, 1), source_path));
    run_generate(manifest_stage_opts(jtarget, gpr::seed_mix(base_seed, 2), target_path));

    // 2. extractor weights
    const std::string weights_path = out_dir + "/extractor.gprw";
    {
        gpr::ExtractorConfig xc;
        xc.weight_seed = get_or<std::uint64_t>(jext, "seed", gpr::seed_mix(base_seed, 3));
        xc.input_height = get_or(jext, "input_height", 64);
        xc.input_width = get_or(jext, "input_width", 32);
        gpr::Extractor extractor(xc);
        gpr::persist_weights(extractor, weights_path);
        std::cout << "wrote extractor weights to " << weights_path << "\n";
    }

    // 3. attribute analysis
    const std::string table_path = out_dir + "/loss_table.csv";
    {
        AnalyzeOpts a;
        a.source = source_path;
        a.target = target_path;
        a.out = table_path;
        a.weights_path = weights_path;
        a.sample_cap = get_or<std::size_t>(janalyze, "sample_cap", 256);
        a.seed = get_or<std::uint64_t>(janalyze, "seed", gpr::seed_mix(base_seed, 4));
        a.workers = workers;
        run_analyze(a);
    }

    // 4. selection
    const std::string selection_path = out_dir + "/selection.json";
    {
        SelectOpts s;
        s.table = table_path;
        s.out = selection_path;
        s.k.backgrounds = get_or(jselect, "backgrounds", 3);
        s.k.weathers = get_or(jselect, "weathers", 2);
        s.k.illumination_bands = get_or(jselect, "illumination_bands", 4);
        s.k.viewpoints = get_or(jselect, "viewpoints", 6);
        run_select(s);
    }

    // 5. training on the selected subset of the source
    const std::string model_path = out_dir + "/model.gprm";
    const std::string train_log_path = out_dir + "/train_log.csv";
    {
        TrainOpts t;
        t.manifest = source_path;
        t.selection = selection_path;
        t.out = model_path;
        t.log = train_log_path;
        t.epochs = get_or(jtrain, "epochs", 2);
        t.batch_p = get_or(jtrain, "batch_p", 2);
        t.batch_k = get_or(jtrain, "batch_k", 2);
        t.margin = get_or(jtrain, "margin", 0.3);
        t.lr = get_or(jtrain, "lr", 0.05);
        t.momentum = get_or(jtrain, "momentum", 0.9);
        t.weight_decay = get_or(jtrain, "weight_decay", 0.0005);
        t.erase_prob = get_or(jtrain, "erase_probability", 0.5);
        t.input_height = get_or(jtrain, "input_height", 64);
        t.input_width = get_or(jtrain, "input_width", 32);
        t.embedding_dim = get_or(jtrain, "embedding_dim", 32);
        t.seed = get_or<std::uint64_t>(jtrain, "seed", gpr::seed_mix(base_seed, 5));
        t.max_per_id = get_or(jtrain, "max_per_id", 32);
        run_train(t);
    }

    // 6. evaluation on the target
    const std::string eval_path = out_dir + "/eval_report.csv";
    {
        EvalOpts e;
        e.model = model_path;
        e.manifest = target_path;
        e.out = eval_path;
        e.queries_per_id = get_or(jeval, "queries_per_id", 2);
        e.max_per_id = get_or(jeval, "max_per_id", 12);
        e.seed = get_or<std::uint64_t>(jeval, "seed", gpr::seed_mix(base_seed, 6));
        e.workers = workers;
        run_eval(e);
    }

    // 7. report bundle
    {
        ReportOpts r;
        r.table = table_path;
        r.eval = eval_path;
        r.out_dir = out_dir + "/report";
        r.k.backgrounds = get_or(jselect, "backgrounds", 3);
        r.k.weathers = get_or(jselect, "weathers", 2);
        r.k.illumination_bands = get_or(jselect, "illumination_bands", 4);
        r.k.viewpoints = get_or(jselect, "viewpoints", 6);
        r.meta.push_back("base_seed=" + std::to_string(base_seed));
        r.meta.push_back("workers=" + std::to_string(workers));
        r.meta.push_back("config=" + o.config);
        run_report(r);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"attribute-aware synthetic re-ID dataset analysis pipeline"};
    app.require_subcommand(1);

    GenerateOpts gen;
    auto* cgen = app.add_subcommand("generate", "generate a factorial dataset manifest");
    cgen->add_option("--ids", gen.ids, "number of identities")->required();
    cgen->add_option("--seed", gen.seed, "master seed");
    cgen->add_option("--out", gen.out, "output manifest path")->required();
    cgen->add_option("--width", gen.width, "render width");
    cgen->add_option("--height", gen.height, "render height");
    cgen->add_option("--backgrounds", gen.backgrounds, "comma-separated background labels");
    cgen->add_option("--weathers", gen.weathers, "comma-separated weather labels");
    cgen->add_option("--illuminations", gen.illuminations, "comma-separated illumination bands");
    cgen->add_option("--viewpoints", gen.viewpoints, "comma-separated viewpoint degrees");

    AnalyzeOpts ana;
    auto* cana = app.add_subcommand("analyze", "per-attribute style loss table vs a target");
    cana->add_option("--source", ana.source, "source manifest")->required();
    cana->add_option("--target", ana.target, "target manifest")->required();
    cana->add_option("--out", ana.out, "output CSV path")->required();
    cana->add_option("--weights", ana.weights_path, "extractor weights file (GPRW)");
    cana->add_option("--save-weights", ana.save_weights, "persist the extractor weights here");
    cana->add_option("--extractor-seed", ana.extractor_seed, "seed for a fresh extractor");
    cana->add_option("--input-height", ana.input_height, "extractor input height");
    cana->add_option("--input-width", ana.input_width, "extractor input width");
    cana->add_option("--sample-cap", ana.sample_cap, "max images sampled per slice");
    cana->add_option("--seed", ana.seed, "sampling seed");
    cana->add_option("--workers", ana.workers, "worker threads (1 = deterministic reference)");

    SelectOpts sel;
    auto* csel = app.add_subcommand("select", "pick the k smallest-loss values per dimension");
    csel->add_option("--table", sel.table, "loss table CSV")->required();
    csel->add_option("--out", sel.out, "output selection JSON")->required();
    csel->add_option("--k-backgrounds", sel.k.backgrounds, "k for backgrounds");
    csel->add_option("--k-weathers", sel.k.weathers, "k for weathers");
    csel->add_option("--k-illuminations", sel.k.illumination_bands, "k for illumination bands");
    csel->add_option("--k-viewpoints", sel.k.viewpoints, "k for viewpoints");

    TrainOpts trn;
    auto* ctrn = app.add_subcommand("train", "train the embedding model");
    ctrn->add_option("--manifest", trn.manifest, "training manifest")->required();
    ctrn->add_option("--selection", trn.selection, "selection JSON to filter the manifest");
    ctrn->add_option("--out", trn.out, "output model checkpoint (GPRM)")->required();
    ctrn->add_option("--log", trn.log, "training log CSV");
    ctrn->add_option("--epochs", trn.epochs, "training epochs");
    ctrn->add_option("--batch-p", trn.batch_p, "identities per batch");
    ctrn->add_option("--batch-k", trn.batch_k, "instances per identity");
    ctrn->add_option("--margin", trn.margin, "triplet margin");
    ctrn->add_option("--lr", trn.lr, "learning rate");
    ctrn->add_option("--momentum", trn.momentum, "SGD momentum");
    ctrn->add_option("--weight-decay", trn.weight_decay, "L2 weight decay");
    ctrn->add_option("--erase-prob", trn.erase_prob, "random erasing probability");
    ctrn->add_option("--input-height", trn.input_height, "model input height");
    ctrn->add_option("--input-width", trn.input_width, "model input width");
    ctrn->add_option("--embedding-dim", trn.embedding_dim, "embedding dimension");
    ctrn->add_option("--seed", trn.seed, "training seed");
    ctrn->add_option("--max-per-id", trn.max_per_id, "cap records per identity (0 = all)");

    EvalOpts evl;
    auto* cevl = app.add_subcommand("eval", "mAP/CMC retrieval evaluation");
    cevl->add_option("--model", evl.model, "model checkpoint (GPRM)")->required();
    cevl->add_option("--manifest", evl.manifest, "evaluation manifest")->required();
    cevl->add_option("--out", evl.out, "output CSV path")->required();
    cevl->add_option("--queries-per-id", evl.queries_per_id, "queries sampled per identity");
    cevl->add_option("--max-per-id", evl.max_per_id, "cap records per identity (0 = all)");
    cevl->add_option("--seed", evl.seed, "query sampling seed");
    cevl->add_option("--workers", evl.workers, "worker threads");

    ReportOpts rep;
    auto* crep = app.add_subcommand("report", "emit CSV + SVG report bundle");
    crep->add_option("--table", rep.table, "loss table CSV")->required();
    crep->add_option("--eval", rep.eval, "eval report CSV (optional)");
    crep->add_option("--out-dir", rep.out_dir, "output directory")->required();
    crep->add_option("--k-backgrounds", rep.k.backgrounds, "bars marked for backgrounds");
    crep->add_option("--k-weathers", rep.k.weathers, "bars marked for weathers");
    crep->add_option("--k-illuminations", rep.k.illumination_bands, "bars marked for illumination");
    crep->add_option("--k-viewpoints", rep.k.viewpoints, "bars marked for viewpoints");
    crep->add_option("--meta", rep.meta, "extra metadata rows, key=value");

    PipelineOpts pip;
    auto* cpip = app.add_subcommand("pipeline", "run all stages from a JSON config");
    cpip->add_option("--config", pip.config, "pipeline config JSON")->required();
    cpip->add_option("--out-dir", pip.out_dir, "output directory (overrides config)");
    auto* seed_opt = cpip->add_option("--seed", pip.seed, "base seed (overrides config)");
    cpip->add_option("--workers", pip.workers, "worker threads (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // UsageError
    }

    pip.seed_given = seed_opt->count() > 0;

    try {
        if (*cgen) run_generate(gen);
        else if (*cana) run_analyze(ana);
        else if (*csel) run_select(sel);
        else if (*ctrn) run_train(trn);
        else if (*cevl) run_eval(evl);
        else if (*crep) run_report(rep);
        else if (*cpip) run_pipeline(pip);
    } catch (const gpr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
