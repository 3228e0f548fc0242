/*
 * Copyright 2026 The gbscert Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gbscert/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

#include "gbscert/error.hpp"
#include "gbscert/orbits.hpp"
#include "gbscert/rng.hpp"
#include "gbscert/samplers.hpp"

namespace gbscert {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestSchema = "gbscert.manifest/1";
constexpr const char* kBundleSchema = "gbscert.bundle/1";
constexpr const char* kFeatureSchema = "gbscert.features/1";
constexpr const char* kKernelSchema = "gbscert.kernels/1";
constexpr const char* kAccuracySchema = "gbscert.accuracy/1";
constexpr const char* kManifestName = "manifest.json";

constexpr std::uint64_t kUnitaryTag = 0x55;
constexpr std::uint64_t kSqueezeTag = 0x53;
constexpr std::uint64_t kSplitTag = 0x73706c;
constexpr std::uint64_t kInitTag = 0x696e69;
constexpr std::uint64_t kBatchTag = 0x626174;
constexpr std::uint64_t kGeneralizeTag = 0x67656e;

constexpr int kHistogramBins = 30;

std::uint64_t u64(int v) { return static_cast<std::uint64_t>(v); }

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string pad_replicate(int r) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03d", r);
    return buf;
}

std::string bundle_name(ModelKind kind, int n, int r) {
    return "bundle_" + std::string(to_string(kind)) + "_n" + std::to_string(n) + "_r" + pad_replicate(r) + ".json";
}

std::string sample_name(ModelKind kind, int n, int r) {
    return "samples_" + std::string(to_string(kind)) + "_n" + std::to_string(n) + "_r" + pad_replicate(r) + ".jsonl";
}

Json load_json(const fs::path& path) {
    try {
        return Json::parse(read_file(path));
    } catch (const Json::exception& e) {
        fail(ErrorKind::Io, "malformed artifact " + path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const Json& j) { write_file_atomic(path, j.dump(1) + "\n"); }

// Runs body(i) for i < count across OpenMP threads and rethrows the first failure.
template <typename F>
void parallel_for(std::size_t count, F&& body) {
    std::exception_ptr error;
    std::mutex guard;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
            std::lock_guard lock(guard);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

struct Job {
    ModelKind kind;
    int n;
    int replicate;
};

std::vector<Job> jobs_for(const ExperimentConfig& c, bool include_smsv = true) {
    std::vector<Job> jobs;
    for (int n : c.sectors)
        for (ModelKind k : c.models)
            if (include_smsv || k != ModelKind::Smsv)
                for (int r = 0; r < c.circuits_per_class; ++r) jobs.push_back({k, n, r});
    return jobs;
}

std::string sha256_of_file(const fs::path& path) { return sha256_hex(read_file(path)); }

Json upstream_digests(const StageContext& ctx, std::initializer_list<Stage> stages) {
    Json up = Json::object();
    for (Stage s : stages) up[std::string(to_string(s))] = sha256_of_file(ctx.stage_dir(s) / kManifestName);
    return up;
}

// Loads an upstream manifest, failing with a dependency error that names the missing or stale file.
Json require_upstream(const StageContext& ctx, Stage stage) {
    const fs::path manifest = ctx.stage_dir(stage) / kManifestName;
    if (!fs::exists(manifest))
        fail(ErrorKind::Dependency, "missing upstream artifact " + manifest.string() + " (run the '" +
                                        std::string(to_string(stage)) + "' stage first)");
    Json m = load_json(manifest);
    const std::string digest = config_digest(ctx.config);
    if (m.value("config_digest", std::string()) != digest)
        fail(ErrorKind::Dependency, "upstream artifact " + manifest.string() +
                                        " was produced by a different config; rerun the '" +
                                        std::string(to_string(stage)) + "' stage");
    for (const auto& f : m.at("files")) {
        const fs::path p = ctx.stage_dir(stage) / f.at("path").get<std::string>();
        if (!fs::exists(p)) fail(ErrorKind::Dependency, "missing upstream artifact " + p.string());
    }
    return m;
}

// True when the stage manifest matches the config, lineage and upstream manifests.
bool up_to_date(const StageContext& ctx, Stage stage, const Json& upstream, StageResult& result) {
    const fs::path manifest = ctx.stage_dir(stage) / kManifestName;
    if (!fs::exists(manifest)) return false;
    Json m;
    try {
        m = Json::parse(read_file(manifest));
    } catch (const Json::exception&) {
        return false;
    }
    if (m.value("config_digest", std::string()) != config_digest(ctx.config)) return false;
    if (m.value("lineage", Json()) != ctx.lineage(stage)) return false;
    if (m.value("upstream", Json()) != upstream) return false;
    std::vector<fs::path> outputs;
    for (const auto& f : m.at("files")) {
        const fs::path p = ctx.stage_dir(stage) / f.at("path").get<std::string>();
        if (!fs::exists(p) || sha256_of_file(p) != f.at("sha256").get<std::string>()) return false;
        outputs.push_back(p);
    }
    result.skipped = true;
    result.outputs = std::move(outputs);
    return true;
}

Json artifact_header(const StageContext& ctx, Stage stage, const char* schema) {
    Json j;
    j["schema"] = schema;
    j["config_digest"] = config_digest(ctx.config);
    j["lineage"] = ctx.lineage(stage);
    return j;
}

StageResult finish_stage(const StageContext& ctx, Stage stage, const Json& upstream, const std::vector<fs::path>& files) {
    Json m = artifact_header(ctx, stage, kManifestSchema);
    m["upstream"] = upstream;
    Json list = Json::array();
    for (const auto& p : files)
        list.push_back({{"path", p.filename().string()}, {"sha256", sha256_of_file(p)}});
    m["files"] = list;
    write_json(ctx.stage_dir(stage) / kManifestName, m);
    return {stage, false, files};
}

SqueezingParams squeezing_for(const ExperimentConfig& c, int n, std::size_t m, Rng& rng) {
    if (c.squeezing.mode == SqueezingSpec::Mode::Explicit) {
        if (c.squeezing.values.size() == 1) return SqueezingParams::uniform(m, c.squeezing.values[0]);
        return SqueezingParams(c.squeezing.values);
    }
    std::vector<double> w(m);
    for (auto& x : w) x = c.squeezing.weight_low + (c.squeezing.weight_high - c.squeezing.weight_low) * rng.uniform();
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<double> s(m);
    for (std::size_t i = 0; i < m; ++i) s[i] = std::asinh(std::sqrt(static_cast<double>(n) * w[i] / total));
    return SqueezingParams(std::move(s));
}

GaussianModel model_for(ModelKind kind, const UnitaryMatrix& u, const SqueezingParams& s,
                        const std::vector<double>& phases) {
    switch (kind) {
        case ModelKind::Smsv: return GaussianModel::smsv(u, s);
        case ModelKind::Thermal: return GaussianModel::thermal(u, matched_thermal_means(s));
        case ModelKind::Coherent: return GaussianModel::coherent(u, matched_coherent_amplitudes(s, phases));
        case ModelKind::DistinguishableSmsv: return GaussianModel::distinguishable_smsv(u, s);
        case ModelKind::DistinguishableThermal:
            return GaussianModel::distinguishable_thermal(u, matched_thermal_means(s));
    }
    fail(ErrorKind::Parameter, "unknown model kind");
}

Json stats_json(const std::vector<double>& values) {
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(acc / static_cast<double>(values.size() - 1)) : 0.0;
    return {{"mean", mean}, {"std", sd}, {"values", values}};
}

std::vector<int> json_ints(const Json& j) { return j.get<std::vector<int>>(); }

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
    for (const auto& [k, v] : j.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* allowed) { return k == allowed; }))
            fail(ErrorKind::Parameter, "unknown config key '" + k + "' in " + where);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

std::size_t ExperimentConfig::modes_for(int n) const {
    return mode_rule == ModeRule::Square ? static_cast<std::size_t>(n) * static_cast<std::size_t>(n) : fixed_modes;
}

void ExperimentConfig::validate() const {
    auto check = [](bool ok, const std::string& msg) { require(ok, ErrorKind::Parameter, msg); };
    check(!sectors.empty(), "at least one photon sector is required");
    std::set<int> seen;
    for (int n : sectors) {
        check(n >= 4, "photon sectors must be at least 4 so every orbit exists");
        check(n % 2 == 0, "photon sectors must be even; squeezed vacuum has no odd-sector orbit weight");
        check(seen.insert(n).second, "photon sectors must be distinct");
        check(modes_for(n) + 2 >= static_cast<std::size_t>(n), "sector " + std::to_string(n) + " needs at least n - 2 modes");
    }
    check(mode_rule == ModeRule::Square || fixed_modes >= 1, "fixed mode count must be positive");
    check(circuits_per_class >= 2, "circuits per class must be at least 2");
    check(samples >= 1 && mc_draws >= 1, "sample and draw budgets must be at least 1");
    check(std::find(models.begin(), models.end(), ModelKind::Smsv) != models.end(), "models must include smsv");
    check(models.size() >= 2, "at least one mock-up model is required");
    check(std::set<ModelKind>(models.begin(), models.end()).size() == models.size(), "models must be distinct");
    if (squeezing.mode == SqueezingSpec::Mode::SectorMean) {
        check(squeezing.weight_low > 0.0 && squeezing.weight_high >= squeezing.weight_low,
              "squeezing weights need 0 < low <= high");
    } else {
        check(!squeezing.values.empty(), "explicit squeezing needs values");
        for (double s : squeezing.values) check(std::isfinite(s) && s >= 0.0, "squeezing values must be >= 0");
        if (squeezing.values.size() > 1)
            for (int n : sectors)
                check(modes_for(n) == squeezing.values.size(), "explicit squeezing needs one value per mode");
    }
    const auto& k = classifier;
    check(k.hidden1 >= 1 && k.hidden2 >= 1, "hidden widths must be positive");
    check(k.train_fraction > 0.0 && k.train_fraction < 1.0, "train fraction must lie in (0, 1)");
    check(k.repeats >= 1, "classifier repeats must be at least 1");
    check(k.training.epochs >= 0 && k.training.batch_size >= 2 && k.training.learning_rate > 0.0 &&
              k.training.momentum >= 0.0 && k.training.momentum < 1.0,
          "invalid classifier training options");
    if (generalization.repeats > 0) {
        for (int n : generalization.train_ns)
            check(seen.count(n), "generalization train sector " + std::to_string(n) + " is not a configured sector");
        for (int n : generalization.test_ns)
            check(seen.count(n), "generalization test sector " + std::to_string(n) + " is not a configured sector");
    }
    check(generalization.repeats >= 0, "generalization repeats must be >= 0");
}

Json config_to_json(const ExperimentConfig& c) {
    Json j;
    j["schema"] = kConfigSchema;
    if (c.mode_rule == ExperimentConfig::ModeRule::Square) j["modes"] = "square";
    else j["modes"] = c.fixed_modes;
    j["sectors"] = c.sectors;
    j["circuits_per_class"] = c.circuits_per_class;
    Json models = Json::array();
    for (ModelKind k : c.models) models.push_back(std::string(to_string(k)));
    j["models"] = models;
    if (c.squeezing.mode == SqueezingSpec::Mode::SectorMean)
        j["squeezing"] = {{"mode", "sector_mean"},
                          {"weight_low", c.squeezing.weight_low},
                          {"weight_high", c.squeezing.weight_high}};
    else
        j["squeezing"] = {{"mode", "explicit"}, {"values", c.squeezing.values}};
    j["samples"] = c.samples;
    j["mc_draws"] = c.mc_draws;
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir.string();
    j["kernel_normalization"] = std::string(to_string(c.kernel_normalization));
    const auto& k = c.classifier;
    j["classifier"] = {{"hidden", {k.hidden1, k.hidden2}},
                       {"epochs", k.training.epochs},
                       {"learning_rate", k.training.learning_rate},
                       {"momentum", k.training.momentum},
                       {"batch_size", k.training.batch_size},
                       {"train_fraction", k.train_fraction},
                       {"repeats", k.repeats}};
    j["generalization"] = {{"train_sectors", c.generalization.train_ns},
                           {"test_sectors", c.generalization.test_ns},
                           {"repeats", c.generalization.repeats}};
    return j;
}

ExperimentConfig config_from_json(const Json& j) {
    ExperimentConfig c;
    try {
        require(j.is_object(), ErrorKind::Parameter, "config must be a JSON object");
        reject_unknown(j,
                       {"schema", "modes", "sectors", "circuits_per_class", "models", "squeezing", "samples", "mc_draws",
                        "seed", "output_dir", "kernel_normalization", "classifier", "generalization"},
                       "config");
        if (j.contains("schema"))
            require(j.at("schema").get<std::string>() == kConfigSchema, ErrorKind::Parameter,
                    "unsupported config schema");
        require(j.contains("seed"), ErrorKind::Parameter, "config must set a seed");
        if (j.contains("modes")) {
            const Json& m = j.at("modes");
            if (m.is_string()) {
                require(m.get<std::string>() == "square", ErrorKind::Parameter, "modes must be \"square\" or an integer");
            } else {
                require(m.is_number_integer() && m.get<long long>() >= 1, ErrorKind::Parameter,
                        "modes must be \"square\" or a positive integer");
                c.mode_rule = ExperimentConfig::ModeRule::Fixed;
                c.fixed_modes = m.get<std::size_t>();
            }
        }
        c.sectors = get_or(j, "sectors", c.sectors);
        c.circuits_per_class = get_or(j, "circuits_per_class", c.circuits_per_class);
        if (j.contains("models")) {
            c.models.clear();
            for (const auto& name : j.at("models")) c.models.push_back(parse_model_kind(name.get<std::string>()));
        }
        if (j.contains("squeezing")) {
            const Json& s = j.at("squeezing");
            reject_unknown(s, {"mode", "weight_low", "weight_high", "values"}, "squeezing");
            const std::string mode = get_or<std::string>(s, "mode", "sector_mean");
            if (mode == "sector_mean") {
                c.squeezing.weight_low = get_or(s, "weight_low", c.squeezing.weight_low);
                c.squeezing.weight_high = get_or(s, "weight_high", c.squeezing.weight_high);
            } else if (mode == "explicit") {
                c.squeezing.mode = SqueezingSpec::Mode::Explicit;
                c.squeezing.values = s.at("values").get<std::vector<double>>();
            } else {
                fail(ErrorKind::Parameter, "squeezing mode must be sector_mean or explicit");
            }
        }
        c.samples = get_or(j, "samples", c.samples);
        c.mc_draws = get_or(j, "mc_draws", c.mc_draws);
        c.seed = j.at("seed").get<std::uint64_t>();
        c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir.string());
        if (j.contains("kernel_normalization"))
            c.kernel_normalization = parse_normalization(j.at("kernel_normalization").get<std::string>());
        if (j.contains("classifier")) {
            const Json& k = j.at("classifier");
            reject_unknown(k, {"hidden", "epochs", "learning_rate", "momentum", "batch_size", "train_fraction", "repeats"},
                           "classifier");
            if (k.contains("hidden")) {
                auto h = json_ints(k.at("hidden"));
                require(h.size() == 2, ErrorKind::Parameter, "classifier.hidden must list two widths");
                c.classifier.hidden1 = h[0];
                c.classifier.hidden2 = h[1];
            }
            auto& t = c.classifier.training;
            t.epochs = get_or(k, "epochs", t.epochs);
            t.learning_rate = get_or(k, "learning_rate", t.learning_rate);
            t.momentum = get_or(k, "momentum", t.momentum);
            t.batch_size = get_or(k, "batch_size", t.batch_size);
            c.classifier.train_fraction = get_or(k, "train_fraction", c.classifier.train_fraction);
            c.classifier.repeats = get_or(k, "repeats", c.classifier.repeats);
        }
        if (j.contains("generalization")) {
            const Json& g = j.at("generalization");
            reject_unknown(g, {"train_sectors", "test_sectors", "repeats"}, "generalization");
            c.generalization.train_ns = get_or(g, "train_sectors", c.generalization.train_ns);
            c.generalization.test_ns = get_or(g, "test_sectors", c.generalization.test_ns);
            c.generalization.repeats = get_or(g, "repeats", c.generalization.repeats);
        }
    } catch (const Json::exception& e) {
        fail(ErrorKind::Parameter, std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    if (!fs::exists(path)) fail(ErrorKind::Io, "config file not found: " + path.string());
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const Json::exception& e) {
        fail(ErrorKind::Parameter, "config is not valid JSON: " + std::string(e.what()));
    }
    return config_from_json(j);
}

std::string config_digest(const ExperimentConfig& config) {
    Json j = config_to_json(config);
    j.erase("output_dir");
    return sha256_hex(j.dump());
}

// ---------------------------------------------------------------------------
// Stages

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::Generate: return "generate";
        case Stage::Sample: return "sample";
        case Stage::Estimate: return "estimate";
        case Stage::Kernels: return "kernels";
        case Stage::Classify: return "classify";
        case Stage::Report: return "report";
    }
    return "unknown";
}

Stage parse_stage(std::string_view name) {
    for (Stage s : kAllStages)
        if (to_string(s) == name) return s;
    fail(ErrorKind::Parameter, "unknown stage '" + std::string(name) + "'");
}

fs::path StageContext::stage_dir(Stage stage) const { return config.output_dir / std::string(to_string(stage)); }

std::uint64_t StageContext::stage_seed(Stage stage) const {
    return derive_seed(config.seed, {static_cast<std::uint64_t>(stage) + 1, static_cast<std::uint64_t>(stage_seed_offset)});
}

Json StageContext::lineage(Stage stage) const {
    return {{"master_seed", config.seed},
            {"stage", std::string(to_string(stage))},
            {"stage_seed_offset", stage_seed_offset},
            {"stage_seed", stage_seed(stage)}};
}

StageResult run_generate(const StageContext& ctx) {
    const ExperimentConfig& c = ctx.config;
    c.validate();
    StageResult result{Stage::Generate, false, {}};
    const Json upstream = Json::object();
    if (up_to_date(ctx, Stage::Generate, upstream, result)) return result;
    const fs::path dir = ctx.stage_dir(Stage::Generate);
    try {
        fs::create_directories(dir);
    } catch (const fs::filesystem_error& e) {
        fail(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + e.what());
    }
    const std::uint64_t seed = ctx.stage_seed(Stage::Generate);

    std::vector<std::pair<int, int>> cells;
    for (int n : c.sectors)
        for (int r = 0; r < c.circuits_per_class; ++r) cells.emplace_back(n, r);
    std::vector<std::vector<fs::path>> written(cells.size());

    parallel_for(cells.size(), [&](std::size_t i) {
        const auto [n, r] = cells[i];
        const std::size_t m = c.modes_for(n);
        const std::uint64_t u_seed = derive_seed(seed, {kUnitaryTag, u64(n), u64(r)});
        const std::uint64_t p_seed = derive_seed(seed, {kSqueezeTag, u64(n), u64(r)});
        const UnitaryMatrix u = haar_unitary(m, u_seed);
        Rng rng(p_seed);
        const SqueezingParams s = squeezing_for(c, n, m, rng);
        std::vector<double> phases(m);
        for (auto& p : phases) p = 2.0 * M_PI * rng.uniform();
        for (ModelKind kind : c.models) {
            const GaussianModel model = model_for(kind, u, s, phases);
            Json b = artifact_header(ctx, Stage::Generate, kBundleSchema);
            b["kind"] = std::string(to_string(kind));
            b["n"] = n;
            b["modes"] = m;
            b["replicate"] = r;
            b["seeds"] = {{"unitary", u_seed}, {"parameters", p_seed}};
            b["parameter_digest"] = model_digest(model);
            b["model"] = model_to_json(model);
            const fs::path path = dir / bundle_name(kind, n, r);
            write_json(path, b);
            written[i].push_back(path);
        }
    });
    std::vector<fs::path> files;
    for (auto& w : written) files.insert(files.end(), w.begin(), w.end());
    return finish_stage(ctx, Stage::Generate, upstream, files);
}

namespace {

GaussianModel load_bundle_model(const fs::path& path, Json* bundle = nullptr) {
    Json b = load_json(path);
    require(b.value("schema", std::string()) == kBundleSchema, ErrorKind::Io, "not a bundle file: " + path.string());
    GaussianModel model = model_from_json(b.at("model"));
    if (bundle) *bundle = std::move(b);
    return model;
}

}  // namespace

StageResult run_sample(const StageContext& ctx) {
    const ExperimentConfig& c = ctx.config;
    c.validate();
    StageResult result{Stage::Sample, false, {}};
    require_upstream(ctx, Stage::Generate);
    const Json upstream = upstream_digests(ctx, {Stage::Generate});
    if (up_to_date(ctx, Stage::Sample, upstream, result)) return result;
    const fs::path dir = ctx.stage_dir(Stage::Sample);
    fs::create_directories(dir);
    const std::uint64_t seed = ctx.stage_seed(Stage::Sample);
    const std::vector<Job> jobs = jobs_for(c, false);
    std::vector<fs::path> files(jobs.size());

    // Replicates are independent; the sampler itself runs single-threaded here.
    parallel_for(jobs.size(), [&](std::size_t i) {
        const Job& job = jobs[i];
        const fs::path bundle = ctx.stage_dir(Stage::Generate) / bundle_name(job.kind, job.n, job.replicate);
        const GaussianModel model = load_bundle_model(bundle);
        const std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(job.kind), u64(job.n), u64(job.replicate)});
        SampleSet set = sample_model(model, c.samples, s);
        Json extra = {{"config_digest", config_digest(c)},
                      {"lineage", ctx.lineage(Stage::Sample)},
                      {"bundle", bundle.filename().string()},
                      {"n", job.n},
                      {"replicate", job.replicate}};
        files[i] = dir / sample_name(job.kind, job.n, job.replicate);
        write_file_atomic(files[i], format_sample_set(set, extra));
    });
    return finish_stage(ctx, Stage::Sample, upstream, files);
}

StageResult run_estimate(const StageContext& ctx) {
    const ExperimentConfig& c = ctx.config;
    c.validate();
    StageResult result{Stage::Estimate, false, {}};
    require_upstream(ctx, Stage::Generate);
    require_upstream(ctx, Stage::Sample);
    const Json upstream = upstream_digests(ctx, {Stage::Generate, Stage::Sample});
    if (up_to_date(ctx, Stage::Estimate, upstream, result)) return result;
    const fs::path dir = ctx.stage_dir(Stage::Estimate);
    fs::create_directories(dir);
    const std::uint64_t seed = ctx.stage_seed(Stage::Estimate);
    const std::vector<Job> jobs = jobs_for(c);
    std::vector<Json> records(jobs.size());

    parallel_for(jobs.size(), [&](std::size_t i) {
        const Job& job = jobs[i];
        const std::size_t m = c.modes_for(job.n);
        const std::vector<OrbitId> orbits = sector_orbits(job.n, m);
        std::vector<OrbitEstimate> estimates;
        double odd = 0.0;
        std::size_t budget = 0;
        EstimateMethod method = EstimateMethod::Empirical;
        if (job.kind == ModelKind::Smsv) {
            const GaussianModel model =
                load_bundle_model(ctx.stage_dir(Stage::Generate) / bundle_name(job.kind, job.n, job.replicate));
            const SmsvLaw law(model.circuit(), model.squeezing());
            for (const auto& o : orbits) {
                const std::uint64_t s = derive_seed(seed, {u64(job.n), u64(job.replicate), u64(o.doubles())});
                estimates.push_back(mc_orbit_estimate(law, o, c.mc_draws, s));
            }
            method = EstimateMethod::MonteCarlo;
            budget = c.mc_draws;
        } else {
            const fs::path path = ctx.stage_dir(Stage::Sample) / sample_name(job.kind, job.n, job.replicate);
            const SampleSet set = parse_sample_set(read_file(path));
            require(set.kind == job.kind && set.modes == m, ErrorKind::Io, "sample file does not match its bundle: " + path.string());
            estimates = empirical_orbit_probs(set, orbits);
            odd = odd_total_fraction(set);
            budget = set.sample_count();
        }
        const FeatureVector f = feature_vector(estimates, job.kind);
        records[i] = {{"kind", std::string(to_string(job.kind))},
                      {"n", job.n},
                      {"modes", m},
                      {"replicate", job.replicate},
                      {"method", std::string(to_string(method))},
                      {"values", f.values},
                      {"std_errors", f.std_errors},
                      {"odd_fraction", odd},
                      {"samples", budget}};
    });
    Json out = artifact_header(ctx, Stage::Estimate, kFeatureSchema);
    out["records"] = records;
    const fs::path path = dir / "features.json";
    write_json(path, out);
    return finish_stage(ctx, Stage::Estimate, upstream, {path});
}

std::vector<FeatureRecord> load_features(const StageContext& ctx) {
    const Json manifest = require_upstream(ctx, Stage::Estimate);
    const fs::path path = ctx.stage_dir(Stage::Estimate) / "features.json";
    const Json j = load_json(path);
    require(j.value("schema", std::string()) == kFeatureSchema, ErrorKind::Io, "not a feature file: " + path.string());
    std::vector<FeatureRecord> out;
    try {
        for (const auto& r : j.at("records")) {
            FeatureRecord rec;
            rec.feature.n = r.at("n").get<int>();
            rec.feature.m = r.at("modes").get<std::size_t>();
            rec.feature.values = r.at("values").get<std::array<double, 3>>();
            rec.feature.std_errors = r.at("std_errors").get<std::array<double, 3>>();
            rec.feature.label = parse_model_kind(r.at("kind").get<std::string>());
            rec.replicate = r.at("replicate").get<int>();
            rec.method = parse_estimate_method(r.at("method").get<std::string>());
            rec.odd_fraction = r.at("odd_fraction").get<double>();
            rec.samples = r.at("samples").get<std::size_t>();
            out.push_back(rec);
        }
    } catch (const Json::exception& e) {
        fail(ErrorKind::Io, "malformed feature file " + path.string() + ": " + e.what());
    }
    return out;
}

namespace {

std::vector<FeatureVector> normalized_features(const std::vector<FeatureRecord>& records, int n, ModelKind kind,
                                               Normalization mode) {
    std::vector<FeatureVector> out;
    for (const auto& r : records) {
        if (r.feature.n != n || r.feature.label != kind) continue;
        try {
            out.push_back(normalize_feature(r.feature, mode));
        } catch (const Error& e) {
            fail(e.kind(), "feature for " + std::string(to_string(kind)) + " n=" + std::to_string(n) + " replicate " +
                               std::to_string(r.replicate) + " has no counts in any orbit (" +
                               std::to_string(r.samples) + " samples); raise 'samples' in the config");
        }
    }
    return out;
}

}  // namespace

StageResult run_kernels(const StageContext& ctx) {
    const ExperimentConfig& c = ctx.config;
    c.validate();
    StageResult result{Stage::Kernels, false, {}};
    const std::vector<FeatureRecord> records = load_features(ctx);
    const Json upstream = upstream_digests(ctx, {Stage::Estimate});
    if (up_to_date(ctx, Stage::Kernels, upstream, result)) return result;
    fs::create_directories(ctx.stage_dir(Stage::Kernels));

    Json sectors = Json::array();
    for (int n : c.sectors) {
        std::map<ModelKind, KernelStats> stats;
        Json kinds = Json::array();
        for (ModelKind kind : c.models) {
            const std::vector<FeatureVector> normalized =
                normalized_features(records, n, kind, c.kernel_normalization);
            stats[kind] = kernel_stats(normalized);
            const auto& s = stats[kind];
            kinds.push_back({{"kind", std::string(to_string(kind))},
                             {"mean", s.mean},
                             {"std", s.std},
                             {"pairs", s.pair_count},
                             {"values", pairwise_kernels(normalized)}});
        }
        Json seps = Json::array();
        for (ModelKind kind : c.models) {
            if (kind == ModelKind::Smsv) continue;
            const SeparationReport rep = kernel_separation(stats[kind], stats[ModelKind::Smsv]);
            seps.push_back({{"kind", std::string(to_string(kind))},
                            {"separation", rep.separation},
                            {"variance_ratio", rep.variance_ratio},
                            {"discriminated", rep.discriminated}});
        }
        sectors.push_back({{"n", n}, {"kinds", kinds}, {"separations_vs_smsv", seps}});
    }
    Json out = artifact_header(ctx, Stage::Kernels, kKernelSchema);
    out["normalization"] = std::string(to_string(c.kernel_normalization));
    out["sectors"] = sectors;
    const fs::path path = ctx.stage_dir(Stage::Kernels) / "kernels.json";
    write_json(path, out);
    return finish_stage(ctx, Stage::Kernels, upstream, {path});
}

StageResult run_classify(const StageContext& ctx) {
    const ExperimentConfig& c = ctx.config;
    c.validate();
    StageResult result{Stage::Classify, false, {}};
    const std::vector<FeatureRecord> records = load_features(ctx);
    const Json upstream = upstream_digests(ctx, {Stage::Estimate});
    if (up_to_date(ctx, Stage::Classify, upstream, result)) return result;
    const fs::path dir = ctx.stage_dir(Stage::Classify);
    fs::create_directories(dir);
    const std::uint64_t seed = ctx.stage_seed(Stage::Classify);
    const auto& k = c.classifier;

    std::vector<FeatureVector> features;
    for (const auto& r : records) features.push_back(r.feature);

    std::vector<double> overall;
    std::map<int, std::vector<double>> per_n;
    EvalResult confusion;
    Json saved_model;
    for (int rep = 0; rep < k.repeats; ++rep) {
        LabeledDataset data = make_labeled_dataset(features);
        stratified_split(data, k.train_fraction, derive_seed(seed, {kSplitTag, u64(rep)}));
        TrainOptions t = k.training;
        t.seed = derive_seed(seed, {kBatchTag, u64(rep)});
        const MlpModel model = mlp_train(mlp_init(k.hidden1, k.hidden2, derive_seed(seed, {kInitTag, u64(rep)})), data, t);
        LabeledDataset test;
        for (const auto& e : data)
            if (e.split == Split::Test) test.push_back(e);
        const EvalResult all = mlp_eval(model, test);
        overall.push_back(all.accuracy);
        confusion.true_positive += all.true_positive;
        confusion.true_negative += all.true_negative;
        confusion.false_positive += all.false_positive;
        confusion.false_negative += all.false_negative;
        for (int n : c.sectors) {
            LabeledDataset sub;
            for (const auto& e : test)
                if (e.features.n == n) sub.push_back(e);
            per_n[n].push_back(mlp_eval(model, sub).accuracy);
        }
        if (rep == 0) saved_model = model_to_json(model);
    }

    Json acc = artifact_header(ctx, Stage::Classify, kAccuracySchema);
    acc["heldout"] = {{"repeats", k.repeats}, {"overall", stats_json(overall)}};
    Json rows = Json::array();
    for (int n : c.sectors) {
        Json row = stats_json(per_n[n]);
        row["n"] = n;
        rows.push_back(row);
    }
    acc["heldout"]["per_n"] = rows;
    acc["heldout"]["confusion"] = {{"true_positive", confusion.true_positive},
                                   {"true_negative", confusion.true_negative},
                                   {"false_positive", confusion.false_positive},
                                   {"false_negative", confusion.false_negative}};
    Json gen = Json::array();
    if (c.generalization.repeats > 0) {
        GeneralizationOptions g;
        g.train_ns = c.generalization.train_ns;
        g.test_ns = c.generalization.test_ns;
        g.repeats = c.generalization.repeats;
        g.hidden1 = k.hidden1;
        g.hidden2 = k.hidden2;
        g.training = k.training;
        g.seed = derive_seed(seed, {kGeneralizeTag});
        for (const auto& row : generalization_protocol(features, g))
            gen.push_back({{"n", row.n},
                           {"mean", row.mean_accuracy},
                           {"std", row.std_accuracy},
                           {"repeats", row.repeats},
                           {"single_repeat", row.single_repeat},
                           {"values", row.accuracies}});
    }
    acc["generalization"] = {{"train_sectors", c.generalization.train_ns}, {"rows", gen}};

    Json model_file = artifact_header(ctx, Stage::Classify, kModelSchema);
    model_file["model"] = saved_model;
    const fs::path model_path = dir / "model.json";
    const fs::path acc_path = dir / "accuracy.json";
    write_json(model_path, model_file);
    write_json(acc_path, acc);
    return finish_stage(ctx, Stage::Classify, upstream, {model_path, acc_path});
}

namespace {

class Table {
public:
    Table(const StageContext& ctx, const std::string& title, std::initializer_list<const char*> columns) {
        out_ << "# " << title << "\n# config_digest " << config_digest(ctx.config) << "\n# master_seed "
             << ctx.config.seed << " report_stage_seed " << ctx.stage_seed(Stage::Report) << "\n";
        bool first = true;
        for (const char* col : columns) {
            out_ << (first ? "" : "\t") << col;
            first = false;
        }
        out_ << "\n";
    }

    template <typename... T>
    void row(const T&... cells) {
        bool first = true;
        ((out_ << (first ? "" : "\t") << cell(cells), first = false), ...);
        out_ << "\n";
    }

    std::string str() const { return out_.str(); }

private:
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(std::string_view v) { return std::string(v); }
    static std::string cell(const char* v) { return v; }
    template <typename I, typename = std::enable_if_t<std::is_integral_v<I>>>
    static std::string cell(I v) {
        return std::to_string(v);
    }

    std::ostringstream out_;
};

}  // namespace

StageResult run_report(const StageContext& ctx) {
    const ExperimentConfig& c = ctx.config;
    c.validate();
    StageResult result{Stage::Report, false, {}};
    const std::vector<FeatureRecord> records = load_features(ctx);
    require_upstream(ctx, Stage::Kernels);
    require_upstream(ctx, Stage::Classify);
    const Json upstream = upstream_digests(ctx, {Stage::Estimate, Stage::Kernels, Stage::Classify});
    if (up_to_date(ctx, Stage::Report, upstream, result)) return result;
    const fs::path dir = ctx.stage_dir(Stage::Report);
    fs::create_directories(dir);
    const Json kernels = load_json(ctx.stage_dir(Stage::Kernels) / "kernels.json");
    const Json acc = load_json(ctx.stage_dir(Stage::Classify) / "accuracy.json");
    std::vector<fs::path> files;
    auto emit = [&](const std::string& name, const Table& t) {
        files.push_back(dir / name);
        write_file_atomic(files.back(), t.str());
    };

    Table clouds(ctx, "orbit probability clouds", {"n", "kind", "replicate", "method", "p_0", "p_1", "p_2", "err_0", "err_1", "err_2"});
    Table odd(ctx, "odd total photon frequency", {"n", "kind", "replicate", "odd_fraction", "samples"});
    for (const auto& r : records) {
        const auto& f = r.feature;
        clouds.row(f.n, to_string(f.label), r.replicate, to_string(r.method), f.values[0], f.values[1], f.values[2],
                   f.std_errors[0], f.std_errors[1], f.std_errors[2]);
        odd.row(f.n, to_string(f.label), r.replicate, r.odd_fraction, r.samples);
    }
    emit("orbit_clouds.tsv", clouds);
    emit("odd_sector.tsv", odd);

    Table accuracy(ctx, "held-out accuracy vs n", {"n", "mean", "std", "repeats"});
    const int repeats = acc.at("heldout").at("repeats").get<int>();
    for (const auto& row : acc.at("heldout").at("per_n"))
        accuracy.row(row.at("n").get<int>(), row.at("mean").get<double>(), row.at("std").get<double>(), repeats);
    const auto& all = acc.at("heldout").at("overall");
    accuracy.row("all", all.at("mean").get<double>(), all.at("std").get<double>(), repeats);
    emit("accuracy_vs_n.tsv", accuracy);

    Table gen(ctx, "generalization accuracy", {"n", "mean", "std", "repeats", "single_repeat"});
    for (const auto& row : acc.at("generalization").at("rows"))
        gen.row(row.at("n").get<int>(), row.at("mean").get<double>(), row.at("std").get<double>(),
                row.at("repeats").get<int>(), row.at("single_repeat").get<bool>() ? "yes" : "no");
    emit("generalization.tsv", gen);

    Table summary(ctx, "kernel statistics", {"n", "kind", "mean", "std", "pairs", "separation_vs_smsv", "variance_ratio_vs_smsv", "discriminated"});
    Table hist(ctx, "kernel histograms", {"n", "kind", "bin_low", "bin_high", "count"});
    for (const auto& sector : kernels.at("sectors")) {
        const int n = sector.at("n").get<int>();
        std::map<std::string, Json> seps;
        for (const auto& s : sector.at("separations_vs_smsv")) seps[s.at("kind").get<std::string>()] = s;
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& k : sector.at("kinds"))
            for (double v : k.at("values").get<std::vector<double>>()) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        const double width = hi > lo ? (hi - lo) / kHistogramBins : 1.0;
        for (const auto& k : sector.at("kinds")) {
            const std::string kind = k.at("kind").get<std::string>();
            if (seps.count(kind)) {
                const Json& s = seps[kind];
                summary.row(n, kind, k.at("mean").get<double>(), k.at("std").get<double>(), k.at("pairs").get<std::uint64_t>(),
                            s.at("separation").get<double>(), s.at("variance_ratio").get<double>(),
                            s.at("discriminated").get<bool>() ? "yes" : "no");
            } else {
                summary.row(n, kind, k.at("mean").get<double>(), k.at("std").get<double>(), k.at("pairs").get<std::uint64_t>(),
                            "-", "-", "-");
            }
            std::vector<std::uint64_t> counts(kHistogramBins, 0);
            for (double v : k.at("values").get<std::vector<double>>()) {
                const int b = std::clamp(static_cast<int>((v - lo) / width), 0, kHistogramBins - 1);
                ++counts[static_cast<std::size_t>(b)];
            }
            for (int b = 0; b < kHistogramBins; ++b)
                hist.row(n, kind, lo + b * width, lo + (b + 1) * width, counts[static_cast<std::size_t>(b)]);
        }
    }
    emit("kernel_summary.tsv", summary);
    emit("kernel_histograms.tsv", hist);
    return finish_stage(ctx, Stage::Report, upstream, files);
}

StageResult run_stage(Stage stage, const StageContext& ctx) {
    switch (stage) {
        case Stage::Generate: return run_generate(ctx);
        case Stage::Sample: return run_sample(ctx);
        case Stage::Estimate: return run_estimate(ctx);
        case Stage::Kernels: return run_kernels(ctx);
        case Stage::Classify: return run_classify(ctx);
        case Stage::Report: return run_report(ctx);
    }
    fail(ErrorKind::Parameter, "unknown stage");
}

std::vector<StageResult> run_pipeline(const StageContext& ctx) {
    std::vector<StageResult> results;
    for (Stage s : kAllStages) results.push_back(run_stage(s, ctx));
    return results;
}

}  // namespace gbscert
