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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "gbscert/classifier.hpp"
#include "gbscert/features.hpp"
#include "gbscert/gaussian.hpp"
#include "gbscert/io.hpp"

namespace gbscert {

struct SqueezingSpec {
    enum class Mode { SectorMean, Explicit };
    /// SectorMean: sinh^2 s_i = n w_i / sum(w), w_i ~ U(weight_low, weight_high),
    /// so the mean photon number equals the sector n. Explicit: fixed values
    /// (one value broadcast to every mode, or one per mode).
    Mode mode = Mode::SectorMean;
    double weight_low = 0.5;
    double weight_high = 1.5;
    std::vector<double> values;
};

struct ClassifierConfig {
    int hidden1 = 32;
    int hidden2 = 16;
    TrainOptions training{.epochs = 200};
    double train_fraction = 0.8;
    /// Independent split + training runs behind the held-out accuracy table.
    int repeats = 10;
};

struct GeneralizationConfig {
    std::vector<int> train_ns{4, 6};
    std::vector<int> test_ns{8};
    /// 0 disables the protocol.
    int repeats = 10;
};

struct ExperimentConfig {
    enum class ModeRule { Square, Fixed };
    ModeRule mode_rule = ModeRule::Square;
    std::size_t fixed_modes = 0;
    std::vector<int> sectors{4, 6, 8};
    int circuits_per_class = 20;
    std::vector<ModelKind> models{std::begin(kAllModelKinds), std::end(kAllModelKinds)};
    SqueezingSpec squeezing;
    std::size_t samples = 10000;
    std::size_t mc_draws = 2000;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "gbscert-out";
    Normalization kernel_normalization = Normalization::UnitSum;
    ClassifierConfig classifier;
    GeneralizationConfig generalization;

    std::size_t modes_for(int n) const;
    /// Throws Parameter on any inconsistent field.
    void validate() const;
};

inline constexpr const char* kConfigSchema = "gbscert.config/1";

Json config_to_json(const ExperimentConfig& config);
/// Missing keys take their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// SHA-256 of the canonical config, output directory excluded.
std::string config_digest(const ExperimentConfig& config);

enum class Stage { Generate, Sample, Estimate, Kernels, Classify, Report };
inline constexpr Stage kAllStages[] = {Stage::Generate, Stage::Sample,   Stage::Estimate,
                                       Stage::Kernels,  Stage::Classify, Stage::Report};
std::string_view to_string(Stage stage);
Stage parse_stage(std::string_view name);

struct StageContext {
    ExperimentConfig config;
    std::int64_t stage_seed_offset = 0;

    std::filesystem::path stage_dir(Stage stage) const;
    std::uint64_t stage_seed(Stage stage) const;
    /// {master_seed, stage, stage_seed_offset, stage_seed}
    Json lineage(Stage stage) const;
};

struct StageResult {
    Stage stage = Stage::Generate;
    /// Outputs were present with a matching digest and lineage.
    bool skipped = false;
    std::vector<std::filesystem::path> outputs;
};

/// Circuit and parameter bundles for every (class, n, replicate); classes of a
/// common (n, replicate) share one Haar unitary and one squeezing draw.
StageResult run_generate(const StageContext& ctx);
/// Sample files for every non-SMSV bundle.
StageResult run_sample(const StageContext& ctx);
/// Feature vectors: Monte Carlo estimates for SMSV, sample frequencies otherwise.
StageResult run_estimate(const StageContext& ctx);
StageResult run_kernels(const StageContext& ctx);
StageResult run_classify(const StageContext& ctx);
/// Tab-separated plot-data series.
StageResult run_report(const StageContext& ctx);

StageResult run_stage(Stage stage, const StageContext& ctx);
std::vector<StageResult> run_pipeline(const StageContext& ctx);

/// Feature records written by the estimate stage.
struct FeatureRecord {
    FeatureVector feature;
    int replicate = 0;
    EstimateMethod method = EstimateMethod::Empirical;
    /// Fraction of samples with an odd total; exactly 0 from the SMSV law's parity.
    double odd_fraction = 0.0;
    std::size_t samples = 0;
};

std::vector<FeatureRecord> load_features(const StageContext& ctx);

}  // namespace gbscert
