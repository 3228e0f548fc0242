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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gbscert/features.hpp"
#include "gbscert/io.hpp"

namespace gbscert {

/// Trainable parameters. Layout: linear(3 -> h1), batch norm(h1), ReLU,
/// linear(h1 -> h2), ReLU, linear(h2 -> 1), sigmoid.
struct MlpParams {
    Eigen::MatrixXd w1, w2, w3;
    Eigen::VectorXd b1, b2, b3;
    Eigen::VectorXd gamma, beta;

    std::size_t size() const;
    /// Order: w1, b1, gamma, beta, w2, b2, w3, b3 (matrices column-major).
    Eigen::VectorXd flatten() const;
    void assign(const Eigen::VectorXd& flat);
};

struct TrainOptions {
    int epochs = 20;
    double learning_rate = 1e-2;
    double momentum = 0.9;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

struct MlpModel {
    static constexpr int kInputs = 3;
    static constexpr double kBatchNormEps = 1e-5;
    static constexpr double kBatchNormMomentum = 0.1;

    int hidden1 = 32;
    int hidden2 = 16;
    MlpParams params;
    Eigen::VectorXd running_mean;
    Eigen::VectorXd running_var;

    std::uint64_t init_seed = 0;
    TrainOptions training;
    int epochs_trained = 0;
    std::vector<double> loss_history;

    std::size_t parameter_count() const { return params.size(); }
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases; batch norm
/// starts as the identity with running statistics (0, 1).
MlpModel mlp_init(int hidden1, int hidden2, std::uint64_t seed);

enum class BatchNormMode { Batch, Frozen };

/// Genuine-class probabilities, one per row of `x` (n x 3); batch norm uses
/// running statistics.
Eigen::VectorXd mlp_predict(const MlpModel& model, const Eigen::MatrixXd& x);

/// Mean binary cross entropy and its gradient with respect to every parameter
/// (same layout as MlpParams). Batch mode normalizes with the batch
/// statistics; frozen mode with the running ones.
double mlp_loss_and_gradient(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             BatchNormMode mode, MlpParams* gradient);

enum class Split { Train, Test };

struct LabeledExample {
    FeatureVector features;
    /// 1 for genuine GBS, 0 for a mock-up.
    int label = 0;
    Split split = Split::Train;
};

using LabeledDataset = std::vector<LabeledExample>;

/// Labels features as genuine (Smsv) or mock-up, all tagged train.
LabeledDataset make_labeled_dataset(std::span<const FeatureVector> features);

/// Stratified by (model kind, n): within each stratum a seeded shuffle sends
/// round(train_fraction * size) examples to train and the rest to test.
void stratified_split(LabeledDataset& data, double train_fraction, std::uint64_t seed);

Eigen::MatrixXd design_matrix(std::span<const LabeledExample> examples);
Eigen::VectorXd label_vector(std::span<const LabeledExample> examples);

/// SGD with momentum on the train split. Batches are drawn from a seeded
/// reshuffle every epoch; a trailing batch of one example is skipped since
/// batch statistics are undefined for it.
MlpModel mlp_train(MlpModel model, const LabeledDataset& data, const TrainOptions& options);
MlpModel mlp_train(MlpModel model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TrainOptions& options);

struct EvalResult {
    double accuracy = 0.0;
    std::size_t true_positive = 0;
    std::size_t true_negative = 0;
    std::size_t false_positive = 0;
    std::size_t false_negative = 0;
    std::size_t total() const { return true_positive + true_negative + false_positive + false_negative; }
};

/// Accuracy at threshold 0.5 (p >= 0.5 is genuine).
EvalResult mlp_eval(const MlpModel& model, std::span<const LabeledExample> examples);
EvalResult mlp_eval(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

struct GeneralizationRow {
    int n = 0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    int repeats = 0;
    /// Set when repeats == 1 and the spread is reported as 0.
    bool single_repeat = false;
    std::vector<double> accuracies;
};

struct GeneralizationOptions {
    std::vector<int> train_ns;
    std::vector<int> test_ns;
    int repeats = 10;
    int hidden1 = 32;
    int hidden2 = 16;
    TrainOptions training;
    std::uint64_t seed = 0;
};

/// Trains on every feature with n in train_ns and scores each n in test_ns;
/// every repeat reseeds both initialization and batch order.
std::vector<GeneralizationRow> generalization_protocol(std::span<const FeatureVector> features,
                                                       const GeneralizationOptions& options);

struct GradcheckResult {
    double max_relative_error = 0.0;
    std::size_t parameters_checked = 0;
    /// Rows dropped because a ReLU pre-activation sat within the margin of 0.
    std::size_t rows_excluded = 0;
};

/// Analytic gradient vs central differences (step 1e-5) for every parameter;
/// relative error |a - f| / max(|a|, |f|, 1e-6).
GradcheckResult finite_diff_gradcheck(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      BatchNormMode mode = BatchNormMode::Frozen, double step = 1e-5,
                                      double relu_margin = 1e-4);

inline constexpr const char* kModelSchema = "gbscert.mlp/1";

Json model_to_json(const MlpModel& model);
MlpModel mlp_from_json(const Json& j);

}  // namespace gbscert
