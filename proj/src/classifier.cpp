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

#include "gbscert/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "gbscert/error.hpp"
#include "gbscert/rng.hpp"

namespace gbscert {

namespace {

constexpr std::uint64_t kInitTag = 0x696e6974;
constexpr std::uint64_t kBatchTag = 0x6261746368;
constexpr std::uint64_t kSplitTag = 0x73706c6974;
constexpr std::uint64_t kRepeatTag = 0x726570;

template <typename F>
void for_each_block(MlpParams& p, F&& f) {
    f(p.w1.data(), p.w1.size());
    f(p.b1.data(), p.b1.size());
    f(p.gamma.data(), p.gamma.size());
    f(p.beta.data(), p.beta.size());
    f(p.w2.data(), p.w2.size());
    f(p.b2.data(), p.b2.size());
    f(p.w3.data(), p.w3.size());
    f(p.b3.data(), p.b3.size());
}

MlpParams zeros_like(const MlpParams& p) {
    MlpParams z;
    z.w1 = Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols());
    z.w2 = Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols());
    z.w3 = Eigen::MatrixXd::Zero(p.w3.rows(), p.w3.cols());
    z.b1 = Eigen::VectorXd::Zero(p.b1.size());
    z.b2 = Eigen::VectorXd::Zero(p.b2.size());
    z.b3 = Eigen::VectorXd::Zero(p.b3.size());
    z.gamma = Eigen::VectorXd::Zero(p.gamma.size());
    z.beta = Eigen::VectorXd::Zero(p.beta.size());
    return z;
}

void fill_uniform(Eigen::Ref<Eigen::MatrixXd> m, double bound, Rng& rng) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = bound * (2.0 * rng.uniform() - 1.0);
}

void check_input(const MlpModel& model, const Eigen::MatrixXd& x) {
    require(x.cols() == MlpModel::kInputs, ErrorKind::InvalidDimension, "classifier input must have 3 columns");
    require(model.params.w1.rows() == model.hidden1 && model.params.w1.cols() == MlpModel::kInputs,
            ErrorKind::InvalidDimension, "classifier weights do not match the declared layer sizes");
}

// Intermediate values of one forward pass.
struct Forward {
    Eigen::MatrixXd z1, xhat, y1, a1, z2, a2;
    Eigen::VectorXd inv_std;
    Eigen::VectorXd logits;
};

Forward forward(const MlpModel& model, const Eigen::MatrixXd& x, BatchNormMode mode,
                Eigen::VectorXd* batch_mean = nullptr, Eigen::VectorXd* batch_var = nullptr) {
    const MlpParams& p = model.params;
    Forward f;
    f.z1 = (x * p.w1.transpose()).rowwise() + p.b1.transpose();
    Eigen::VectorXd mean, var;
    if (mode == BatchNormMode::Batch) {
        require(x.rows() >= 2, ErrorKind::Parameter, "batch statistics need at least two rows");
        mean = f.z1.colwise().mean().transpose();
        var = (f.z1.rowwise() - mean.transpose()).array().square().colwise().mean().transpose();
    } else {
        mean = model.running_mean;
        var = model.running_var;
    }
    f.inv_std = (var.array() + MlpModel::kBatchNormEps).rsqrt().matrix();
    f.xhat = ((f.z1.rowwise() - mean.transpose()).array().rowwise() * f.inv_std.transpose().array()).matrix();
    f.y1 = ((f.xhat.array().rowwise() * p.gamma.transpose().array()).rowwise() + p.beta.transpose().array()).matrix();
    f.a1 = f.y1.cwiseMax(0.0);
    f.z2 = (f.a1 * p.w2.transpose()).rowwise() + p.b2.transpose();
    f.a2 = f.z2.cwiseMax(0.0);
    f.logits = ((f.a2 * p.w3.transpose()).rowwise() + p.b3.transpose()).col(0);
    if (batch_mean) *batch_mean = mean;
    if (batch_var) *batch_var = var;
    return f;
}

double sigmoid(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double bce(const Eigen::VectorXd& logits, const Eigen::VectorXd& y) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) total += softplus(logits[i]) - y[i] * logits[i];
    return total / static_cast<double>(logits.size());
}

Eigen::MatrixXd relu_mask(const Eigen::MatrixXd& pre) { return (pre.array() > 0.0).cast<double>().matrix(); }

double stdev(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double acc = 0.0;
    for (double a : v) acc += (a - mean) * (a - mean);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
    return out;
}

Eigen::VectorXd entries_of(const Eigen::VectorXd& y, const std::vector<Eigen::Index>& idx) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = y[idx[i]];
    return out;
}

Json vec_json(const Eigen::VectorXd& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vec_from(const Json& j) {
    auto v = j.get<std::vector<double>>();
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json mat_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Eigen::VectorXd row = m.row(r).transpose();
        rows.push_back(vec_json(row));
    }
    return rows;
}

Eigen::MatrixXd mat_from(const Json& j, Eigen::Index cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        Eigen::VectorXd row = vec_from(j[r]);
        require(row.size() == cols, ErrorKind::Io, "classifier file has a ragged weight matrix");
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

}  // namespace

std::size_t MlpParams::size() const {
    return static_cast<std::size_t>(w1.size() + b1.size() + gamma.size() + beta.size() + w2.size() + b2.size() +
                                    w3.size() + b3.size());
}

Eigen::VectorXd MlpParams::flatten() const {
    Eigen::VectorXd flat(static_cast<Eigen::Index>(size()));
    Eigen::Index at = 0;
    for_each_block(const_cast<MlpParams&>(*this), [&](double* data, Eigen::Index n) {
        flat.segment(at, n) = Eigen::Map<const Eigen::VectorXd>(data, n);
        at += n;
    });
    return flat;
}

void MlpParams::assign(const Eigen::VectorXd& flat) {
    require(flat.size() == static_cast<Eigen::Index>(size()), ErrorKind::InvalidDimension,
            "flattened parameter vector has the wrong length");
    Eigen::Index at = 0;
    for_each_block(*this, [&](double* data, Eigen::Index n) {
        Eigen::Map<Eigen::VectorXd>(data, n) = flat.segment(at, n);
        at += n;
    });
}

MlpModel mlp_init(int hidden1, int hidden2, std::uint64_t seed) {
    require(hidden1 >= 1 && hidden2 >= 1, ErrorKind::Parameter, "hidden layer widths must be positive");
    MlpModel model;
    model.hidden1 = hidden1;
    model.hidden2 = hidden2;
    model.init_seed = seed;
    Rng rng = Rng::stream(seed, kInitTag);
    MlpParams& p = model.params;
    auto layer = [&](Eigen::MatrixXd& w, Eigen::VectorXd& b, int out, int in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        w.resize(out, in);
        b.resize(out);
        fill_uniform(w, bound, rng);
        fill_uniform(b, bound, rng);
    };
    layer(p.w1, p.b1, hidden1, MlpModel::kInputs);
    layer(p.w2, p.b2, hidden2, hidden1);
    layer(p.w3, p.b3, 1, hidden2);
    p.gamma = Eigen::VectorXd::Ones(hidden1);
    p.beta = Eigen::VectorXd::Zero(hidden1);
    model.running_mean = Eigen::VectorXd::Zero(hidden1);
    model.running_var = Eigen::VectorXd::Ones(hidden1);
    return model;
}

Eigen::VectorXd mlp_predict(const MlpModel& model, const Eigen::MatrixXd& x) {
    check_input(model, x);
    Forward f = forward(model, x, BatchNormMode::Frozen);
    return f.logits.unaryExpr([](double z) { return sigmoid(z); });
}

double mlp_loss_and_gradient(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             BatchNormMode mode, MlpParams* gradient) {
    check_input(model, x);
    require(y.size() == x.rows() && x.rows() > 0, ErrorKind::InvalidDimension, "labels must match input rows");
    const MlpParams& p = model.params;
    Forward f = forward(model, x, mode);
    const double loss = bce(f.logits, y);
    if (!gradient) return loss;

    const double rows = static_cast<double>(x.rows());
    MlpParams& g = *gradient;
    Eigen::VectorXd dz3 = (f.logits.unaryExpr([](double z) { return sigmoid(z); }) - y) / rows;
    g.w3 = dz3.transpose() * f.a2;
    g.b3 = Eigen::VectorXd::Constant(1, dz3.sum());
    Eigen::MatrixXd dz2 = (dz3 * p.w3).cwiseProduct(relu_mask(f.z2));
    g.w2 = dz2.transpose() * f.a1;
    g.b2 = dz2.colwise().sum().transpose();
    Eigen::MatrixXd dy1 = (dz2 * p.w2).cwiseProduct(relu_mask(f.y1));
    g.gamma = dy1.cwiseProduct(f.xhat).colwise().sum().transpose();
    g.beta = dy1.colwise().sum().transpose();
    Eigen::MatrixXd dxhat = (dy1.array().rowwise() * p.gamma.transpose().array()).matrix();
    Eigen::MatrixXd dz1;
    if (mode == BatchNormMode::Batch) {
        Eigen::RowVectorXd sum_d = dxhat.colwise().sum();
        Eigen::RowVectorXd sum_dx = dxhat.cwiseProduct(f.xhat).colwise().sum();
        Eigen::MatrixXd inner = (rows * dxhat).rowwise() - sum_d;
        inner -= (f.xhat.array().rowwise() * sum_dx.array()).matrix();
        dz1 = ((inner.array().rowwise() * f.inv_std.transpose().array()) / rows).matrix();
    } else {
        dz1 = (dxhat.array().rowwise() * f.inv_std.transpose().array()).matrix();
    }
    g.w1 = dz1.transpose() * x;
    g.b1 = dz1.colwise().sum().transpose();
    return loss;
}

LabeledDataset make_labeled_dataset(std::span<const FeatureVector> features) {
    LabeledDataset data;
    data.reserve(features.size());
    for (const auto& f : features) data.push_back({f, f.label == ModelKind::Smsv ? 1 : 0, Split::Train});
    return data;
}

void stratified_split(LabeledDataset& data, double train_fraction, std::uint64_t seed) {
    require(train_fraction > 0.0 && train_fraction <= 1.0, ErrorKind::Parameter,
            "train fraction must lie in (0, 1]");
    std::map<std::pair<int, int>, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < data.size(); ++i)
        strata[{static_cast<int>(data[i].features.label), data[i].features.n}].push_back(i);
    for (auto& [key, members] : strata) {
        Rng rng = Rng::stream(seed, kSplitTag,
                              static_cast<std::uint64_t>(key.first) * 1000003u + static_cast<std::uint64_t>(key.second));
        rng.shuffle(std::span<std::size_t>(members));
        const auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(members.size())));
        for (std::size_t k = 0; k < members.size(); ++k) data[members[k]].split = k < n_train ? Split::Train : Split::Test;
    }
}

Eigen::MatrixXd design_matrix(std::span<const LabeledExample> examples) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(examples.size()), MlpModel::kInputs);
    for (std::size_t i = 0; i < examples.size(); ++i)
        for (int c = 0; c < MlpModel::kInputs; ++c) x(static_cast<Eigen::Index>(i), c) = examples[i].features.values[c];
    return x;
}

Eigen::VectorXd label_vector(std::span<const LabeledExample> examples) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(examples.size()));
    for (std::size_t i = 0; i < examples.size(); ++i) y[static_cast<Eigen::Index>(i)] = examples[i].label;
    return y;
}

MlpModel mlp_train(MlpModel model, const LabeledDataset& data, const TrainOptions& options) {
    LabeledDataset train;
    std::copy_if(data.begin(), data.end(), std::back_inserter(train),
                 [](const LabeledExample& e) { return e.split == Split::Train; });
    return mlp_train(std::move(model), design_matrix(train), label_vector(train), options);
}

MlpModel mlp_train(MlpModel model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TrainOptions& options) {
    check_input(model, x);
    require(y.size() == x.rows(), ErrorKind::InvalidDimension, "labels must match input rows");
    require(options.epochs >= 0, ErrorKind::Parameter, "epochs must be non-negative");
    require(options.batch_size >= 2, ErrorKind::Parameter, "batch size must be at least 2");
    require(options.learning_rate > 0.0 && options.momentum >= 0.0 && options.momentum < 1.0, ErrorKind::Parameter,
            "learning rate must be positive and momentum in [0, 1)");
    const Eigen::Index positives = (y.array() >= 0.5).count();
    require(positives > 0 && positives < y.size(), ErrorKind::DegenerateDataset,
            "training data must contain both genuine and mock-up examples");
    model.training = options;
    if (options.epochs == 0) return model;

    Eigen::VectorXd velocity = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.parameter_count()));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    MlpParams grad = zeros_like(model.params);
    const double keep = 1.0 - MlpModel::kBatchNormMomentum;

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        Rng rng = Rng::stream(options.seed, kBatchTag, static_cast<std::uint64_t>(model.epochs_trained));
        rng.shuffle(std::span<Eigen::Index>(order));
        double loss_sum = 0.0;
        std::size_t loss_rows = 0;
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t stop = std::min(order.size(), start + options.batch_size);
            if (stop - start < 2) continue;
            std::vector<Eigen::Index> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                          order.begin() + static_cast<std::ptrdiff_t>(stop));
            Eigen::MatrixXd xb = rows_of(x, idx);
            Eigen::VectorXd yb = entries_of(y, idx);

            Eigen::VectorXd mean, var;
            forward(model, xb, BatchNormMode::Batch, &mean, &var);
            const double loss = mlp_loss_and_gradient(model, xb, yb, BatchNormMode::Batch, &grad);
            loss_sum += loss * static_cast<double>(idx.size());
            loss_rows += idx.size();

            velocity = options.momentum * velocity + grad.flatten();
            model.params.assign(model.params.flatten() - options.learning_rate * velocity);

            const double unbias = static_cast<double>(idx.size()) / static_cast<double>(idx.size() - 1);
            model.running_mean = keep * model.running_mean + MlpModel::kBatchNormMomentum * mean;
            model.running_var = keep * model.running_var + MlpModel::kBatchNormMomentum * unbias * var;
        }
        model.loss_history.push_back(loss_rows ? loss_sum / static_cast<double>(loss_rows) : 0.0);
        ++model.epochs_trained;
    }
    return model;
}

EvalResult mlp_eval(const MlpModel& model, std::span<const LabeledExample> examples) {
    return mlp_eval(model, design_matrix(examples), label_vector(examples));
}

EvalResult mlp_eval(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    require(y.size() == x.rows(), ErrorKind::InvalidDimension, "labels must match input rows");
    EvalResult r;
    if (x.rows() == 0) return r;
    Eigen::VectorXd p = mlp_predict(model, x);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const bool genuine = p[i] >= 0.5;
        const bool truth = y[i] >= 0.5;
        if (genuine && truth) ++r.true_positive;
        else if (!genuine && !truth) ++r.true_negative;
        else if (genuine) ++r.false_positive;
        else ++r.false_negative;
    }
    r.accuracy = static_cast<double>(r.true_positive + r.true_negative) / static_cast<double>(p.size());
    return r;
}

std::vector<GeneralizationRow> generalization_protocol(std::span<const FeatureVector> features,
                                                       const GeneralizationOptions& options) {
    require(!options.train_ns.empty() && !options.test_ns.empty(), ErrorKind::Protocol,
            "train and test sectors must both be non-empty");
    require(options.repeats >= 1, ErrorKind::Protocol, "repeats must be at least 1");
    for (int n : options.test_ns)
        require(std::find(options.train_ns.begin(), options.train_ns.end(), n) == options.train_ns.end(),
                ErrorKind::Protocol, "sector " + std::to_string(n) + " is in both the train and test sets");

    auto in = [](const std::vector<int>& ns, int n) { return std::find(ns.begin(), ns.end(), n) != ns.end(); };
    LabeledDataset all = make_labeled_dataset(features);
    LabeledDataset train;
    std::map<int, LabeledDataset> tests;
    for (const auto& e : all) {
        if (in(options.train_ns, e.features.n)) train.push_back(e);
        if (in(options.test_ns, e.features.n)) tests[e.features.n].push_back(e);
    }
    require(train.size() >= 2, ErrorKind::Protocol, "too few training examples in the train sectors");
    for (int n : options.test_ns)
        require(!tests[n].empty(), ErrorKind::Protocol, "no examples for test sector " + std::to_string(n));

    const Eigen::MatrixXd x = design_matrix(train);
    const Eigen::VectorXd y = label_vector(train);
    std::vector<GeneralizationRow> rows;
    for (int n : options.test_ns) {
        GeneralizationRow row;
        row.n = n;
        row.repeats = options.repeats;
        rows.push_back(row);
    }

    for (int r = 0; r < options.repeats; ++r) {
        const std::uint64_t seed = derive_seed(options.seed, {kRepeatTag, static_cast<std::uint64_t>(r)});
        TrainOptions t = options.training;
        t.seed = seed;
        MlpModel model = mlp_train(mlp_init(options.hidden1, options.hidden2, seed), x, y, t);
        for (auto& row : rows) row.accuracies.push_back(mlp_eval(model, tests[row.n]).accuracy);
    }
    for (auto& row : rows) {
        row.mean_accuracy = std::accumulate(row.accuracies.begin(), row.accuracies.end(), 0.0) /
                            static_cast<double>(row.accuracies.size());
        row.std_accuracy = stdev(row.accuracies, row.mean_accuracy);
        row.single_repeat = options.repeats == 1;
    }
    return rows;
}

GradcheckResult finite_diff_gradcheck(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      BatchNormMode mode, double step, double relu_margin) {
    check_input(model, x);
    require(step > 0.0, ErrorKind::Parameter, "finite difference step must be positive");
    GradcheckResult result;

    // Rows within relu_margin of a ReLU kink are excluded.
    Forward f = forward(model, x, mode);
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const bool near = (f.y1.row(i).array().abs() < relu_margin).any() ||
                          (f.z2.row(i).array().abs() < relu_margin).any();
        if (near) ++result.rows_excluded;
        else kept.push_back(i);
    }
    // Batch statistics couple every row, so a kink anywhere invalidates the batch.
    if (mode == BatchNormMode::Batch && result.rows_excluded > 0) kept.clear();
    if (kept.size() < (mode == BatchNormMode::Batch ? 2u : 1u)) {
        result.rows_excluded = static_cast<std::size_t>(x.rows());
        return result;
    }
    const Eigen::MatrixXd xs = rows_of(x, kept);
    const Eigen::VectorXd ys = entries_of(y, kept);

    MlpParams grad = zeros_like(model.params);
    mlp_loss_and_gradient(model, xs, ys, mode, &grad);
    const Eigen::VectorXd analytic = grad.flatten();
    const Eigen::VectorXd base = model.params.flatten();
    MlpModel probe = model;
    for (Eigen::Index k = 0; k < base.size(); ++k) {
        Eigen::VectorXd shifted = base;
        shifted[k] = base[k] + step;
        probe.params.assign(shifted);
        const double up = mlp_loss_and_gradient(probe, xs, ys, mode, nullptr);
        shifted[k] = base[k] - step;
        probe.params.assign(shifted);
        const double down = mlp_loss_and_gradient(probe, xs, ys, mode, nullptr);
        const double numeric = (up - down) / (2.0 * step);
        const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-6});
        result.max_relative_error = std::max(result.max_relative_error, std::abs(analytic[k] - numeric) / denom);
        ++result.parameters_checked;
    }
    return result;
}

Json model_to_json(const MlpModel& model) {
    const MlpParams& p = model.params;
    Json j;
    j["schema"] = kModelSchema;
    j["inputs"] = MlpModel::kInputs;
    j["hidden1"] = model.hidden1;
    j["hidden2"] = model.hidden2;
    j["init_seed"] = model.init_seed;
    j["training"] = {{"epochs", model.training.epochs},
                     {"learning_rate", model.training.learning_rate},
                     {"momentum", model.training.momentum},
                     {"batch_size", model.training.batch_size},
                     {"seed", model.training.seed}};
    j["epochs_trained"] = model.epochs_trained;
    j["loss_history"] = model.loss_history;
    j["w1"] = mat_json(p.w1);
    j["b1"] = vec_json(p.b1);
    j["gamma"] = vec_json(p.gamma);
    j["beta"] = vec_json(p.beta);
    j["running_mean"] = vec_json(model.running_mean);
    j["running_var"] = vec_json(model.running_var);
    j["w2"] = mat_json(p.w2);
    j["b2"] = vec_json(p.b2);
    j["w3"] = mat_json(p.w3);
    j["b3"] = vec_json(p.b3);
    return j;
}

MlpModel mlp_from_json(const Json& j) {
    try {
        require(j.at("schema").get<std::string>() == kModelSchema, ErrorKind::Io, "unsupported classifier schema");
        MlpModel m;
        m.hidden1 = j.at("hidden1").get<int>();
        m.hidden2 = j.at("hidden2").get<int>();
        m.init_seed = j.at("init_seed").get<std::uint64_t>();
        const Json& t = j.at("training");
        m.training = {t.at("epochs").get<int>(), t.at("learning_rate").get<double>(), t.at("momentum").get<double>(),
                      t.at("batch_size").get<std::size_t>(), t.at("seed").get<std::uint64_t>()};
        m.epochs_trained = j.at("epochs_trained").get<int>();
        m.loss_history = j.at("loss_history").get<std::vector<double>>();
        MlpParams& p = m.params;
        p.w1 = mat_from(j.at("w1"), MlpModel::kInputs);
        p.b1 = vec_from(j.at("b1"));
        p.gamma = vec_from(j.at("gamma"));
        p.beta = vec_from(j.at("beta"));
        m.running_mean = vec_from(j.at("running_mean"));
        m.running_var = vec_from(j.at("running_var"));
        p.w2 = mat_from(j.at("w2"), m.hidden1);
        p.b2 = vec_from(j.at("b2"));
        p.w3 = mat_from(j.at("w3"), m.hidden2);
        p.b3 = vec_from(j.at("b3"));
        const auto h1 = static_cast<Eigen::Index>(m.hidden1);
        const auto h2 = static_cast<Eigen::Index>(m.hidden2);
        require(p.w1.rows() == h1 && p.b1.size() == h1 && p.gamma.size() == h1 && p.beta.size() == h1 &&
                    m.running_mean.size() == h1 && m.running_var.size() == h1 && p.w2.rows() == h2 &&
                    p.b2.size() == h2 && p.w3.rows() == 1 && p.b3.size() == 1,
                ErrorKind::Io, "classifier file has inconsistent layer sizes");
        return m;
    } catch (const Json::exception& e) {
        fail(ErrorKind::Io, std::string("malformed classifier file: ") + e.what());
    }
}

}  // namespace gbscert
