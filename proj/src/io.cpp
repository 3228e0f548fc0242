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

#include "gbscert/io.hpp"

#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "gbscert/error.hpp"
#include "gbscert/rng.hpp"

namespace gbscert {

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    require(EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) == 1,
            ErrorKind::Io, "sha256: digest computation failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

Json matrix_to_json(const ComplexMatrix& m) {
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json rr = Json::array();
        Json ri = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rr.push_back(m(i, j).real());
            ri.push_back(m(i, j).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
    try {
        const auto rows = j.at("rows").get<Eigen::Index>();
        const auto cols = j.at("cols").get<Eigen::Index>();
        ComplexMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index k = 0; k < cols; ++k)
                m(i, k) = Complex(j.at("re").at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>(),
                                  j.at("im").at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>());
        return m;
    } catch (const Json::exception& e) {
        fail(ErrorKind::Io, std::string("matrix_from_json: ") + e.what());
    }
}

Json model_to_json(const GaussianModel& model) {
    Json j{{"kind", to_string(model.kind())}, {"modes", model.modes()}};
    switch (model.kind()) {
        case ModelKind::Smsv:
        case ModelKind::DistinguishableSmsv: j["squeezing"] = model.squeezing().values(); break;
        case ModelKind::Thermal:
        case ModelKind::DistinguishableThermal: j["mean_photons"] = model.mean_photons(); break;
        case ModelKind::Coherent: {
            Json re = Json::array();
            Json im = Json::array();
            for (const Complex& a : model.amplitudes()) {
                re.push_back(a.real());
                im.push_back(a.imag());
            }
            j["amplitudes"] = Json{{"re", std::move(re)}, {"im", std::move(im)}};
            break;
        }
    }
    j["circuit"] = matrix_to_json(model.circuit().matrix());
    return j;
}

GaussianModel model_from_json(const Json& j) {
    try {
        const ModelKind kind = parse_model_kind(j.at("kind").get<std::string>());
        UnitaryMatrix u = UnitaryMatrix::from_matrix(matrix_from_json(j.at("circuit")));
        switch (kind) {
            case ModelKind::Smsv:
                return GaussianModel::smsv(std::move(u), SqueezingParams(j.at("squeezing").get<std::vector<double>>()));
            case ModelKind::DistinguishableSmsv:
                return GaussianModel::distinguishable_smsv(
                    std::move(u), SqueezingParams(j.at("squeezing").get<std::vector<double>>()));
            case ModelKind::Thermal:
                return GaussianModel::thermal(std::move(u), j.at("mean_photons").get<std::vector<double>>());
            case ModelKind::DistinguishableThermal:
                return GaussianModel::distinguishable_thermal(std::move(u), j.at("mean_photons").get<std::vector<double>>());
            case ModelKind::Coherent: {
                const auto re = j.at("amplitudes").at("re").get<std::vector<double>>();
                const auto im = j.at("amplitudes").at("im").get<std::vector<double>>();
                require(re.size() == im.size(), ErrorKind::Parameter, "model_from_json: amplitude length mismatch");
                std::vector<Complex> a(re.size());
                for (std::size_t i = 0; i < a.size(); ++i) a[i] = Complex(re[i], im[i]);
                return GaussianModel::coherent(std::move(u), std::move(a));
            }
        }
        fail(ErrorKind::Parameter, "model_from_json: unknown kind");
    } catch (const Json::exception& e) {
        fail(ErrorKind::Io, std::string("model_from_json: ") + e.what());
    }
}

std::string model_digest(const GaussianModel& model) {
    return sha256_hex(model_to_json(model).dump());
}

std::string format_sample_set(const SampleSet& samples, const Json& extra) {
    Json header{{"schema", kSampleSchema},
                {"kind", to_string(samples.kind)},
                {"parameter_digest", samples.parameter_digest},
                {"modes", samples.modes},
                {"count", samples.sample_count()},
                {"seed", samples.seed},
                {"generator", Rng::kGeneratorName},
                {"generator_version", Rng::kGeneratorVersion},
                {"truncation",
                 {{"source_cutoffs", samples.truncation.source_cutoffs},
                  {"source_tail_mass", samples.truncation.source_tail_mass},
                  {"sector_cutoff", samples.truncation.sector_cutoff},
                  {"deficit", samples.truncation.deficit}}}};
    for (const auto& [key, value] : extra.items()) header[key] = value;

    std::string out = header.dump();
    out.push_back('\n');
    for (const auto& p : samples.samples) {
        out.push_back('[');
        for (std::size_t i = 0; i < p.counts.size(); ++i) {
            if (i) out.push_back(',');
            out += std::to_string(p.counts[i]);
        }
        out += "]\n";
    }
    return out;
}

SampleSet parse_sample_set(std::string_view text, Json* header_out) {
    std::istringstream in{std::string(text)};
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::Io, "sample file: missing header");
    const Json header = Json::parse(line);
    require(header.at("schema").get<std::string>() == kSampleSchema, ErrorKind::Io,
            "sample file: unsupported schema");
    SampleSet set;
    set.kind = parse_model_kind(header.at("kind").get<std::string>());
    set.parameter_digest = header.at("parameter_digest").get<std::string>();
    set.modes = header.at("modes").get<std::size_t>();
    set.seed = header.at("seed").get<std::uint64_t>();
    const auto& t = header.at("truncation");
    set.truncation.source_cutoffs = t.at("source_cutoffs").get<std::vector<int>>();
    set.truncation.source_tail_mass = t.at("source_tail_mass").get<std::vector<double>>();
    set.truncation.sector_cutoff = t.at("sector_cutoff").get<int>();
    set.truncation.deficit = t.at("deficit").get<double>();
    const auto count = header.at("count").get<std::size_t>();
    set.samples.reserve(count);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto counts = Json::parse(line).get<std::vector<int>>();
        require(counts.size() == set.modes, ErrorKind::Io, "sample file: record length differs from modes");
        set.samples.emplace_back(std::move(counts));
    }
    require(set.samples.size() == count, ErrorKind::Io, "sample file: record count differs from header");
    if (header_out) *header_out = header;
    return set;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    require(!ec, ErrorKind::Io, "cannot create directory " + path.parent_path().string());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), ErrorKind::Io, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        require(out.good(), ErrorKind::Io, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    require(!ec, ErrorKind::Io, "cannot rename into " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorKind::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace gbscert
