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

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gbscert/gaussian.hpp"
#include "gbscert/samplers.hpp"

namespace gbscert {

using Json = nlohmann::ordered_json;

std::string sha256_hex(std::string_view data);

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json model_to_json(const GaussianModel& model);
GaussianModel model_from_json(const Json& j);
/// SHA-256 of the canonical JSON form of the model parameters.
std::string model_digest(const GaussianModel& model);

inline constexpr const char* kSampleSchema = "gbscert.samples/1";

/// Newline-delimited sample file: one JSON header object, then one JSON array
/// of m integers per sample. `extra` is merged into the header.
std::string format_sample_set(const SampleSet& samples, const Json& extra = Json::object());
SampleSet parse_sample_set(std::string_view text, Json* header = nullptr);

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace gbscert
