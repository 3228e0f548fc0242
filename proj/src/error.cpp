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

#include "gbscert/error.hpp"

namespace gbscert {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidDimension: return "invalid-dimension";
        case ErrorKind::SymmetryViolation: return "symmetry-violation";
        case ErrorKind::EncodingInfeasible: return "encoding-infeasible";
        case ErrorKind::SizeLimit: return "size-limit";
        case ErrorKind::Parameter: return "parameter";
        case ErrorKind::Assembly: return "assembly";
        case ErrorKind::Normalization: return "normalization";
        case ErrorKind::DegenerateDataset: return "degenerate-dataset";
        case ErrorKind::Protocol: return "protocol";
        case ErrorKind::Dependency: return "stage-dependency";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

}  // namespace gbscert
