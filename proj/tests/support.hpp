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

#include <optional>

#include "gbscert/error.hpp"

namespace test {

/// Kind of the gbscert::Error thrown by f, or nothing if f returns normally.
template <typename F>
std::optional<gbscert::ErrorKind> kind_of(F&& f) {
    try {
        f();
    } catch (const gbscert::Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

}  // namespace test

#define CHECK_ERROR_KIND(expr, kind) CHECK(::test::kind_of([&] { (void)(expr); }) == std::optional(kind))
