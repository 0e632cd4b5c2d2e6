// Copyright 2026 The medpir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MEDPIR_IO_HPP_
#define MEDPIR_IO_HPP_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace medpir {

using json = nlohmann::json;

// Reads a JSONL file, invoking fn(line_number, parsed) per non-empty line.
// Line numbers are 1-based. Parse failures raise ParseError naming the line.
void read_jsonl(const std::filesystem::path& path,
                const std::function<void(size_t, const json&)>& fn);

// Atomically replaces `path` with `content` (write to temp file + rename).
void atomic_write(const std::filesystem::path& path, const std::string& content);

// Line-oriented artifacts keep their external schema intact; the resolved
// config echo goes to a `<path>.meta.json` sidecar instead.
void write_meta_sidecar(const std::filesystem::path& artifact, const json& meta);

std::string read_file(const std::filesystem::path& path);

// Base64 of raw bytes; used for bit-exact tensor serialization.
std::string base64_encode(const void* data, size_t len);
std::vector<uint8_t> base64_decode(const std::string& text);

}  // namespace medpir

#endif  // MEDPIR_IO_HPP_
