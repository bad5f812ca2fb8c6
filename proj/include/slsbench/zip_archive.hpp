// Copyright 2026 The SlsBench Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace slsbench::zip {

struct Entry {
    std::string path;  // '/'-separated, relative
    std::vector<std::uint8_t> data;
    std::uint32_t mode = 0644;
};

// Writes a standard zip archive. Entries are written in the given order with
// a fixed 1980-01-01 timestamp; members that do not shrink under deflate are
// stored.
void write_archive(const std::filesystem::path& out, const std::vector<Entry>& entries);

std::vector<Entry> read_archive(const std::filesystem::path& archive);

// Extracts every member below dest, rejecting paths that escape it.
void extract_archive(const std::filesystem::path& archive, const std::filesystem::path& dest);

}  // namespace slsbench::zip
