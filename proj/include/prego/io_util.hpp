// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

namespace prego {

std::string read_file(const std::filesystem::path& path);

// Write to a temp file in the target directory, then rename into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace prego
