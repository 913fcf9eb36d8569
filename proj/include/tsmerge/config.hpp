// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "json.hpp"
#include "tsmerge/models.hpp"

namespace tsmerge {

/// Keys: L, d, h, heads, m, n, p, schedule[], merge_hook, proportional_attention,
/// seed; optional patch_len and decoder_schedule[]. Schedule entries take mode,
/// r, tau, k, q, metric and reduction. Throws ErrorCode::config.
ModelConfig parse_model_config(const nlohmann::json& j);
ModelConfig load_model_config(const std::filesystem::path& path);

nlohmann::json schedule_to_json(const LayerSchedule& s);
nlohmann::json config_to_json(const ModelConfig& config);

}  // namespace tsmerge
