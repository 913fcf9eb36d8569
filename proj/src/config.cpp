// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsmerge/config.hpp"

#include <fstream>
#include <string>

#include "tsmerge/error.hpp"

namespace tsmerge {

namespace {

LayerSchedule parse_schedule(const nlohmann::json& j) {
    LayerSchedule s;
    if (!j.is_object()) {
        throw Error(ErrorCode::config, "schedule entries must be objects");
    }
    for (const auto& [key, value] : j.items()) {
        if (key == "mode") {
            const auto mode = value.get<std::string>();
            if (mode == "fixed") {
                s.mode = ScheduleMode::fixed;
            } else if (mode == "dynamic") {
                s.mode = ScheduleMode::dynamic;
            } else {
                throw Error(ErrorCode::config, "schedule mode must be 'fixed' or 'dynamic', got '" + mode + "'");
            }
        } else if (key == "r") {
            s.r = value.get<std::size_t>();
        } else if (key == "tau") {
            s.tau = value.get<double>();
        } else if (key == "k") {
            s.k = value.get<std::size_t>();
        } else if (key == "q") {
            s.q = value.get<std::size_t>();
        } else if (key == "metric") {
            try {
                s.metric = metric_from_string(value.get<std::string>());
            } catch (const Error& e) {
                throw Error(ErrorCode::config, e.what());
            }
        } else if (key == "reduction") {
            const auto reduction = value.get<std::string>();
            if (reduction == "merge") {
                s.reduction = Reduction::merge;
            } else if (reduction == "prune") {
                s.reduction = Reduction::prune;
            } else {
                throw Error(ErrorCode::config, "reduction must be 'merge' or 'prune', got '" + reduction + "'");
            }
        } else {
            throw Error(ErrorCode::config, "unknown schedule key '" + key + "'");
        }
    }
    return s;
}

std::vector<LayerSchedule> parse_schedules(const nlohmann::json& j) {
    std::vector<LayerSchedule> out;
    if (j.is_object()) {
        out.push_back(parse_schedule(j));
        return out;
    }
    if (!j.is_array()) {
        throw Error(ErrorCode::config, "schedule must be an array of layer entries");
    }
    for (const auto& entry : j) {
        out.push_back(parse_schedule(entry));
    }
    return out;
}

}  // namespace

ModelConfig parse_model_config(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw Error(ErrorCode::config, "config must be a JSON object");
    }
    ModelConfig c;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "L") {
                c.layers = value.get<std::size_t>();
            } else if (key == "d") {
                c.d = value.get<std::size_t>();
            } else if (key == "h") {
                c.h = value.get<std::size_t>();
            } else if (key == "heads") {
                c.heads = value.get<std::size_t>();
            } else if (key == "m") {
                c.m = value.get<std::size_t>();
            } else if (key == "n") {
                c.n = value.get<std::size_t>();
            } else if (key == "p") {
                c.p = value.get<std::size_t>();
            } else if (key == "patch_len") {
                c.patch_len = value.get<std::size_t>();
            } else if (key == "schedule") {
                c.schedule = parse_schedules(value);
            } else if (key == "decoder_schedule") {
                c.decoder_schedule = parse_schedules(value);
            } else if (key == "merge_hook") {
                const auto hook = value.get<std::string>();
                if (hook == "after-attention") {
                    c.merge_hook = MergeHook::after_attention;
                } else if (hook == "after-operator") {
                    c.merge_hook = MergeHook::after_operator;
                } else {
                    throw Error(ErrorCode::config,
                                "merge_hook must be 'after-attention' or 'after-operator', got '" + hook + "'");
                }
            } else if (key == "proportional_attention") {
                c.proportional_attention = value.get<bool>();
            } else if (key == "seed") {
                c.seed = value.get<std::uint64_t>();
            } else {
                throw Error(ErrorCode::config, "unknown config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::config, std::string("bad value in config: ") + e.what());
    }
    try {
        c.validate();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::config) {
            throw;
        }
        throw Error(ErrorCode::config, e.what());
    }
    return c;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::config, path.string() + ": cannot open config");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::config, path.string() + ": " + e.what());
    }
    return parse_model_config(j);
}

nlohmann::json schedule_to_json(const LayerSchedule& s) {
    return {{"mode", s.mode == ScheduleMode::fixed ? "fixed" : "dynamic"},
            {"r", s.r},
            {"tau", s.tau},
            {"k", s.k},
            {"q", s.q},
            {"metric", std::string(to_string(s.metric))},
            {"reduction", s.reduction == Reduction::merge ? "merge" : "prune"}};
}

nlohmann::json config_to_json(const ModelConfig& c) {
    nlohmann::json schedule = nlohmann::json::array();
    for (const auto& s : c.schedule) {
        schedule.push_back(schedule_to_json(s));
    }
    nlohmann::json decoder = nlohmann::json::array();
    for (const auto& s : c.decoder_schedule) {
        decoder.push_back(schedule_to_json(s));
    }
    return {{"L", c.layers},
            {"d", c.d},
            {"h", c.h},
            {"heads", c.heads},
            {"m", c.m},
            {"n", c.n},
            {"p", c.p},
            {"patch_len", c.patch_len},
            {"schedule", std::move(schedule)},
            {"decoder_schedule", std::move(decoder)},
            {"merge_hook", c.merge_hook == MergeHook::after_attention ? "after-attention" : "after-operator"},
            {"proportional_attention", c.proportional_attention},
            {"seed", c.seed}};
}

}  // namespace tsmerge
