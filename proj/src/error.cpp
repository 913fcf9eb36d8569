// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsmerge/error.hpp"

namespace tsmerge {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::empty_sequence:
        return "empty_sequence";
    case ErrorCode::parameter:
        return "parameter";
    case ErrorCode::plan_mismatch:
        return "plan_mismatch";
    case ErrorCode::invalid_plan:
        return "invalid_plan";
    case ErrorCode::batch_shape:
        return "batch_shape";
    case ErrorCode::shape:
        return "shape";
    case ErrorCode::corruption:
        return "corruption";
    case ErrorCode::schedule:
        return "schedule";
    case ErrorCode::contract_violation:
        return "contract_violation";
    case ErrorCode::undefined_thd:
        return "undefined_thd";
    case ErrorCode::ingestion:
        return "ingestion";
    case ErrorCode::config:
        return "config";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      m_code(code) {}

}  // namespace tsmerge
