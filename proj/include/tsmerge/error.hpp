// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsmerge {

enum class ErrorCode {
    empty_sequence,
    parameter,
    plan_mismatch,
    invalid_plan,
    batch_shape,
    shape,
    corruption,
    schedule,
    contract_violation,
    undefined_thd,
    ingestion,
    config,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept {
        return m_code;
    }

private:
    ErrorCode m_code;
};

}  // namespace tsmerge
