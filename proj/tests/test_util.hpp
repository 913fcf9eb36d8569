// Copyright (C) 2026 The tsmerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "doctest.h"
#include "tsmerge/error.hpp"

/// Runs `fn` and returns the code of the tsmerge::Error it throws.
template <typename Fn>
tsmerge::ErrorCode code_of(const Fn& fn) {
    try {
        fn();
    } catch (const tsmerge::Error& e) {
        return e.code();
    }
    FAIL("expected tsmerge::Error");
    return tsmerge::ErrorCode::corruption;
}
