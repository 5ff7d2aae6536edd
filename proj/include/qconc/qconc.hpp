#pragma once
// Copyright (c) 2026 the qconc authors.
// SPDX-License-Identifier: Apache-2.0

#include "qconc/concentrate.hpp"
#include "qconc/errors.hpp"
#include "qconc/json_io.hpp"
#include "qconc/kraus.hpp"
#include "qconc/linalg.hpp"
#include "qconc/matrix.hpp"
#include "qconc/random.hpp"
#include "qconc/selfcheck.hpp"
#include "qconc/state.hpp"
#include "qconc/superdense.hpp"
#include "qconc/theorem.hpp"
