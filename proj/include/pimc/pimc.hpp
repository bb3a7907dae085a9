// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bench.hpp"
#include "csp.hpp"
#include "encoder.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "lp.hpp"
#include "mc_engine.hpp"
#include "model.hpp"
#include "oracle.hpp"
#include "parser.hpp"
#include "pipeline.hpp"
#include "rational.hpp"
#include "semantics.hpp"
#include "smtlib.hpp"
#include "solver.hpp"
#include "witness.hpp"
