/*
 * Copyright 2026 The plmu Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*!
  \file plmu.hpp
  \brief Everything in one include.
*/

#pragma once

#include "plmu/arena.hpp"
#include "plmu/chain.hpp"
#include "plmu/denotational.hpp"
#include "plmu/error.hpp"
#include "plmu/formula.hpp"
#include "plmu/linear.hpp"
#include "plmu/montecarlo.hpp"
#include "plmu/plts.hpp"
#include "plmu/plts_io.hpp"
#include "plmu/random.hpp"
#include "plmu/rng.hpp"
#include "plmu/solver.hpp"
#include "plmu/subformulas.hpp"
