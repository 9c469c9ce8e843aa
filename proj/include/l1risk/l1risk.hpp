// Copyright 2026 The l1risk Authors
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


// Umbrella header.

#pragma once

#include "l1risk/amp.hpp"
#include "l1risk/error.hpp"
#include "l1risk/fixed_point.hpp"
#include "l1risk/montecarlo.hpp"
#include "l1risk/parallel.hpp"
#include "l1risk/prior.hpp"
#include "l1risk/risk_curve.hpp"
#include "l1risk/roots.hpp"
#include "l1risk/special_functions.hpp"
#include "l1risk/svg_plot.hpp"
