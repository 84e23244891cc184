// Copyright 2026 The Arbound Authors.
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

// Umbrella header: stationarity-constrained autoregression with
// finite-sample generalization bounds and bound-driven order selection.

#pragma once

#include "arbound/armodel.hpp"
#include "arbound/complexity.hpp"
#include "arbound/errors.hpp"
#include "arbound/mixing.hpp"
#include "arbound/riskbound.hpp"
#include "arbound/simgen.hpp"
#include "arbound/stability.hpp"
#include "arbound/timeseries.hpp"
