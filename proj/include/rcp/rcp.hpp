// Copyright 2026 The rcp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "rcp/batch_csv.hpp"
#include "rcp/clearing.hpp"
#include "rcp/config.hpp"
#include "rcp/distributions.hpp"
#include "rcp/experiments.hpp"
#include "rcp/mechanisms.hpp"
#include "rcp/metrics.hpp"
#include "rcp/numerics.hpp"
#include "rcp/validation.hpp"
