// SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include "tarstop/certify.hpp"
#include "tarstop/cost.hpp"
#include "tarstop/cost_dynamics.hpp"
#include "tarstop/errors.hpp"
#include "tarstop/probability.hpp"
#include "tarstop/quantile.hpp"
#include "tarstop/random.hpp"
#include "tarstop/record.hpp"
#include "tarstop/record_io.hpp"
#include "tarstop/replicate.hpp"
#include "tarstop/rules.hpp"
#include "tarstop/sampling.hpp"
#include "tarstop/stat_kernel.hpp"
#include "tarstop/summary.hpp"
#include "tarstop/synthetic.hpp"
