// Copyright 2026 The qtmlab Authors.
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

#ifndef QTMLAB_STATS_HPP_
#define QTMLAB_STATS_HPP_

#include <optional>

#include "qtmlab/types.hpp"

namespace qtmlab {

// Spread, gap and disagreement of an instance. With external welfare the
// statistics are taken over W = V + B; alternatives are reported in canonical
// (nonincreasing welfare) order.
//
// Throws kDegenerateInstance when every value is zero.
InstanceStats ComputeStats(const ValueProfile& profile,
                           const std::optional<ExternalWelfare>& external = {});

}  // namespace qtmlab

#endif  // QTMLAB_STATS_HPP_
