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

#include "qtmlab/stats.hpp"

#include <algorithm>
#include <numeric>

#include "qtmlab/error.hpp"

namespace qtmlab {

InstanceStats ComputeStats(const ValueProfile& profile,
                           const std::optional<ExternalWelfare>& external) {
  const double max_value = profile.max_value();
  if (!(max_value > 0.0)) {
    throw Error(ErrorCode::kDegenerateInstance,
                "all agent values are zero; spread and gap are undefined");
  }
  Vector welfare = profile.aggregates();
  if (external) {
    if (external->B.size() != welfare.size()) {
      ThrowInvalid("external welfare length does not match alternatives");
    }
    welfare = external->TrueWelfare(welfare);
  }

  InstanceStats stats;
  stats.max_value = max_value;
  stats.order.resize(static_cast<std::size_t>(welfare.size()));
  std::iota(stats.order.begin(), stats.order.end(), std::size_t{0});
  std::stable_sort(stats.order.begin(), stats.order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return welfare(static_cast<Eigen::Index>(a)) >
                            welfare(static_cast<Eigen::Index>(b));
                   });
  stats.welfare.resize(welfare.size());
  for (std::size_t j = 0; j < stats.order.size(); ++j) {
    stats.welfare(static_cast<Eigen::Index>(j)) =
        welfare(static_cast<Eigen::Index>(stats.order[j]));
  }

  const double top = stats.welfare(0);
  const double second = stats.welfare(1);
  stats.spread = top / max_value;
  stats.gap = (top - second) / max_value;

  if (profile.alternatives() == 2 && top > second) {
    const auto first_col = static_cast<Eigen::Index>(stats.order[0]);
    const auto second_col = static_cast<Eigen::Index>(stats.order[1]);
    const double numerator =
        (profile.values().col(first_col) - profile.values().col(second_col))
            .squaredNorm();
    const double delta = top - second;
    stats.disagreement = numerator / (delta * delta);
  }
  return stats;
}

}  // namespace qtmlab
