// Copyright 2026 The coalflow Authors
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

#include <string>
#include <vector>

#include "coalflow/sweep.hpp"

namespace coalflow {

struct ChartOptions {
  std::string title;
  std::string x_label = "level";
  std::string y_label = "mean reward";
  int width = 720;
  int height = 440;
};

// Line chart of mean reward per solver with a +-1 std band.
std::string render_svg(const std::vector<SweepRow>& rows,
                       const ChartOptions& opts);

}  // namespace coalflow
