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

#include <json.hpp>

#include "coalflow/flow_solver.hpp"
#include "coalflow/mission.hpp"

namespace coalflow {

using Json = nlohmann::json;

Json function_to_json(const ScalarFunction& f);
ScalarFunction function_from_json(const Json& j);

// Mission documents. Parsing throws InputError with a path-like hint.
Json mission_to_json(const Mission& m);
Mission mission_from_json(const Json& j);
Mission load_mission(const std::string& path);
void save_mission(const Mission& m, const std::string& path);

Json flow_to_json(const FlowSolution& f);
FlowSolution flow_from_json(const Json& j);
Json allocation_to_json(const IntegerAllocation& a);
IntegerAllocation allocation_from_json(const Json& j);
Json schedule_to_json(const Schedule& s);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace coalflow
