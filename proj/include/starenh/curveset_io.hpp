//  Copyright 2026 The starenh Authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "starenh/enhancer.hpp"

namespace starenh {

inline constexpr int kCurveSetFormatVersion = 1;

struct CurveSetDocument {
  CurveSet curves;
  std::optional<SliderSettings> sliders;
};

/// {"version": 1, "curves": {"r_to_r": [...], ...}, "sliders": {...}}.
/// Numbers are written with round-trip precision.
nlohmann::json curveset_to_json(const CurveSet& curves, const std::optional<SliderSettings>& sliders = {});
CurveSetDocument curveset_from_json(const nlohmann::json& doc);

nlohmann::json sliders_to_json(const SliderSettings& sliders);
/// Missing entries default to 1; out-of-range values raise kInvalidInput.
SliderSettings sliders_from_json(const nlohmann::json& doc);

void save_curveset(const std::string& path, const CurveSet& curves,
                   const std::optional<SliderSettings>& sliders = {});
CurveSetDocument load_curveset(const std::string& path);

}  // namespace starenh
