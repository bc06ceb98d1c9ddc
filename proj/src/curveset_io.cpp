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

#include "starenh/curveset_io.hpp"

#include <fstream>

namespace starenh {

using nlohmann::json;

json curveset_to_json(const CurveSet& curves, const std::optional<SliderSettings>& sliders) {
  json doc;
  doc["version"] = kCurveSetFormatVersion;
  json c = json::object();
  for (int i = 0; i < kCurveCount; ++i) {
    const auto v = curves.at(i).values();
    c[curve_name(i)] = std::vector<double>(v.begin(), v.end());
  }
  doc["curves"] = std::move(c);
  if (sliders) doc["sliders"] = sliders_to_json(*sliders);
  return doc;
}

CurveSetDocument curveset_from_json(const json& doc) {
  try {
    require(doc.is_object() && doc.contains("curves"), "curve set JSON needs a 'curves' object");
    require(doc.value("version", 0) == kCurveSetFormatVersion, "unsupported curve set version");
    const json& c = doc.at("curves");
    std::array<curves::CurveKnots, kCurveCount> knots;
    for (int i = 0; i < kCurveCount; ++i) {
      const std::string name = curve_name(i);
      require(c.contains(name), "curve set JSON is missing '" + name + "'");
      knots[static_cast<size_t>(i)] = curves::CurveKnots(c.at(name).get<std::vector<double>>());
    }
    CurveSetDocument out{CurveSet(std::move(knots)), std::nullopt};
    if (doc.contains("sliders")) out.sliders = sliders_from_json(doc.at("sliders"));
    return out;
  } catch (const json::exception& e) {
    throw_invalid(std::string("malformed curve set JSON: ") + e.what());
  }
}

json sliders_to_json(const SliderSettings& sliders) {
  json s = json::object();
  for (int i = 0; i < kCurveCount; ++i) s[curve_name(i)] = sliders.beta[static_cast<size_t>(i)];
  return s;
}

SliderSettings sliders_from_json(const json& doc) {
  require(doc.is_object(), "sliders must be a JSON object");
  SliderSettings s;
  for (const auto& [name, value] : doc.items()) {
    require(value.is_number(), "slider '" + name + "' is not a number");
    s.beta[static_cast<size_t>(parse_curve_name(name))] = value.get<double>();
  }
  s.validate();
  return s;
}

void save_curveset(const std::string& path, const CurveSet& curves,
                   const std::optional<SliderSettings>& sliders) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << curveset_to_json(curves, sliders).dump(2) << '\n';
}

CurveSetDocument load_curveset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw_invalid("malformed curve set JSON in " + path + ": " + e.what());
  }
  return curveset_from_json(doc);
}

}  // namespace starenh
