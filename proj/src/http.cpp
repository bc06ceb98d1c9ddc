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

#include "starenh/http.hpp"

#include "httplib.h"
#include "starenh/curveset_io.hpp"
#include "starenh/image_io.hpp"

namespace starenh::app {

using nlohmann::json;

namespace {

constexpr size_t kMaxPayload = size_t{512} << 20;
constexpr int kSamplesPerCurve = 65;

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  send_json(res, {{"code", code}, {"message", message}}, status);
}

void send_png(httplib::Response& res, const Image& image) {
  res.status = 200;
  res.set_content(encode_image(image, ImageFormat::kPng), "image/png");
}

std::string form_value(const httplib::Request& req, const std::string& key) {
  require(req.is_multipart_form_data(), "expected a multipart/form-data body");
  require(req.has_file(key), "missing form field '" + key + "'");
  return req.get_file_value(key).content;
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json doc = json::parse(req.body, nullptr, false);
  require(!doc.is_discarded(), "request body is not valid JSON");
  require(doc.is_object(), "request body must be a JSON object");
  return doc;
}

bool parse_flag(const std::string& s) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw_invalid("expected a boolean flag, got '" + s + "'");
}

json image_json(const Image& image) {
  return {{"width", image.width},
          {"height", image.height},
          {"bit_depth", image.bit_depth},
          {"png_base64", httplib::detail::base64_encode(encode_image(image, ImageFormat::kPng))}};
}

json style_json(const std::string& id, const style::StyleLatent& latent) {
  return {{"id", id}, {"latent", style::latent_to_json(latent)}};
}

template <class Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, http_status(e.kind()), error_code(e.kind()), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "invalid_input", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

}  // namespace

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return 400;
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kDomain:
    case ErrorKind::kDegenerate: return 422;
    case ErrorKind::kIo: return 500;
  }
  return 500;
}

std::string error_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid_input";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kDomain: return "out_of_range";
    case ErrorKind::kDegenerate: return "degenerate";
    case ErrorKind::kIo: return "io";
  }
  return "internal";
}

void install_routes(httplib::Server& server, Service& service) {
  server.set_payload_max_length(kMaxPayload);

  server.Get("/healthz", guarded([&service](const httplib::Request&, httplib::Response& res) {
    send_json(res, service.health());
  }));

  server.Get("/styles", guarded([&service](const httplib::Request&, httplib::Response& res) {
    json list = json::array();
    for (const auto& e : service.registry().list()) list.push_back(style_json(e.id, e.latent));
    send_json(res, {{"styles", list}});
  }));

  server.Post("/styles", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    require(req.is_multipart_form_data(), "expected a multipart/form-data body");
    std::vector<std::string> uploads;
    for (const auto& f : req.get_file_values("images")) uploads.push_back(f.content);
    require(!uploads.empty(), "no files in form field 'images'");
    std::optional<std::string> id;
    if (req.has_file("id")) id = req.get_file_value("id").content;
    const auto r = service.add_style(uploads, id);
    json body = style_json(r.id, r.latent);
    body["images_used"] = r.used;
    body["images_skipped"] = r.skipped;
    send_json(res, body, 201);
  }));

  server.Post("/enhance", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const Image image = decode_image(form_value(req, "image"));
    const std::string source = form_value(req, "source");
    const std::string target = form_value(req, "target");
    const bool preview = req.has_file("preview") ? parse_flag(req.get_file_value("preview").content) : true;
    const auto r = service.enhance(image, source, target, preview);
    json curves = curveset_to_json(r.curves);
    curves["samples"] = curve_samples(r.curves, kSamplesPerCurve);
    send_json(res, {{"session", r.session},
                    {"source", source},
                    {"target", target},
                    {"preview", preview},
                    {"width", image.width},
                    {"height", image.height},
                    {"image", image_json(r.rendered)},
                    {"curves", curves}});
  }));

  server.Post("/sessions/:id/sliders", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    SliderSettings sliders;
    if (body.contains("sliders")) sliders = sliders_from_json(body["sliders"]);
    std::vector<KnotOverride> overrides;
    if (body.contains("knots")) overrides = overrides_from_json(body["knots"]);
    send_png(res, service.sliders(req.path_params.at("id"), sliders, overrides));
  }));

  server.Post("/sessions/:id/export", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    bool applied = true;
    if (body.contains("sliders_applied")) {
      require(body["sliders_applied"].is_boolean(), "'sliders_applied' must be a boolean");
      applied = body["sliders_applied"].get<bool>();
    }
    send_png(res, service.export_image(req.path_params.at("id"), applied));
  }));

  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) send_error(res, 404, "not_found", "no route for " + req.method + " " + req.path);
    else if (res.status == 413) send_error(res, 413, "too_large", "request body too large");
  });
}

bool serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  install_routes(server, service);
  return server.listen(host, port);
}

}  // namespace starenh::app
