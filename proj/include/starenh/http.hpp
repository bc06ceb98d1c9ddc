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

#include <string>

#include "json.hpp"
#include "starenh/app.hpp"
#include "starenh/error.hpp"

namespace httplib {
class Server;
}

namespace starenh::app {

inline constexpr const char* kDefaultHost = "127.0.0.1";
inline constexpr int kDefaultPort = 8787;

int http_status(ErrorKind kind);
std::string error_code(ErrorKind kind);

/// Registers every endpoint on `server`. The service must outlive it.
void install_routes(httplib::Server& server, Service& service);

/// Blocks until the server stops. Returns false if the address cannot be bound.
bool serve(Service& service, const std::string& host, int port);

}  // namespace starenh::app
