// Copyright 2026 The Prevalence Authors
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

// Stateless JSON API:
//
//   POST /v1/posterior   body: survey, calibration, priors, mc, reweight,
//                        population, level, oracle, scenarios[] (<= 4)
//   GET  /healthz        build identifier
//
// Status codes: 200 ok, 400 invalid input (with a violation list), 413 caps
// exceeded, 422 the posterior could not be computed.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "prevalence/inference.hpp"

namespace httplib {
class Server;
}

namespace prevalence {

inline constexpr const char* kServiceVersion = "prevalence/1.0.0";

inline constexpr std::int64_t kMaxSamples = 1000000;
inline constexpr std::int64_t kMaxGrid = 100000;
inline constexpr std::size_t kMaxScenarios = 4;
inline constexpr std::size_t kMaxTransportPoints = 2001;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin = "*";
};

struct HttpReply {
  int status = 200;
  std::string body;
};

/// Grid thinned for transport: every ceil((M + 1) / max_points)-th point
/// plus the global maximum (replacing its nearest neighbour when the budget
/// is full), re-normalized to mean 1.
struct TransportGrid {
  std::int64_t grid_m = 0;
  std::vector<double> theta;
  std::vector<double> densities;
  bool downsampled = false;
};

TransportGrid downsample(const PosteriorGrid& grid, std::size_t max_points = kMaxTransportPoints);

/// Computes the response for a POST /v1/posterior body. Pure apart from
/// drawing a seed when the request omits one.
HttpReply handle_posterior(std::string_view body);

HttpReply handle_health();

/// Registers the routes and CORS handling on server.
void install_routes(httplib::Server& server, const ServiceConfig& config);

}  // namespace prevalence
