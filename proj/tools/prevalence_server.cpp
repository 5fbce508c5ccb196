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

#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "prevalence/service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Posterior prevalence JSON service"};
  prevalence::ServiceConfig config;
  app.add_option("--host", config.host, "listen address")
      ->envname("PREVALENCE_HOST")
      ->capture_default_str();
  app.add_option("--port", config.port, "listen port")
      ->envname("PREVALENCE_PORT")
      ->capture_default_str();
  app.add_option("--cors-origin", config.cors_origin, "Access-Control-Allow-Origin value")
      ->envname("PREVALENCE_CORS_ORIGIN")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  httplib::Server server;
  prevalence::install_routes(server, config);
  std::cerr << prevalence::kServiceVersion << " listening on " << config.host << ":"
            << config.port << "\n";
  if (!server.listen(config.host, config.port)) {
    std::cerr << "error: cannot listen on " << config.host << ":" << config.port << "\n";
    return 1;
  }
  return 0;
}
