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

#include "prevalence/service.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include <httplib.h>

#include "prevalence/errors.hpp"
#include "prevalence/pipeline.hpp"

namespace prevalence {

namespace {

using nlohmann::json;

struct ScenarioSpec {
  std::string name;
  PriorInputs priors;
};

struct ParsedRequest {
  RunSpec base;
  bool has_seed = false;
  std::vector<ScenarioSpec> scenarios;
  std::vector<Violation> errors;
  std::vector<Violation> caps;
};

json violations_json(const std::vector<Violation>& violations) {
  json list = json::array();
  for (const auto& v : violations) list.push_back({{"field", v.field}, {"constraint", v.constraint}});
  return list;
}

HttpReply error_reply(int status, const std::string& kind, const std::vector<Violation>& list) {
  return {status, json{{"error", kind}, {"violations", violations_json(list)}}.dump()};
}

// Typed field access that records a violation instead of throwing.
class Reader {
 public:
  explicit Reader(std::vector<Violation>& errors) : errors_(errors) {}

  const json* object(const json& parent, const char* key, const std::string& field,
                     bool required) {
    const json* node = find(parent, key);
    if (node == nullptr) {
      if (required) errors_.push_back({field, field + " is required"});
      return nullptr;
    }
    if (!node->is_object()) {
      errors_.push_back({field, field + " must be an object"});
      return nullptr;
    }
    return node;
  }

  void integer(const json& parent, const char* key, const std::string& field,
               std::int64_t& out, bool required) {
    const json* node = find(parent, key);
    if (node == nullptr) {
      if (required) errors_.push_back({field, field + " is required"});
      return;
    }
    if (node->is_number_unsigned() &&
        node->get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      errors_.push_back({field, field + " is out of range"});
      return;
    }
    if (!node->is_number_integer()) {
      errors_.push_back({field, field + " must be an integer"});
      return;
    }
    out = node->get<std::int64_t>();
  }

  bool unsigned_integer(const json& parent, const char* key, const std::string& field,
                        std::uint64_t& out) {
    const json* node = find(parent, key);
    if (node == nullptr) return false;
    if (!node->is_number_unsigned()) {
      errors_.push_back({field, field + " must be a nonnegative integer"});
      return false;
    }
    out = node->get<std::uint64_t>();
    return true;
  }

  void number(const json& parent, const char* key, const std::string& field, double& out) {
    const json* node = find(parent, key);
    if (node == nullptr) return;
    if (!node->is_number()) {
      errors_.push_back({field, field + " must be a number"});
      return;
    }
    out = node->get<double>();
  }

  void boolean(const json& parent, const char* key, const std::string& field, bool& out) {
    const json* node = find(parent, key);
    if (node == nullptr) return;
    if (!node->is_boolean()) {
      errors_.push_back({field, field + " must be a boolean"});
      return;
    }
    out = node->get<bool>();
  }

  static const json* find(const json& parent, const char* key) {
    const auto it = parent.find(key);
    if (it == parent.end() || it->is_null()) return nullptr;
    return &*it;
  }

 private:
  std::vector<Violation>& errors_;
};

void read_priors(Reader& reader, const json& node, const std::string& prefix, PriorInputs& out) {
  reader.number(node, "alpha_u", prefix + ".alpha_u", out.alpha_u);
  reader.number(node, "beta_u", prefix + ".beta_u", out.beta_u);
  reader.number(node, "alpha_v", prefix + ".alpha_v", out.alpha_v);
  reader.number(node, "beta_v", prefix + ".beta_v", out.beta_v);
}

ParsedRequest parse(const json& root) {
  ParsedRequest req;
  Reader reader(req.errors);
  RunSpec& spec = req.base;

  if (const json* survey = reader.object(root, "survey", "survey", true)) {
    reader.integer(*survey, "k", "survey.k", spec.survey.k, true);
    reader.integer(*survey, "n", "survey.n", spec.survey.n, true);
  }
  if (const json* cal = reader.object(root, "calibration", "calibration", true)) {
    reader.integer(*cal, "k_u", "calibration.k_u", spec.calibration.k_u, true);
    reader.integer(*cal, "n_u", "calibration.n_u", spec.calibration.n_u, true);
    reader.integer(*cal, "k_v", "calibration.k_v", spec.calibration.k_v, true);
    reader.integer(*cal, "n_v", "calibration.n_v", spec.calibration.n_v, true);
  }
  if (const json* priors = reader.object(root, "priors", "priors", false)) {
    read_priors(reader, *priors, "priors", spec.priors);
  }
  if (const json* mc = reader.object(root, "mc", "mc", false)) {
    reader.integer(*mc, "samples", "mc.samples", spec.mc.n_samples, false);
    reader.integer(*mc, "grid", "mc.grid", spec.mc.grid_m, false);
    req.has_seed = reader.unsigned_integer(*mc, "seed", "mc.seed", spec.mc.seed);
  }
  if (Reader::find(root, "reweight") != nullptr) {
    double factor = 0.0;
    reader.number(root, "reweight", "reweight", factor);
    spec.reweight = factor;
  }
  if (Reader::find(root, "population") != nullptr) {
    std::int64_t population = 0;
    reader.integer(root, "population", "population", population, true);
    spec.population = population;
  }
  reader.number(root, "level", "level", spec.level);
  reader.boolean(root, "oracle", "oracle", spec.oracle);

  if (const json* list = Reader::find(root, "scenarios")) {
    if (!list->is_array()) {
      req.errors.push_back({"scenarios", "scenarios must be an array"});
    } else if (list->size() > kMaxScenarios) {
      req.caps.push_back({"scenarios", "at most 4 scenarios"});
    } else {
      for (std::size_t i = 0; i < list->size(); ++i) {
        const std::string prefix = "scenarios[" + std::to_string(i) + "]";
        const json& item = (*list)[i];
        if (!item.is_object()) {
          req.errors.push_back({prefix, prefix + " must be an object"});
          continue;
        }
        ScenarioSpec scenario{"scenario-" + std::to_string(i + 1), spec.priors};
        if (const json* name = Reader::find(item, "name")) {
          if (name->is_string()) {
            scenario.name = name->get<std::string>();
          } else {
            req.errors.push_back({prefix + ".name", prefix + ".name must be a string"});
          }
        }
        if (const json* priors = reader.object(item, "priors", prefix + ".priors", false)) {
          read_priors(reader, *priors, prefix + ".priors", scenario.priors);
        }
        req.scenarios.push_back(std::move(scenario));
      }
    }
  }
  if (req.scenarios.empty()) req.scenarios.push_back({"default", spec.priors});

  if (spec.mc.n_samples > kMaxSamples) req.caps.push_back({"mc.samples", "mc.samples ≤ 1000000"});
  if (spec.mc.grid_m > kMaxGrid) req.caps.push_back({"mc.grid", "mc.grid ≤ 100000"});
  return req;
}

json transport_json(const TransportGrid& g) {
  return {{"m", g.grid_m},
          {"theta", g.theta},
          {"densities", g.densities},
          {"downsampled", g.downsampled}};
}

}  // namespace

TransportGrid downsample(const PosteriorGrid& grid, std::size_t max_points) {
  TransportGrid out;
  out.grid_m = grid.grid_m;
  const std::size_t points = grid.densities.size();
  std::vector<std::int64_t> indices;
  if (points <= max_points) {
    for (std::size_t j = 0; j < points; ++j) indices.push_back(static_cast<std::int64_t>(j));
  } else {
    out.downsampled = true;
    const std::size_t stride = (points + max_points - 1) / max_points;
    for (std::size_t j = 0; j < points; j += stride) indices.push_back(static_cast<std::int64_t>(j));
    const auto peak = static_cast<std::int64_t>(
        std::max_element(grid.densities.begin(), grid.densities.end()) - grid.densities.begin());
    const auto pos = std::lower_bound(indices.begin(), indices.end(), peak);
    if (pos == indices.end() || *pos != peak) {
      if (indices.size() < max_points) {
        indices.insert(pos, peak);
      } else {
        // Budget full: the peak takes the place of its nearest kept point.
        auto nearest = pos;
        if (pos == indices.end() || (pos != indices.begin() && peak - *(pos - 1) < *pos - peak)) {
          nearest = pos - 1;
        }
        *nearest = peak;
      }
    }
  }
  double sum = 0.0;
  for (auto j : indices) sum += grid.densities[j];
  const double mean = sum / static_cast<double>(indices.size());
  for (auto j : indices) {
    out.theta.push_back(grid.theta(j));
    out.densities.push_back(mean > 0.0 ? grid.densities[j] / mean : 0.0);
  }
  return out;
}

HttpReply handle_posterior(std::string_view body) {
  json root;
  try {
    root = json::parse(body);
  } catch (const json::parse_error&) {
    return error_reply(400, "invalid_request", {{"body", "body must be valid JSON"}});
  }
  if (!root.is_object()) {
    return error_reply(400, "invalid_request", {{"body", "body must be a JSON object"}});
  }

  ParsedRequest req = parse(root);
  if (!req.errors.empty()) return error_reply(400, "invalid_request", req.errors);

  std::vector<Violation> invalid = check(req.base);
  for (std::size_t i = 0; i < req.scenarios.size(); ++i) {
    RunSpec variant = req.base;
    variant.priors = req.scenarios[i].priors;
    for (auto& v : check(variant)) {
      if (v.field.rfind("priors.", 0) != 0) continue;
      if (std::find(invalid.begin(), invalid.end(), v) != invalid.end()) continue;
      const std::string prefix = "scenarios[" + std::to_string(i) + "].";
      invalid.push_back({prefix + v.field, prefix + v.constraint});
    }
  }
  if (!invalid.empty()) return error_reply(400, "invalid_request", invalid);
  if (!req.caps.empty()) return error_reply(413, "request_too_large", req.caps);

  if (!req.has_seed) {
    std::random_device device;
    req.base.mc.seed = (static_cast<std::uint64_t>(device()) << 32) | device();
  }

  json scenarios = json::array();
  for (const ScenarioSpec& scenario : req.scenarios) {
    RunSpec spec = req.base;
    spec.priors = scenario.priors;
    try {
      const ScenarioResult result = run_scenario(spec, scenario.name);
      json item = to_json(result);
      item["name"] = result.name;
      item["grid"] = transport_json(downsample(result.grid));
      scenarios.push_back(std::move(item));
    } catch (const VanishingMassError& e) {
      return {422, json{{"error", "vanishing_mass"}, {"scenario", scenario.name}, {"message", e.what()}}.dump()};
    } catch (const RejectionBudgetError& e) {
      return {422, json{{"error", "rejection_budget"}, {"scenario", scenario.name}, {"message", e.what()}}.dump()};
    } catch (const SupportOverflowError& e) {
      return {422, json{{"error", "support_overflow"}, {"scenario", scenario.name}, {"message", e.what()}}.dump()};
    } catch (const DomainError& e) {
      return error_reply(400, "invalid_request", {{"request", e.what()}});
    }
  }
  return {200, json{{"scenarios", std::move(scenarios)}}.dump()};
}

HttpReply handle_health() {
  return {200, json{{"status", "ok"}, {"version", kServiceVersion}}.dump()};
}

void install_routes(httplib::Server& server, const ServiceConfig& config) {
  const std::string origin = config.cors_origin;
  server.set_payload_max_length(4 * 1024 * 1024);
  server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
  });
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    const HttpReply reply = handle_health();
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  server.Post("/v1/posterior", [](const httplib::Request& req, httplib::Response& res) {
    const HttpReply reply = handle_posterior(req.body);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  server.Options("/v1/posterior", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
}

}  // namespace prevalence
