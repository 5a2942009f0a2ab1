// Copyright 2026 The emostim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "emostim/model_spec.hpp"

#include <cmath>

#include "emostim/error.hpp"
#include "emostim/hashing.hpp"

namespace emostim {

namespace {

constexpr std::pair<Backend, std::string_view> kBackends[] = {
    {Backend::kHttpChat, "http_chat"},
    {Backend::kMockOracle, "mock_oracle"},
    {Backend::kMockFixed, "mock_fixed"},
    {Backend::kMockUniformChoice, "mock_uniform_choice"},
    {Backend::kMockScripted, "mock_scripted"},
};

Json ScriptToJson(const std::vector<ScriptRule>& rules) {
  Json out = Json::array();
  for (const auto& r : rules) {
    Json j = Json::object();
    if (r.sample_id) j["sample"] = *r.sample_id;
    if (r.prompt_contains) j["prompt_contains"] = *r.prompt_contains;
    if (r.temperature) j["temperature"] = *r.temperature;
    if (r.response) j["response"] = *r.response;
    if (r.echo_gold) j["gold"] = true;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace

std::string_view ToString(Backend backend) {
  for (const auto& [b, name] : kBackends) {
    if (b == backend) return name;
  }
  return "?";
}

Backend ParseBackend(std::string_view text) {
  for (const auto& [b, name] : kBackends) {
    if (name == text) return b;
  }
  throw ValidationError("", "backend", "unknown backend '" + std::string(text) + "'");
}

void ValidateModelSpec(const ModelSpec& spec) {
  if (spec.name.empty()) throw ValidationError("", "name", "model name must not be empty");
  if (!(spec.params.temperature >= 0.0) || !std::isfinite(spec.params.temperature)) {
    throw ValidationError("", "params.temperature",
                          "temperature must be a finite value >= 0 for " + spec.name);
  }
  if (spec.params.max_tokens <= 0) {
    throw ValidationError("", "params.max_tokens", "max_tokens must be positive");
  }
  if (!spec.params.extra.is_object()) {
    throw ValidationError("", "params", "extra sampling params must be an object");
  }
  switch (spec.backend) {
    case Backend::kHttpChat:
      if (!spec.base_url || spec.base_url->empty()) {
        throw ConfigError("model '" + spec.name + "' uses http_chat but no base_url is configured");
      }
      break;
    case Backend::kMockUniformChoice:
      if (!spec.params.seed) {
        throw ValidationError("", "params.seed", "mock_uniform_choice requires a seed");
      }
      break;
    case Backend::kMockScripted:
      if (spec.script.empty()) {
        throw ValidationError("", "script", "mock_scripted requires at least one rule");
      }
      break;
    case Backend::kMockOracle:
    case Backend::kMockFixed:
      break;
  }
}

std::vector<ScriptRule> ParseScript(const Json& json, const std::string& source) {
  const Json* rules = &json;
  if (json.is_object()) {
    JsonFields f(json, source);
    rules = &f.RequireArray("rules");
  }
  if (!rules->is_array()) throw ValidationError(source, "rules", "expected an array of rules");
  std::vector<ScriptRule> out;
  for (std::size_t i = 0; i < rules->size(); ++i) {
    JsonFields f((*rules)[i], source, "rules[" + std::to_string(i) + "]");
    ScriptRule r;
    r.sample_id = f.OptionalString("sample");
    r.prompt_contains = f.OptionalString("prompt_contains");
    r.temperature = f.OptionalNumber("temperature");
    r.response = f.OptionalString("response");
    if (f.Has("gold")) {
      const Json& g = f.Require("gold");
      if (!g.is_boolean()) f.Fail("gold", "expected a boolean");
      r.echo_gold = g.get<bool>();
    }
    if (r.response.has_value() == r.echo_gold) {
      f.Fail("response", "exactly one of 'response' or 'gold: true' is required");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ScriptRule> LoadScript(const std::filesystem::path& path) {
  return ParseScript(ReadJsonFile(path), path.string());
}

ModelSpec ParseModelSpec(std::string_view text, const std::optional<std::string>& default_base_url) {
  ModelSpec spec;
  spec.name = std::string(text);
  if (text.rfind("mock:", 0) == 0) {
    std::string_view rest = text.substr(5);
    const std::size_t colon = rest.find(':');
    const std::string_view kind = rest.substr(0, colon);
    const std::string_view arg =
        colon == std::string_view::npos ? std::string_view{} : rest.substr(colon + 1);
    if (kind == "oracle") {
      spec.backend = Backend::kMockOracle;
    } else if (kind == "fixed") {
      spec.backend = Backend::kMockFixed;
      spec.fixed_text = std::string(arg);
    } else if (kind == "uniform_choice") {
      spec.backend = Backend::kMockUniformChoice;
      if (!arg.empty()) {
        try {
          spec.params.seed = std::stoll(std::string(arg));
        } catch (const std::exception&) {
          throw ValidationError("", "models", "bad uniform_choice seed '" + std::string(arg) + "'");
        }
      }
    } else if (kind == "scripted") {
      spec.backend = Backend::kMockScripted;
      if (arg.empty()) throw ValidationError("", "models", "mock:scripted needs a script path");
      spec.script = LoadScript(std::string(arg));
    } else {
      throw ValidationError("", "models", "unknown mock backend '" + std::string(kind) + "'");
    }
    return spec;
  }
  spec.backend = Backend::kHttpChat;
  const std::size_t at = text.find('@');
  if (at != std::string_view::npos) {
    spec.name = std::string(text.substr(0, at));
    spec.base_url = std::string(text.substr(at + 1));
  } else {
    spec.base_url = default_base_url;
  }
  return spec;
}

ModelSpec ModelSpecFromJson(const Json& json, const std::string& source,
                            const std::optional<std::string>& default_base_url) {
  if (json.is_string()) return ParseModelSpec(json.get<std::string>(), default_base_url);
  JsonFields f(json, source, "model");
  ModelSpec spec;
  spec.name = f.RequireNonEmptyString("name");
  if (auto backend = f.OptionalString("backend")) {
    try {
      spec.backend = ParseBackend(*backend);
    } catch (const ValidationError& e) {
      f.Fail("backend", e.reason());
    }
  } else {
    spec = ParseModelSpec(spec.name, default_base_url);
  }
  if (auto url = f.OptionalString("base_url")) spec.base_url = *url;
  if (spec.backend == Backend::kHttpChat && !spec.base_url) spec.base_url = default_base_url;
  if (auto text = f.OptionalString("fixed_text")) spec.fixed_text = *text;
  if (f.Has("script")) {
    const Json& script = f.Require("script");
    spec.script = script.is_string() ? LoadScript(script.get<std::string>())
                                     : ParseScript(script, source);
  }
  if (f.Has("params")) {
    JsonFields p(f.Require("params"), source, f.Path("params"));
    for (const auto& [key, value] : f.Require("params").items()) {
      if (key == "temperature") {
        spec.params.temperature = *p.OptionalNumber("temperature");
      } else if (key == "max_tokens") {
        spec.params.max_tokens = static_cast<int>(*p.OptionalInteger("max_tokens"));
      } else if (key == "seed") {
        spec.params.seed = p.OptionalInteger("seed");
      } else {
        spec.params.extra[key] = value;
      }
    }
  }
  return spec;
}

Json ModelSpecToJson(const ModelSpec& spec) {
  Json params = spec.params.extra;
  params["temperature"] = spec.params.temperature;
  params["max_tokens"] = spec.params.max_tokens;
  if (spec.params.seed) params["seed"] = *spec.params.seed;
  Json j = {{"name", spec.name}, {"backend", ToString(spec.backend)}, {"params", params}};
  if (spec.base_url) j["base_url"] = *spec.base_url;
  if (!spec.fixed_text.empty()) j["fixed_text"] = spec.fixed_text;
  if (!spec.script.empty()) j["script"] = ScriptToJson(spec.script);
  return j;
}

Json CompletionRecordToJson(const CompletionRecord& r) {
  return Json{{"request_hash", r.request_hash},
              {"model", r.model},
              {"prompt", r.prompt},
              {"response_text", r.response_text},
              {"latency_ms", r.latency_ms},
              {"token_usage", {{"prompt", r.token_usage.prompt},
                               {"completion", r.token_usage.completion}}},
              {"created_at", r.created_at}};
}

CompletionRecord CompletionRecordFromJson(const Json& json, const std::string& source) {
  JsonFields f(json, source);
  CompletionRecord r;
  r.request_hash = f.RequireNonEmptyString("request_hash");
  r.model = f.RequireString("model");
  r.prompt = f.RequireString("prompt");
  r.response_text = f.RequireString("response_text");
  r.latency_ms = f.OptionalNumber("latency_ms").value_or(0.0);
  if (f.Has("token_usage")) {
    JsonFields u(f.Require("token_usage"), source, "token_usage");
    r.token_usage.prompt = u.OptionalInteger("prompt").value_or(0);
    r.token_usage.completion = u.OptionalInteger("completion").value_or(0);
  }
  r.created_at = f.OptionalString("created_at").value_or("");
  return r;
}

Json CanonicalRequest(const ModelSpec& spec, std::string_view prompt, const Sample* sample) {
  Json params = spec.params.extra;
  params["temperature"] = spec.params.temperature;
  params["max_tokens"] = spec.params.max_tokens;
  if (spec.params.seed) params["seed"] = *spec.params.seed;
  Json request = {{"model", spec.name}, {"params", std::move(params)},
                  {"prompt", std::string(prompt)}};
  switch (spec.backend) {
    case Backend::kHttpChat:
      break;
    case Backend::kMockFixed:
      request["mock"] = {{"fixed_text", spec.fixed_text}};
      break;
    case Backend::kMockOracle:
      request["mock"] = {{"golds", sample ? Json(sample->golds) : Json(nullptr)}};
      break;
    case Backend::kMockUniformChoice:
      request["mock"] = {{"choices", sample && sample->choices ? Json(*sample->choices)
                                                               : Json(nullptr)}};
      break;
    case Backend::kMockScripted:
      request["mock"] = {{"sample", sample ? Json(sample->id) : Json(nullptr)},
                         {"golds", sample ? Json(sample->golds) : Json(nullptr)},
                         {"script", Sha256Hex(CanonicalJson(ScriptToJson(spec.script)))}};
      break;
  }
  return request;
}

std::string RequestHash(const ModelSpec& spec, std::string_view prompt, const Sample* sample) {
  return Sha256Hex(CanonicalJson(CanonicalRequest(spec, prompt, sample)));
}

}  // namespace emostim
