#include <nlohmann/json.hpp>

#include <regex>

#include "httplib.h"
#include "ued/generator/backend.hpp"

namespace ued::gen {

namespace {

struct Endpoint {
  std::string base;
  std::string path;
};

Endpoint split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw BackendError("malformed GENERATOR_URL '" + url + "'");
  Endpoint e{m[1].str(), m[2].matched ? m[2].str() : "/v1/chat/completions"};
  return e;
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {}

std::string RemoteBackend::complete(const std::string& system, const std::string& user) {
  if (config_.url.empty()) throw BackendError("GENERATOR_URL is not set");
  const auto endpoint = split_url(config_.url);
  httplib::Client client(endpoint.base);
  const auto secs = static_cast<time_t>(config_.timeout.count());
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  const nlohmann::json body = {
      {"model", config_.model},
      {"messages",
       {{{"role", "system"}, {"content", system}}, {{"role", "user"}, {"content", user}}}},
      {"temperature", config_.temperature},
      {"top_p", config_.top_p},
      {"max_tokens", config_.max_tokens},
  };
  auto res = client.Post(endpoint.path, headers, body.dump(), "application/json");
  if (!res) throw BackendError("request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw BackendError("backend returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed completion: ") + e.what());
  }
}

std::string RemoteBackend::describe(const GenerationContext& ctx, Rng&) {
  const auto reply = complete(ctx.domain_context_1, render_phase1_prompt(ctx));
  auto text = extract_tag(reply, "docstring");
  if (!text) throw BackendError("reply has no <docstring> section");
  return *text;
}

std::string RemoteBackend::write_program(const GenerationContext& ctx,
                                         const std::string& description, Rng&) {
  const auto reply = complete(ctx.domain_context_2, render_phase2_prompt(ctx, description));
  auto text = extract_tag(reply, "code");
  if (!text) throw BackendError("reply has no <code> section");
  return *text;
}

}  // namespace ued::gen
