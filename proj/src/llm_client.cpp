#include "engram/llm_client.hpp"

#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "engram/errors.hpp"

namespace engram {

using nlohmann::json;

namespace {

std::pair<std::string, std::string> split_endpoint(const std::string& url) {
    if (url.empty()) {
        throw ValidationError("LLM client requires an endpoint URL");
    }
    auto scheme_end = url.find("://");
    const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpLlmClient::HttpLlmClient(LlmConfig config) : config_(std::move(config)) {
    if (config_.endpoint_url.empty()) {
        throw ValidationError("LLM client requires an endpoint URL");
    }
}

std::string HttpLlmClient::complete(const LlmRequest& request) {
    const auto [base, path] = split_endpoint(config_.endpoint_url);
    httplib::Client client(base);
    client.set_connection_timeout(0, config_.timeout_ms * 1000);
    client.set_read_timeout(0, config_.timeout_ms * 1000);
    client.set_write_timeout(0, config_.timeout_ms * 1000);
    httplib::Headers headers;
    if (!config_.auth_token_env_var.empty()) {
        if (const char* token = std::getenv(config_.auth_token_env_var.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }

    json body;
    body["system"] = request.system;
    auto& messages = body["messages"] = json::array();
    for (const auto& message : request.messages) {
        messages.push_back({{"role", message.role}, {"content", message.content}});
    }

    auto result = client.Post(path, headers, body.dump(), "application/json");
    if (!result) {
        const auto err = result.error();
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
            err == httplib::Error::Write) {
            throw RemoteError(RemoteError::Kind::timeout,
                              "LLM request timed out after " + std::to_string(config_.timeout_ms) +
                                  " ms");
        }
        throw RemoteError(RemoteError::Kind::unreachable,
                          "LLM endpoint unreachable: " + httplib::to_string(err));
    }
    if (result->status < 200 || result->status >= 300) {
        throw RemoteError(RemoteError::Kind::http_status,
                          "LLM endpoint returned HTTP " + std::to_string(result->status));
    }
    try {
        const json doc = json::parse(result->body);
        return doc.at("reply").get<std::string>();
    } catch (const json::exception& e) {
        throw RemoteError(RemoteError::Kind::bad_response,
                          std::string("LLM response lacks a \"reply\" string: ") + e.what());
    }
}

ScriptedLlmClient ScriptedLlmClient::from_file(const std::filesystem::path& script_path) {
    std::ifstream in(script_path);
    if (!in) {
        throw IoError("cannot open LLM stub script " + script_path.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ValidationError("LLM stub script " + script_path.string() +
                              " is not valid JSON: " + e.what());
    }
    const std::string mode = doc.value("mode", "replies");
    if (mode == "echo") {
        return echo();
    }
    if (mode != "replies" || !doc.contains("replies") || !doc["replies"].is_array()) {
        throw ValidationError("LLM stub script must be {\"mode\":\"echo\"} or "
                              "{\"mode\":\"replies\",\"replies\":[...]}");
    }
    return ScriptedLlmClient(doc["replies"].get<std::vector<std::string>>());
}

ScriptedLlmClient ScriptedLlmClient::echo() {
    ScriptedLlmClient client;
    client.echo_ = true;
    return client;
}

ScriptedLlmClient::ScriptedLlmClient(std::vector<std::string> replies)
    : replies_(std::move(replies)) {}

std::string ScriptedLlmClient::complete(const LlmRequest& request) {
    if (echo_) {
        std::string out = request.system;
        for (const auto& message : request.messages) {
            out += '\n';
            out += message.content;
        }
        return out;
    }
    if (next_ >= replies_.size()) {
        throw RemoteError(RemoteError::Kind::bad_response, "LLM stub script exhausted after " +
                                                               std::to_string(replies_.size()) +
                                                               " replies");
    }
    return replies_[next_++];
}

}  // namespace engram
