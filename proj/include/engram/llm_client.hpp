#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace engram {

struct LlmMessage {
    std::string role;
    std::string content;
};

// Wire format of the chat endpoint: POST {"system": ..., "messages": [...]}
// expecting {"reply": ...} back.
struct LlmRequest {
    std::string system;
    std::vector<LlmMessage> messages;
};

class LlmClient {
public:
    virtual ~LlmClient() = default;
    // Returns the assistant reply. Throws RemoteError on transport or
    // protocol failures.
    virtual std::string complete(const LlmRequest& request) = 0;
};

struct LlmConfig {
    std::string endpoint_url;
    std::string auth_token_env_var;
    int timeout_ms = 30000;
};

class HttpLlmClient : public LlmClient {
public:
    explicit HttpLlmClient(LlmConfig config);
    std::string complete(const LlmRequest& request) override;

private:
    LlmConfig config_;
};

// Deterministic stand-in for tests and offline demos. Two modes:
//   replies  - returns a fixed list of replies in order, then errors
//   echo     - returns the full prompt text (system + messages) verbatim
// Script files are JSON: {"mode": "replies", "replies": [...]} or
// {"mode": "echo"}.
class ScriptedLlmClient : public LlmClient {
public:
    static ScriptedLlmClient from_file(const std::filesystem::path& script_path);
    static ScriptedLlmClient echo();
    explicit ScriptedLlmClient(std::vector<std::string> replies);

    std::string complete(const LlmRequest& request) override;

private:
    ScriptedLlmClient() = default;

    bool echo_ = false;
    std::vector<std::string> replies_;
    std::size_t next_ = 0;
};

}  // namespace engram
