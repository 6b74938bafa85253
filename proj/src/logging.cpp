#include "promptseg/logging.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace promptseg::log {

namespace {
std::atomic<bool> g_enabled{true};
std::mutex g_mu;
}  // namespace

void set_enabled(bool enabled) { g_enabled = enabled; }

void emit(std::string_view level, std::string_view event, nlohmann::ordered_json fields) {
    if (!g_enabled) return;
    nlohmann::ordered_json line;
    line["level"] = level;
    line["event"] = event;
    if (fields.is_object()) {
        for (auto& [k, v] : fields.items()) line[k] = v;
    }
    const std::string text = line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    std::lock_guard lock(g_mu);
    std::cerr << text << '\n';
}

}  // namespace promptseg::log
