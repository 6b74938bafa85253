#pragma once

#include <string_view>

#include <json.hpp>

namespace promptseg::log {

// One JSON object per line on stderr: {"level": ..., "event": ..., ...fields}.
void emit(std::string_view level, std::string_view event, nlohmann::ordered_json fields = {});

inline void info(std::string_view event, nlohmann::ordered_json fields = {}) {
    emit("info", event, std::move(fields));
}
inline void warn(std::string_view event, nlohmann::ordered_json fields = {}) {
    emit("warn", event, std::move(fields));
}
inline void error(std::string_view event, nlohmann::ordered_json fields = {}) {
    emit("error", event, std::move(fields));
}

// Silences emit(); tests use it to keep output readable.
void set_enabled(bool enabled);

}  // namespace promptseg::log
