// Strict JSON extraction helpers shared by the file-format readers.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include "chainorder/digest.hpp"
#include "chainorder/errors.hpp"
#include "json.hpp"

namespace chainorder::jsonio {

using json = nlohmann::ordered_json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
    throw ParseError(what, path);
}

inline json parse(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) fail("$", "not valid JSON");
    return doc;
}

inline std::string elem(const std::string& path, std::size_t index) {
    return path + "[" + std::to_string(index) + "]";
}

inline const json& object_at(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    return j;
}

inline const json& array_at(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array");
    return j;
}

inline void allow_keys(const json& obj, const std::string& path,
                       std::initializer_list<std::string_view> keys) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (std::string_view k : keys) {
            if (key == k) { known = true; break; }
        }
        if (!known) fail(path, "unknown key '" + key + "'");
    }
}

inline const json& member(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing key '") + key + "'");
    return *it;
}

inline const json* opt_member(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

inline std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

inline std::int64_t get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    if (j.is_number_unsigned() && j.get<std::uint64_t>() > std::uint64_t(INT64_MAX)) {
        fail(path, "integer out of range");
    }
    return j.get<std::int64_t>();
}

inline std::uint64_t get_uint(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    if (!j.is_number_unsigned() && j.get<std::int64_t>() < 0) {
        fail(path, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

inline double get_prob(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    double v = j.get<double>();
    if (!(v >= 0.0 && v <= 1.0)) fail(path, "expected a value in [0, 1]");
    return v;
}

inline Digest get_digest(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a hex digest string");
    auto d = Digest::from_hex(j.get<std::string>());
    if (!d) fail(path, "expected 64 lowercase hex characters");
    return *d;
}

} // namespace chainorder::jsonio
