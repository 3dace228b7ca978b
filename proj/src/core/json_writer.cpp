#include "popcast/core/json_writer.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace popcast {

std::string format_decimal(double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("format_decimal: non-finite value");
    if (value == 0.0) return "0";
    // Fixed notation of a 1e308 double needs ~330 chars.
    char buf[400];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
    if (res.ec != std::errc{}) throw std::runtime_error("format_decimal: conversion failed");
    return std::string(buf, res.ptr);
}

JsonWriter& JsonWriter::begin_object() {
    before_value();
    out_ += '{';
    stack_.push_back({true, true});
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    const bool empty = stack_.back().empty;
    stack_.pop_back();
    if (!empty) newline();
    out_ += '}';
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    before_value();
    out_ += '[';
    stack_.push_back({false, true});
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    const bool empty = stack_.back().empty;
    stack_.pop_back();
    if (!empty) newline();
    out_ += ']';
    return *this;
}

JsonWriter& JsonWriter::key(std::string_view name) {
    auto& frame = stack_.back();
    if (!frame.empty) out_ += ',';
    frame.empty = false;
    newline();
    append_escaped(out_, name);
    out_ += ": ";
    after_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
    before_value();
    append_escaped(out_, s);
    return *this;
}

JsonWriter& JsonWriter::value(double d) {
    before_value();
    out_ += format_decimal(d);
    return *this;
}

JsonWriter& JsonWriter::value(std::int64_t i) {
    before_value();
    out_ += std::to_string(i);
    return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t u) {
    before_value();
    out_ += std::to_string(u);
    return *this;
}

JsonWriter& JsonWriter::value(bool b) {
    before_value();
    out_ += b ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::null() {
    before_value();
    out_ += "null";
    return *this;
}

JsonWriter& JsonWriter::number_array(std::span<const double> values) {
    before_value();
    out_ += '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ += ", ";
        out_ += format_decimal(values[i]);
    }
    out_ += ']';
    return *this;
}

JsonWriter& JsonWriter::int_array(std::span<const int> values) {
    before_value();
    out_ += '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ += ", ";
        out_ += std::to_string(values[i]);
    }
    out_ += ']';
    return *this;
}

JsonWriter& JsonWriter::string_array(std::span<const std::string> values) {
    before_value();
    out_ += '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ += ", ";
        append_escaped(out_, values[i]);
    }
    out_ += ']';
    return *this;
}

std::string JsonWriter::str() const {
    if (stack_.empty() && !out_.empty()) return out_ + '\n';
    return out_;
}

void JsonWriter::before_value() {
    if (after_key_) {
        after_key_ = false;
        return;
    }
    if (stack_.empty()) return;
    auto& frame = stack_.back();
    if (frame.is_object) throw std::logic_error("JsonWriter: value inside object needs a key");
    if (!frame.empty) out_ += ',';
    frame.empty = false;
    newline();
}

void JsonWriter::newline() {
    out_ += '\n';
    out_.append(stack_.size() * 2, ' ');
}

void JsonWriter::append_escaped(std::string& out, std::string_view s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

}  // namespace popcast
