#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace popcast {

/// Shortest round-trip decimal rendering without exponent notation
/// (e.g. 100500, 0.0000001, -2.5). Throws on non-finite input.
std::string format_decimal(double value);

/// Streaming writer for diff-stable JSON: two-space indentation, numbers via
/// format_decimal, short numeric arrays kept on one line.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(std::string_view name);

    JsonWriter& value(std::string_view s);
    JsonWriter& value(const char* s) { return value(std::string_view(s)); }
    JsonWriter& value(double d);
    JsonWriter& value(std::int64_t i);
    JsonWriter& value(std::uint64_t u);
    JsonWriter& value(int i) { return value(static_cast<std::int64_t>(i)); }
    JsonWriter& value(bool b);
    JsonWriter& null();

    JsonWriter& number_array(std::span<const double> values);
    JsonWriter& int_array(std::span<const int> values);
    JsonWriter& string_array(std::span<const std::string> values);

    /// The document so far, with a trailing newline once the root closes.
    [[nodiscard]] std::string str() const;

private:
    void before_value();
    void newline();
    static void append_escaped(std::string& out, std::string_view s);

    struct Frame {
        bool is_object = false;
        bool empty = true;
    };
    std::string out_;
    std::vector<Frame> stack_;
    bool after_key_ = false;
};

}  // namespace popcast
