#ifndef KND_ATTRIBUTES_HPP
#define KND_ATTRIBUTES_HPP

#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "knd/errors.hpp"

namespace knd {

// One qualitative device attribute: text, integer, or flag. Exactly one
// variant is live; text is never empty.
class AttributeValue {
public:
    enum class Kind { Text, Integer, Flag };

    static AttributeValue text(std::string v) {
        if (v.empty()) {
            throw ValidationError("text attribute value must be non-empty");
        }
        return AttributeValue(std::move(v));
    }
    static AttributeValue integer(std::int64_t v) { return AttributeValue(v); }
    static AttributeValue flag(bool v) { return AttributeValue(v); }

    Kind kind() const { return static_cast<Kind>(value_.index()); }

    bool is_text() const { return kind() == Kind::Text; }
    bool is_integer() const { return kind() == Kind::Integer; }
    bool is_flag() const { return kind() == Kind::Flag; }

    const std::string& as_text() const { return std::get<std::string>(value_); }
    std::int64_t as_integer() const { return std::get<std::int64_t>(value_); }
    bool as_flag() const { return std::get<bool>(value_); }

    friend bool operator==(const AttributeValue& a, const AttributeValue& b) {
        return a.value_ == b.value_;
    }
    friend bool operator!=(const AttributeValue& a, const AttributeValue& b) {
        return !(a == b);
    }

private:
    explicit AttributeValue(std::string v) : value_(std::move(v)) {}
    explicit AttributeValue(std::int64_t v) : value_(v) {}
    explicit AttributeValue(bool v) : value_(v) {}

    std::variant<std::string, std::int64_t, bool> value_;
};

using AttributeMap = std::map<std::string, AttributeValue>;

const char* attribute_kind_name(AttributeValue::Kind k);

} // namespace knd

#endif // KND_ATTRIBUTES_HPP
