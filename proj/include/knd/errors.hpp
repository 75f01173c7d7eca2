#ifndef KND_ERRORS_HPP
#define KND_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace knd {

// Invalid input data: malformed specs, dangling references, contract violations.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Selector text rejected by the grammar; offset is the byte position of the problem.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Filesystem trouble while reading scenarios or writing reports.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace knd

#endif // KND_ERRORS_HPP
