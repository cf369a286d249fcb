#ifndef RCIFS_ERRORS_HPP
#define RCIFS_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace rcifs {

// Exception carrying a stable machine-readable code next to the prose
// message. Codes are short snake_case identifiers (e.g. "not_irreducible")
// so tests and the CLI can match on them without parsing the prose part.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
    throw Error(std::move(code), message);
}

} // namespace rcifs

#endif
