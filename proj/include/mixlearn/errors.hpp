#pragma once

#include <stdexcept>
#include <string>

namespace mixlearn {

// Error taxonomy shared with the CLI exit-code contract:
// input/config/parse -> 2, budget -> 3, numerical guard -> 4.
enum class ErrorKind { input = 2, budget = 3, numeric = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_input(const std::string& msg) {
    throw Error(ErrorKind::input, msg);
}
[[noreturn]] inline void throw_budget(const std::string& msg) {
    throw Error(ErrorKind::budget, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& msg) {
    throw Error(ErrorKind::numeric, msg);
}

}  // namespace mixlearn
