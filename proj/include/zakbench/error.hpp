#pragma once

#include <stdexcept>
#include <string>

namespace zakbench {

enum class ErrorKind {
    precondition,  // invalid input, misalignment, resolution violations
    numerical      // a computed certificate or bound failed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string& what) {
    throw Error(ErrorKind::precondition, what);
}

[[noreturn]] inline void fail_numerical(const std::string& what) {
    throw Error(ErrorKind::numerical, what);
}

inline void require(bool condition, const std::string& what) {
    if (!condition) fail(what);
}

}  // namespace zakbench
