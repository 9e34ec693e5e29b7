#pragma once

#include <stdexcept>
#include <string>

namespace geogap {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind {
    Usage = 1,
    Data = 2,
    Remote = 3,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

inline Error data_error(const std::string& what) { return Error(ErrorKind::Data, what); }
inline Error usage_error(const std::string& what) { return Error(ErrorKind::Usage, what); }
inline Error remote_error(const std::string& what) { return Error(ErrorKind::Remote, what); }

} // namespace geogap
