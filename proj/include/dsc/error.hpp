#ifndef DSC_ERROR_HPP
#define DSC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dsc {

// Error categories, aligned with the CLI exit codes and the C API status
// codes: usage -> 1, data -> 2, estimation -> 3.
enum class ErrorKind {
    Usage,
    Data,
    Estimation,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_usage(const std::string& msg) { throw Error(ErrorKind::Usage, msg); }
[[noreturn]] inline void throw_data(const std::string& msg) { throw Error(ErrorKind::Data, msg); }
[[noreturn]] inline void throw_estimation(const std::string& msg) { throw Error(ErrorKind::Estimation, msg); }
[[noreturn]] inline void throw_internal(const std::string& msg) { throw Error(ErrorKind::Internal, msg); }

}  // namespace dsc

#endif
