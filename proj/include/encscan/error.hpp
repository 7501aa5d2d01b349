#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace encscan {

enum class errc {
    empty_sample,
    insufficient_data,
    degenerate_sequence,
    domain_error,
    parameter_error,
    io_error,
    validation_error,
    empty_cell,
    empty_run,
};

std::string_view to_string(errc code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace encscan
