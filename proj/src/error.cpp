#include "encscan/error.hpp"

namespace encscan {

std::string_view to_string(errc code) noexcept {
    switch (code) {
    case errc::empty_sample: return "EmptySample";
    case errc::insufficient_data: return "InsufficientData";
    case errc::degenerate_sequence: return "DegenerateSequence";
    case errc::domain_error: return "DomainError";
    case errc::parameter_error: return "ParameterError";
    case errc::io_error: return "IoError";
    case errc::validation_error: return "ValidationError";
    case errc::empty_cell: return "EmptyCell";
    case errc::empty_run: return "EmptyRun";
    }
    return "Unknown";
}

} // namespace encscan
